#include "qmc/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace qmc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument(fmt::format("config key {}: bad value '{}'", key, text));
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    out.push_back(parse_value<T>(key, text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_config(std::string_view text) {
  std::map<std::string, std::string> values;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument(fmt::format("config line {}: expected key = value", number));
    values[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
  }
  return values;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void apply_config(const std::map<std::string, std::string>& values, EngineConfig& engine, int n) {
  ParamSpace space = engine.space.value_or(ParamSpace::for_items(n));
  for (const auto& [key, value] : values) {
    if (key == "ql.alpha") engine.qlearning.alpha = parse_value<double>(key, value);
    else if (key == "ql.gamma") engine.qlearning.gamma = parse_value<double>(key, value);
    else if (key == "ql.epsilon0") engine.qlearning.epsilon0 = parse_value<double>(key, value);
    else if (key == "ql.epsilon_min") engine.qlearning.epsilon_min = parse_value<double>(key, value);
    else if (key == "aco.archive_size") space.archive_sizes = parse_list<int>(key, value);
    else if (key == "aco.ants") space.ants = parse_list<int>(key, value);
    else if (key == "aco.q") space.q = parse_list<double>(key, value);
    else if (key == "aco.xi") space.xi = parse_list<double>(key, value);
    else if (key == "nm.budget") engine.nelder_mead.budget = parse_value<int>(key, value);
    else if (key == "ls.max_iterations") engine.decode.max_relocation_iterations = parse_value<int>(key, value);
    else if (key == "cache.capacity") engine.cache_capacity = parse_value<std::size_t>(key, value);
    else throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
  }
  engine.space = space;
}

}  // namespace qmc
