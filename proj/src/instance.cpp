#include "qmc/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace qmc {

namespace {

struct Line {
  int number;
  std::vector<std::string_view> tokens;
};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

class Reader {
 public:
  explicit Reader(std::string_view text) {
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(pos, end - pos);
      ++number;
      std::string_view body = trim(raw);
      if (!body.empty() && body.front() == '#') {
        body.remove_prefix(1);
        body = trim(body);
        if (body.starts_with("shape:")) shape = std::string(trim(body.substr(6)));
      } else if (!body.empty()) {
        lines_.push_back({number, split_ws(body)});
      }
      if (end == text.size()) break;
      pos = end + 1;
    }
    last_line_ = number;
  }

  const Line& next(const char* what) {
    if (cursor_ >= lines_.size()) throw ParseError(last_line_, fmt::format("unexpected end of file, expected {}", what));
    return lines_[cursor_++];
  }

  bool done() const { return cursor_ >= lines_.size(); }
  const Line& peek() const { return lines_[cursor_]; }

  std::string shape;

 private:
  std::vector<Line> lines_;
  std::size_t cursor_ = 0;
  int last_line_ = 0;
};

bool token_is_integer(std::string_view tok) {
  return tok.find_first_of(".eE") == std::string_view::npos;
}

Scalar parse_number(std::string_view tok, int line, bool& integral) {
  Scalar value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(value))
    throw ParseError(line, fmt::format("malformed number '{}'", tok));
  if (!token_is_integer(tok)) integral = false;
  return value;
}

int parse_count(std::string_view tok, int line, const char* name) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || value < 1)
    throw ParseError(line, fmt::format("malformed header: {} must be a positive integer", name));
  return value;
}

void expect_count(const Line& line, std::size_t count, const char* what) {
  if (line.tokens.size() != count)
    throw ParseError(line.number, fmt::format("{} expects {} values, found {}", what, count, line.tokens.size()));
}

std::string format_number(Scalar v) {
  if (std::nearbyint(v) == v && std::abs(v) < 9.0e15) return fmt::format("{}", static_cast<long long>(v));
  return fmt::format("{}", v);
}

Scalar cap_sum(const Instance& inst, int t) { return inst.type_caps.row(t).sum(); }

// Prefer larger aggregated capacity, then lower cost, then lower index.
bool roomier(const Instance& inst, int a, int b) {
  const Scalar ca = cap_sum(inst, a), cb = cap_sum(inst, b);
  if (ca != cb) return ca > cb;
  if (inst.type_costs[a] != inst.type_costs[b]) return inst.type_costs[a] < inst.type_costs[b];
  return a < b;
}

}  // namespace

bool operator==(const Instance& a, const Instance& b) {
  return a.n == b.n && a.m == b.m && a.d == b.d && a.weights == b.weights && a.pair_costs == b.pair_costs &&
         a.type_costs == b.type_costs && a.type_caps == b.type_caps && a.shape == b.shape &&
         a.integral == b.integral;
}

CostShape parse_cost_shape(std::string_view name) {
  if (name == "linear") return CostShape::linear;
  if (name == "convex") return CostShape::convex;
  if (name == "concave") return CostShape::concave;
  if (name == "mixed") return CostShape::mixed;
  throw std::invalid_argument(fmt::format("unknown cost shape '{}'", name));
}

std::string_view to_string(CostShape shape) {
  switch (shape) {
    case CostShape::linear: return "linear";
    case CostShape::convex: return "convex";
    case CostShape::concave: return "concave";
    case CostShape::mixed: return "mixed";
  }
  return "linear";
}

PairCounting parse_pair_counting(std::string_view name) {
  if (name == "ordered") return PairCounting::ordered;
  if (name == "unordered") return PairCounting::unordered;
  throw std::invalid_argument(fmt::format("unknown pair counting '{}'", name));
}

AssignRule parse_assign_rule(std::string_view name) {
  if (name == "min_link") return AssignRule::min_link;
  if (name == "max_link") return AssignRule::max_link;
  throw std::invalid_argument(fmt::format("unknown assign rule '{}'", name));
}

std::string_view to_string(PairCounting counting) {
  return counting == PairCounting::ordered ? "ordered" : "unordered";
}

std::string_view to_string(AssignRule rule) { return rule == AssignRule::min_link ? "min_link" : "max_link"; }

Instance parse_instance(std::string_view text) {
  Reader reader(text);
  Instance inst;
  inst.shape = reader.shape;
  bool integral = true;

  const Line& header = reader.next("header");
  if (header.tokens.size() != 2 || header.tokens[0] != "QMCVSBPP" || header.tokens[1] != "1")
    throw ParseError(header.number, "malformed header: expected 'QMCVSBPP 1'");

  const Line& dims = reader.next("dimensions line");
  if (dims.tokens.size() != 3) throw ParseError(dims.number, "malformed header: expected 'n m d'");
  inst.n = parse_count(dims.tokens[0], dims.number, "n");
  inst.m = parse_count(dims.tokens[1], dims.number, "m");
  inst.d = parse_count(dims.tokens[2], dims.number, "d");
  const int n = inst.n, m = inst.m, d = inst.d;

  inst.weights.resize(n, d);
  std::vector<int> weight_line(n);
  for (int i = 0; i < n; ++i) {
    const Line& line = reader.next("item weights");
    expect_count(line, d, "item weight line");
    weight_line[i] = line.number;
    for (int r = 0; r < d; ++r) {
      inst.weights(i, r) = parse_number(line.tokens[r], line.number, integral);
      if (inst.weights(i, r) <= 0) throw ParseError(line.number, "non-positive weight");
    }
  }

  inst.type_costs.resize(m);
  inst.type_caps.resize(m, d);
  for (int t = 0; t < m; ++t) {
    const Line& line = reader.next("bin type");
    expect_count(line, d + 1, "bin type line");
    inst.type_costs[t] = parse_number(line.tokens[0], line.number, integral);
    if (inst.type_costs[t] <= 0) throw ParseError(line.number, "non-positive bin cost");
    for (int r = 0; r < d; ++r) {
      inst.type_caps(t, r) = parse_number(line.tokens[r + 1], line.number, integral);
      if (inst.type_caps(t, r) <= 0) throw ParseError(line.number, "non-positive capacity");
    }
  }

  inst.pair_costs.resize(n, n);
  std::vector<int> pair_line(n);
  for (int i = 0; i < n; ++i) {
    const Line& line = reader.next("pair cost row");
    expect_count(line, n, "pair cost row");
    pair_line[i] = line.number;
    for (int s = 0; s < n; ++s) {
      const Scalar c = parse_number(line.tokens[s], line.number, integral);
      if (c < 0) throw ParseError(line.number, "negative pair cost");
      if (s == i && c != 0) throw ParseError(line.number, "non-zero diagonal pair cost");
      inst.pair_costs(i, s) = c;
    }
    for (int s = 0; s < i; ++s)
      if (inst.pair_costs(i, s) != inst.pair_costs(s, i))
        throw ParseError(line.number, fmt::format("asymmetric pair cost between items {} and {}", s + 1, i + 1));
  }

  if (!reader.done()) throw ParseError(reader.peek().number, "trailing data after pair cost matrix");

  for (int i = 0; i < n; ++i) {
    bool fits = false;
    for (int t = 0; t < m && !fits; ++t) fits = item_fits_type(inst, i, t);
    if (!fits) throw ParseError(weight_line[i], fmt::format("item {} fits no bin type", i + 1));
  }
  inst.integral = integral;
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

std::string serialize_instance(const Instance& inst) {
  std::string out = "QMCVSBPP 1\n";
  if (!inst.shape.empty()) out += fmt::format("# shape: {}\n", inst.shape);
  out += fmt::format("{} {} {}\n", inst.n, inst.m, inst.d);
  auto row = [&](auto&& values, int count) {
    for (int k = 0; k < count; ++k) {
      if (k) out += ' ';
      out += format_number(values(k));
    }
    out += '\n';
  };
  for (int i = 0; i < inst.n; ++i) row(inst.weights.row(i), inst.d);
  for (int t = 0; t < inst.m; ++t) {
    out += format_number(inst.type_costs[t]);
    out += ' ';
    row(inst.type_caps.row(t), inst.d);
  }
  for (int i = 0; i < inst.n; ++i) row(inst.pair_costs.row(i), inst.n);
  return out;
}

void validate(const Instance& inst) {
  if (inst.n < 1 || inst.m < 1 || inst.d < 1) throw std::invalid_argument("instance dimensions must be positive");
  if (inst.weights.rows() != inst.n || inst.weights.cols() != inst.d || inst.pair_costs.rows() != inst.n ||
      inst.pair_costs.cols() != inst.n || inst.type_costs.size() != inst.m || inst.type_caps.rows() != inst.m ||
      inst.type_caps.cols() != inst.d)
    throw std::invalid_argument("instance matrix shapes disagree with n, m, d");
  if ((inst.weights.array() <= 0).any()) throw std::invalid_argument("non-positive weight");
  if ((inst.type_caps.array() <= 0).any()) throw std::invalid_argument("non-positive capacity");
  if ((inst.type_costs.array() <= 0).any()) throw std::invalid_argument("non-positive bin cost");
  if ((inst.pair_costs.array() < 0).any()) throw std::invalid_argument("negative pair cost");
  if (inst.pair_costs != inst.pair_costs.transpose()) throw std::invalid_argument("asymmetric pair cost");
  if ((inst.pair_costs.diagonal().array() != 0).any()) throw std::invalid_argument("non-zero diagonal pair cost");
  for (int i = 0; i < inst.n; ++i) {
    bool fits = false;
    for (int t = 0; t < inst.m && !fits; ++t) fits = item_fits_type(inst, i, t);
    if (!fits) throw std::invalid_argument(fmt::format("item {} fits no bin type", i + 1));
  }
}

Instance generate_instance(int n, int m, int d, CostShape shape, std::uint64_t seed) {
  if (n < 1 || m < 1 || d < 1) throw std::invalid_argument("generate_instance: n, m, d must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> weight_dist(1, 20);
  std::uniform_real_distribution<double> jitter(0.85, 1.15);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pair_dist(1, 10);
  std::uniform_int_distribution<int> shape_pick(0, 2);

  Instance inst;
  inst.n = n;
  inst.m = m;
  inst.d = d;
  inst.shape = std::string(to_string(shape));
  inst.weights.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < d; ++r) inst.weights(i, r) = weight_dist(rng);

  // The roomiest types hold roughly n/3 average items (between 2 and 10).
  const double base = 10.5 * std::clamp(n / 3.0, 2.0, 10.0);
  inst.type_caps.resize(m, d);
  inst.type_costs.resize(m);
  for (int t = 0; t < m; ++t) {
    const double scale = base * (0.35 + 0.65 * (t + 1) / m);
    for (int r = 0; r < d; ++r) inst.type_caps(t, r) = std::max(20.0, std::round(scale * jitter(rng)));
    const double s = inst.type_caps.row(t).mean() / base;
    CostShape local = shape;
    if (shape == CostShape::mixed) local = static_cast<CostShape>(shape_pick(rng));
    double cost = 0;
    switch (local) {
      case CostShape::linear: cost = 100.0 * s; break;
      case CostShape::convex: cost = 100.0 * s * s; break;
      case CostShape::concave: cost = 100.0 * std::sqrt(s); break;
      case CostShape::mixed: break;
    }
    inst.type_costs[t] = std::max(1.0, std::round(cost));
  }

  inst.pair_costs = RowMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int s = i + 1; s < n; ++s)
      if (unit(rng) < 0.35) inst.pair_costs(i, s) = inst.pair_costs(s, i) = pair_dist(rng);
  inst.integral = true;
  return inst;
}

bool item_fits_type(const Instance& inst, int item, int t) {
  return (inst.weights.row(item).array() <= inst.type_caps.row(t).array()).all();
}

bool pair_fits_type(const Instance& inst, int a, int b, int t) {
  return ((inst.weights.row(a) + inst.weights.row(b)).array() <= inst.type_caps.row(t).array()).all();
}

LinkStats compute_link_stats(const Instance& inst) {
  const int n = inst.n, m = inst.m;
  LinkStats stats;
  stats.links = RowMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (inst.pair_costs(i, j) == 0) continue;
      for (int t = 0; t < m; ++t)
        if (pair_fits_type(inst, i, j, t)) {
          stats.links(i, j) = stats.links(j, i) = inst.pair_costs(i, j);
          break;
        }
    }
  stats.agg_penalty = stats.links.rowwise().sum();
  const Vector total_weight = inst.weights.rowwise().sum();
  stats.agg_weight = (stats.links.array() > 0).cast<Scalar>().matrix() * total_weight;

  stats.largest_type = 0;
  for (int t = 1; t < m; ++t)
    if (roomier(inst, t, stats.largest_type)) stats.largest_type = t;

  stats.cost_order.resize(m);
  for (int t = 0; t < m; ++t) stats.cost_order[t] = t;
  std::sort(stats.cost_order.begin(), stats.cost_order.end(), [&](int a, int b) {
    if (inst.type_costs[a] != inst.type_costs[b]) return inst.type_costs[a] < inst.type_costs[b];
    const Scalar ca = cap_sum(inst, a), cb = cap_sum(inst, b);
    if (ca != cb) return ca > cb;
    return a < b;
  });

  stats.open_type.assign(n, stats.largest_type);
  for (int i = 0; i < n; ++i) {
    if (item_fits_type(inst, i, stats.largest_type)) continue;
    int best = -1;
    for (int t = 0; t < m; ++t)
      if (item_fits_type(inst, i, t) && (best < 0 || roomier(inst, t, best))) best = t;
    stats.open_type[i] = best;
  }
  return stats;
}

Problem::Problem(Instance inst, PairCounting counting_, AssignRule rule)
    : instance(std::move(inst)), counting(counting_), assign_rule(rule) {
  validate(instance);
  stats = compute_link_stats(instance);
  type_capacity_sum = instance.type_caps.rowwise().sum();
}

}  // namespace qmc
