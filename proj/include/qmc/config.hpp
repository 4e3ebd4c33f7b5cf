#pragma once

#include <map>
#include <string>
#include <string_view>

#include "qmc/aco.hpp"

namespace qmc {

// "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_config(std::string_view text);
std::map<std::string, std::string> read_config(const std::string& path);

// Recognized keys: ql.alpha, ql.gamma, ql.epsilon0, ql.epsilon_min; comma-separated
// aco.archive_size, aco.ants, aco.q, aco.xi overriding the n-based value lists;
// nm.budget, ls.max_iterations, cache.capacity. Unknown keys throw std::invalid_argument.
void apply_config(const std::map<std::string, std::string>& values, EngineConfig& engine, int n);

}  // namespace qmc
