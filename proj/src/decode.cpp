#include "qmc/decode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace qmc {

bool is_valid(const RandomKeys& rk, int n_items) {
  return rk.keys.size() == n_items + 3 && (rk.keys.array() >= 0).all() && (rk.keys.array() < 1).all();
}

RandomKeys uniform_keys(int n_items, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector keys(n_items + 3);
  for (auto& k : keys) k = std::min(unit(rng), RandomKeys::kMaxKey);
  return RandomKeys(std::move(keys));
}

DecodeConfig decode_genes(const RandomKeys& rk) {
  const int n = rk.items();
  DecodeConfig config;
  config.strategy = std::clamp(1 + static_cast<int>(std::floor(3.0 * rk.strategy_gene())), 1, 3);
  config.initial_bins = std::clamp(static_cast<int>(std::floor(n * rk.bins_gene())), 0, n);
  config.relocation_prob = rk.relocation_gene();
  return config;
}

std::vector<int> sorted_item_order(const RandomKeys& rk) {
  std::vector<int> order(rk.items());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rk.keys[a] < rk.keys[b]; });
  return order;
}

std::string cache_key(std::span<const int> order, const DecodeConfig& config) {
  std::string key = fmt::format("{}|{}|{:a}|", config.strategy, config.initial_bins, config.relocation_prob);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k) key += ',';
    key += fmt::format("{}", order[k]);
  }
  return key;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

int assign_best(PackingSolution& sol, int item, const Problem& problem) {
  const Instance& inst = problem.instance;
  const bool maximize = problem.assign_rule == AssignRule::max_link;
  int best = -1;
  Scalar best_score = 0;
  for (int b = 0; b < sol.bin_count(); ++b) {
    const Bin& bin = sol.bins()[b];
    if (!fits(bin, item, inst)) continue;
    Scalar score = 0;
    for (int j : bin.items) score += problem.stats.links(item, j);
    if (best < 0 || (maximize ? score > best_score : score < best_score)) {
      best = b;
      best_score = score;
    }
  }
  if (best >= 0) {
    sol.add_item(best, item, inst);
    return best;
  }
  return sol.open_bin(problem.stats.open_type[item], item, inst);
}

namespace {

std::vector<int> identity_order(int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

int rcl_size(int n, Rng& rng) {
  const int lo = std::max(1, static_cast<int>(std::ceil(0.03 * n)));
  const int hi = std::max(1, static_cast<int>(std::ceil(0.05 * n)));
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

void finish_decode(PackingSolution& sol, Scalar relocation_prob, const Problem& problem, int max_iterations,
                   Rng& rng) {
  post_process(sol, problem);
  relocate_items(sol, problem, {relocation_prob, max_iterations}, rng);
}

}  // namespace

PackingSolution semi_greedy_construct(const Problem& problem, Rng& rng, std::optional<std::span<const int>> order) {
  const Instance& inst = problem.instance;
  const LinkStats& stats = problem.stats;
  const int n = inst.n;
  std::vector<int> fallback;
  if (!order) {
    fallback = identity_order(n);
    order = std::span<const int>(fallback);
  }
  const std::span<const int> seq = *order;
  const int r = rcl_size(n, rng);

  PackingSolution sol(n);
  for (;;) {
    // Randomized candidate list: the first r unassigned linked items in scan order.
    int seed = -1, taken = 0;
    for (int i : seq) {
      if (sol.bin_of(i) >= 0 || stats.agg_penalty[i] <= 0) continue;
      if (seed < 0 || stats.agg_weight[i] > stats.agg_weight[seed]) seed = i;
      if (++taken == r) break;
    }
    if (seed < 0) break;

    const int bin = sol.open_bin(stats.open_type[seed], seed, inst);
    for (;;) {
      int partner = -1;
      for (int j : seq) {
        if (sol.bin_of(j) >= 0 || stats.links(seed, j) <= 0) continue;
        if (!fits(sol.bins()[bin], j, inst)) continue;
        if (partner < 0 || stats.links(seed, j) > stats.links(seed, partner)) partner = j;
      }
      if (partner < 0) break;
      sol.add_item(bin, partner, inst);
    }
  }
  for (int i : seq)
    if (sol.bin_of(i) < 0) assign_best(sol, i, problem);
  return sol;
}

PackingSolution semi_greedy(const Problem& problem, Rng& rng, std::optional<std::span<const int>> order,
                            int max_relocation_iterations) {
  PackingSolution sol = semi_greedy_construct(problem, rng, order);
  finish_decode(sol, 1.0, problem, max_relocation_iterations, rng);
  return sol;
}

PackingSolution decode(const RandomKeys& rk, const Problem& problem, const DecodeOptions& options) {
  const std::vector<int> order = sorted_item_order(rk);
  return decode(order, decode_genes(rk), problem, options);
}

PackingSolution decode(std::span<const int> order, const DecodeConfig& config, const Problem& problem,
                       const DecodeOptions& options) {
  const Instance& inst = problem.instance;
  Rng rng(fnv1a(cache_key(order, config)));

  PackingSolution sol(inst.n);
  if (config.strategy == 1) {
    sol = semi_greedy_construct(problem, rng, order);
  } else {
    if (config.strategy == 2 && config.initial_bins > 0) {
      const int b0 = std::min<int>(config.initial_bins, static_cast<int>(order.size()));
      for (int k = 0; k < b0; ++k) {
        const int item = order[k];
        const int type = item_fits_type(inst, item, problem.stats.largest_type) ? problem.stats.largest_type
                                                                                 : problem.stats.open_type[item];
        sol.open_bin(type, item, inst);
      }
    }
    for (int i : order)
      if (sol.bin_of(i) < 0 && problem.stats.agg_penalty[i] > 0) assign_best(sol, i, problem);
  }
  for (int i : order)
    if (sol.bin_of(i) < 0) assign_best(sol, i, problem);

  finish_decode(sol, config.relocation_prob, problem, options.max_relocation_iterations, rng);
  return sol;
}

RandomKeys encode(const PackingSolution& sol, Scalar relocation_prob) {
  const int n = sol.item_count();
  const int blocks = sol.bin_count();
  Vector keys(n + 3);
  const Scalar width = 1.0 / (blocks + 1);
  for (int b = 0; b < blocks; ++b) {
    const auto& items = sol.bins()[b].items;
    const Scalar step = width / (static_cast<Scalar>(items.size()) + 1);
    for (std::size_t t = 0; t < items.size(); ++t) keys[items[t]] = b * width + (t + 1) * step;
  }
  keys[n] = 5.0 / 6.0;  // strategy 3
  keys[n + 1] = 0.0;    // no pre-opened bins
  keys[n + 2] = std::clamp(relocation_prob, 0.0, RandomKeys::kMaxKey);
  return RandomKeys(std::move(keys));
}

}  // namespace qmc
