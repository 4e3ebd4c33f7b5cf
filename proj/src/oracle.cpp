#include "qmc/oracle.hpp"

#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace qmc {

namespace {

struct Enumerator {
  int n;
  std::vector<Scalar> block_cost;  // per subset mask, +inf when no type fits
  std::vector<int> block_type;
  std::vector<Scalar> inner_pairs;  // unordered pair cost inside the subset
  Scalar total_pairs = 0;
  Scalar factor = 2;

  std::vector<unsigned> blocks;
  std::vector<unsigned> best_blocks;
  Scalar best = std::numeric_limits<Scalar>::infinity();

  void run(int item, Scalar cost, Scalar kept) {
    if (item == n) {
      const Scalar objective = cost + factor * (total_pairs - kept);
      if (objective < best) {
        best = objective;
        best_blocks = blocks;
      }
      return;
    }
    const unsigned bit = 1u << item;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const unsigned old_mask = blocks[b];
      const unsigned mask = old_mask | bit;
      if (block_type[mask] < 0) continue;
      blocks[b] = mask;
      run(item + 1, cost - block_cost[old_mask] + block_cost[mask], kept - inner_pairs[old_mask] + inner_pairs[mask]);
      blocks[b] = old_mask;
    }
    if (block_type[bit] >= 0) {
      blocks.push_back(bit);
      run(item + 1, cost + block_cost[bit], kept);
      blocks.pop_back();
    }
  }
};

}  // namespace

PackingSolution brute_force(const Problem& problem) {
  const Instance& inst = problem.instance;
  const int n = inst.n;
  if (n > kBruteForceMaxItems)
    throw std::invalid_argument(fmt::format("brute force refuses n = {} (limit {})", n, kBruteForceMaxItems));

  const unsigned subsets = 1u << n;
  Enumerator en;
  en.n = n;
  en.factor = problem.pair_factor();
  en.block_cost.assign(subsets, std::numeric_limits<Scalar>::infinity());
  en.block_type.assign(subsets, -1);
  en.inner_pairs.assign(subsets, 0);
  for (int i = 0; i < n; ++i)
    for (int s = i + 1; s < n; ++s) en.total_pairs += inst.pair_costs(i, s);

  for (unsigned mask = 1; mask < subsets; ++mask) {
    Vector load = Vector::Zero(inst.d);
    Scalar inner = 0;
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      load += inst.weights.row(i).transpose();
      for (int s = i + 1; s < n; ++s)
        if (mask >> s & 1u) inner += inst.pair_costs(i, s);
    }
    en.inner_pairs[mask] = inner;
    for (int t : problem.stats.cost_order)
      if (load_fits_type(load, t, inst)) {
        en.block_type[mask] = t;
        en.block_cost[mask] = inst.type_costs[t];
        break;
      }
  }
  en.block_cost[0] = 0;
  en.run(0, 0, 0);
  if (en.best_blocks.empty()) throw std::logic_error("brute force found no feasible partition");

  PackingSolution sol(n);
  for (unsigned mask : en.best_blocks) {
    int bin = -1;
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      if (bin < 0)
        bin = sol.open_bin(en.block_type[mask], i, inst);
      else
        sol.add_item(bin, i, inst);
    }
  }
  return sol;
}

}  // namespace qmc
