#include "qmc/refine.hpp"

#include <algorithm>
#include <stdexcept>

namespace qmc {

namespace {

Scalar cost_of(int type, const Instance& inst) { return inst.type_costs[type]; }

// Pair cost between `item` and the members of `bin`, skipping the item itself.
Scalar pair_sum(int item, const Bin& bin, const Instance& inst) {
  Scalar total = 0;
  for (int s : bin.items)
    if (s != item) total += inst.pair_costs(item, s);
  return total;
}

}  // namespace

MoveDelta evaluate_move(const PackingSolution& sol, int item, int to_bin, const Problem& problem) {
  const Instance& inst = problem.instance;
  MoveDelta move;
  move.item = item;
  move.from_bin = sol.bin_of(item);
  move.to_bin = to_bin;
  if (move.from_bin == to_bin) throw std::logic_error("evaluate_move: item already in destination bin");
  const Bin& from = sol.bins()[move.from_bin];
  const Bin& to = sol.bins()[to_bin];
  if (!fits(to, item, inst)) throw std::logic_error("evaluate_move: item does not fit destination bin");

  Scalar delta = 0;
  if (from.items.size() == 1) {
    delta -= cost_of(from.type, inst);
  } else {
    const Vector remaining = from.load - inst.weights.row(item).transpose();
    move.from_type_after = reduced_type(remaining, from.type, problem);
    delta += cost_of(move.from_type_after, inst) - cost_of(from.type, inst);
  }
  const Vector grown = to.load + inst.weights.row(item).transpose();
  move.to_type_after = reduced_type(grown, to.type, problem);
  delta += cost_of(move.to_type_after, inst) - cost_of(to.type, inst);

  delta += problem.pair_factor() * (pair_sum(item, from, inst) - pair_sum(item, to, inst));
  move.delta_objective = delta;
  return move;
}

void apply_move(PackingSolution& sol, const MoveDelta& move, const Problem& problem) {
  sol.set_type(move.to_bin, move.to_type_after);
  if (move.from_type_after >= 0) sol.set_type(move.from_bin, move.from_type_after);
  sol.move_item(move.item, move.to_bin, problem.instance);
}

bool replace_bin_types(PackingSolution& sol, const Problem& problem) {
  bool changed = false;
  for (int b = 0; b < sol.bin_count(); ++b) {
    const Bin& bin = sol.bins()[b];
    const int t = reduced_type(bin.load, bin.type, problem);
    if (t != bin.type) {
      sol.set_type(b, t);
      changed = true;
    }
  }
  return changed;
}

bool merge_bins(PackingSolution& sol, const Problem& problem) {
  const Instance& inst = problem.instance;
  const int count = sol.bin_count();
  std::vector<char> merged(count, 0);
  struct Merge {
    int a, b, type;
  };
  std::vector<Merge> merges;
  for (int a = 0; a < count; ++a) {
    if (merged[a]) continue;
    for (int b = a + 1; b < count && !merged[a]; ++b) {
      if (merged[b]) continue;
      const Bin &ba = sol.bins()[a], &bb = sol.bins()[b];
      const Scalar budget = cost_of(ba.type, inst) + cost_of(bb.type, inst);
      const Vector load = ba.load + bb.load;
      for (int t : problem.stats.cost_order) {
        if (cost_of(t, inst) > budget) break;
        if (load_fits_type(load, t, inst)) {
          merges.push_back({a, b, t});
          merged[a] = merged[b] = 1;
          break;
        }
      }
    }
  }
  if (merges.empty()) return false;

  // Untouched bins keep their order; merged bins follow in merge order.
  PackingSolution next(sol.item_count());
  auto copy_bin = [&](int type, const std::vector<int>& items) {
    const int idx = next.open_bin(type, items.front(), inst);
    for (std::size_t k = 1; k < items.size(); ++k) next.add_item(idx, items[k], inst);
  };
  for (int b = 0; b < count; ++b)
    if (!merged[b]) copy_bin(sol.bins()[b].type, sol.bins()[b].items);
  for (const Merge& mg : merges) {
    std::vector<int> items = sol.bins()[mg.a].items;
    const auto& tail = sol.bins()[mg.b].items;
    items.insert(items.end(), tail.begin(), tail.end());
    copy_bin(mg.type, items);
  }
  sol = std::move(next);
  return true;
}

bool post_process(PackingSolution& sol, const Problem& problem) {
  bool changed = false;
  // Every productive pass removes a bin or lowers a bin cost, so n + 1 passes bound the loop
  // in practice; the cap only guards against pathological cost data.
  for (int pass = 0; pass <= problem.n() + 1; ++pass) {
    const bool replaced = replace_bin_types(sol, problem);
    const bool merged = merge_bins(sol, problem);
    if (!replaced && !merged) break;
    changed = true;
  }
  return changed;
}

bool relocate_items(PackingSolution& sol, const Problem& problem, const RelocationOptions& options, Rng& rng) {
  const Instance& inst = problem.instance;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Candidate {
    int item;
    int bin;
  };
  bool any = false;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<Candidate> candidates;
    for (int b = 0; b < sol.bin_count(); ++b) {
      if (unit(rng) < options.probability)
        for (int i : sol.bins()[b].items) candidates.push_back({i, b});
    }
    // Heavily linked items first, then items sitting in expensive bins, then in sparse bins.
    std::stable_sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
      const Scalar wx = problem.stats.agg_weight[x.item], wy = problem.stats.agg_weight[y.item];
      if (wx != wy) return wx > wy;
      const Scalar cx = cost_of(sol.bins()[x.bin].type, inst), cy = cost_of(sol.bins()[y.bin].type, inst);
      if (cx != cy) return cx > cy;
      return sol.bins()[x.bin].items.size() < sol.bins()[y.bin].items.size();
    });

    bool improved = false;
    for (const Candidate& c : candidates) {
      for (int dest = 0; dest < sol.bin_count() && !improved; ++dest) {
        if (dest == c.bin || !fits(sol.bins()[dest], c.item, inst)) continue;
        const MoveDelta move = evaluate_move(sol, c.item, dest, problem);
        if (move.delta_objective < 0) {
          apply_move(sol, move, problem);
          improved = true;
        }
      }
      if (improved) break;
    }
    if (!improved) break;
    any = true;
  }
  return merge_bins(sol, problem) || any;
}

}  // namespace qmc
