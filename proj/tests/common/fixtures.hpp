#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "qmc/packing.hpp"
#include "qmc/refine.hpp"

namespace fixtures {

// Three items in one dimension, types A (10; 6) and B (14; 12).
inline const char* kT1 =
    "QMCVSBPP 1\n"
    "3 2 1\n"
    "3\n4\n5\n"
    "10 6\n"
    "14 12\n"
    "0 5 0\n"
    "5 0 2\n"
    "0 2 0\n";

inline qmc::Instance t1() { return qmc::parse_instance(kT1); }

// Builds a packing from (type, items) groups, 0-based.
inline qmc::PackingSolution make_solution(const qmc::Instance& inst,
                                          std::initializer_list<std::pair<int, std::vector<int>>> groups) {
  qmc::PackingSolution sol(inst.n);
  for (const auto& [type, items] : groups) {
    const int b = sol.open_bin(type, items.front(), inst);
    for (std::size_t k = 1; k < items.size(); ++k) sol.add_item(b, items[k], inst);
  }
  return sol;
}

// Random feasible packing: items in random order, each dropped into a random bin that
// still has room under its current type, or a new bin of a random type it fits.
inline qmc::PackingSolution random_solution(const qmc::Problem& problem, qmc::Rng& rng) {
  const qmc::Instance& inst = problem.instance;
  std::vector<int> order(inst.n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  qmc::PackingSolution sol(inst.n);
  for (int item : order) {
    std::vector<int> room;
    for (int b = 0; b < sol.bin_count(); ++b)
      if (qmc::fits(sol.bins()[b], item, inst)) room.push_back(b);
    std::bernoulli_distribution open_new(room.empty() ? 1.0 : 0.3);
    if (open_new(rng)) {
      std::vector<int> types;
      for (int t = 0; t < inst.m; ++t)
        if (qmc::item_fits_type(inst, item, t)) types.push_back(t);
      sol.open_bin(types[std::uniform_int_distribution<std::size_t>(0, types.size() - 1)(rng)], item, inst);
    } else {
      sol.add_item(room[std::uniform_int_distribution<std::size_t>(0, room.size() - 1)(rng)], item, inst);
    }
  }
  return sol;
}

inline qmc::CostShape shape_of(int k) {
  static const qmc::CostShape shapes[] = {qmc::CostShape::linear, qmc::CostShape::convex, qmc::CostShape::concave,
                                          qmc::CostShape::mixed};
  return shapes[k % 4];
}

}  // namespace fixtures
