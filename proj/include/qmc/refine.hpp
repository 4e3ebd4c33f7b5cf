#pragma once

#include <random>

#include "qmc/packing.hpp"

namespace qmc {

using Rng = std::mt19937_64;

// A simulated relocation of one item, including the type reduction of both bins.
struct MoveDelta {
  int item = -1;
  int from_bin = -1;
  int to_bin = -1;
  int from_type_after = -1;  // -1 when the source bin empties
  int to_type_after = -1;
  Scalar delta_objective = 0;
};

// Requires that `item` fits into `to_bin` and lives elsewhere.
MoveDelta evaluate_move(const PackingSolution& sol, int item, int to_bin, const Problem& problem);
void apply_move(PackingSolution& sol, const MoveDelta& move, const Problem& problem);

// Each routine mutates `sol` in place and reports whether anything changed.
// None of them ever increases the objective.
bool replace_bin_types(PackingSolution& sol, const Problem& problem);
bool merge_bins(PackingSolution& sol, const Problem& problem);
bool post_process(PackingSolution& sol, const Problem& problem);

struct RelocationOptions {
  Scalar probability = 1.0;  // per-bin chance of contributing its items as candidates
  int max_iterations = 200;
};

// First-improvement item relocation, finished by one merge pass.
bool relocate_items(PackingSolution& sol, const Problem& problem, const RelocationOptions& options, Rng& rng);

}  // namespace qmc
