#pragma once

#include "qmc/packing.hpp"

namespace qmc {

inline constexpr int kBruteForceMaxItems = 10;

// Exact optimum by enumerating every set partition of the items; each block gets its
// cheapest feasible type. Throws std::invalid_argument above kBruteForceMaxItems items.
PackingSolution brute_force(const Problem& problem);

}  // namespace qmc
