#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmc/refine.hpp"

namespace qmc {

// n item-order keys followed by the strategy, initial-bin and relocation genes, all in [0, 1).
struct RandomKeys {
  Vector keys;

  RandomKeys() = default;
  explicit RandomKeys(Vector k) : keys(std::move(k)) {}

  int items() const { return static_cast<int>(keys.size()) - 3; }
  Scalar strategy_gene() const { return keys[items()]; }
  Scalar bins_gene() const { return keys[items() + 1]; }
  Scalar relocation_gene() const { return keys[items() + 2]; }

  // Largest representable key; samplers clamp into [0, kMaxKey].
  static constexpr Scalar kMaxKey = 1.0 - 1e-9;
};

bool is_valid(const RandomKeys& rk, int n_items);
RandomKeys uniform_keys(int n_items, Rng& rng);

struct DecodeConfig {
  int strategy = 3;        // 1 semi-greedy, 2 pre-opened bins, 3 plain best-bin assignment
  int initial_bins = 0;    // b0
  Scalar relocation_prob = 0;
  friend bool operator==(const DecodeConfig&, const DecodeConfig&) = default;
};

DecodeConfig decode_genes(const RandomKeys& rk);

// Items sorted by ascending key; equal keys keep index order.
std::vector<int> sorted_item_order(const RandomKeys& rk);

// Canonical string of what decoding depends on: configuration plus item order.
std::string cache_key(std::span<const int> order, const DecodeConfig& config);

// Places an unassigned item into the opened bin chosen by the problem's assign rule,
// or opens a bin of the item's default type when nothing fits. Returns the bin index.
int assign_best(PackingSolution& sol, int item, const Problem& problem);

// Bin-seeding phase plus leftover assignment; no post-processing.
// Without `order`, items are scanned by index.
PackingSolution semi_greedy_construct(const Problem& problem, Rng& rng,
                                      std::optional<std::span<const int>> order = std::nullopt);

// Full initial-solution heuristic: construction, post-processing and relocation with p = 1.
PackingSolution semi_greedy(const Problem& problem, Rng& rng, std::optional<std::span<const int>> order = std::nullopt,
                            int max_relocation_iterations = 200);

struct DecodeOptions {
  int max_relocation_iterations = 200;
};

// Decodes a key vector. Randomized steps draw from a generator seeded by the cache key,
// so equal keys always decode to the same packing.
PackingSolution decode(const RandomKeys& rk, const Problem& problem, const DecodeOptions& options = {});
PackingSolution decode(std::span<const int> order, const DecodeConfig& config, const Problem& problem,
                       const DecodeOptions& options = {});

// Keys listing items bin by bin in creation order, with genes for strategy 3, b0 = 0, and p.
RandomKeys encode(const PackingSolution& sol, Scalar relocation_prob);

std::uint64_t fnv1a(std::string_view text);

}  // namespace qmc
