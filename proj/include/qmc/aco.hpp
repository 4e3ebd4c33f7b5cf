#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qmc/adaptive.hpp"
#include "qmc/decode.hpp"

namespace qmc {

// omega_l = exp(-(l-1)^2 / (2 q^2 k^2)) / (q k sqrt(2 pi)), l = 1..k.
Vector rank_weights(int k, Scalar q);
Vector selection_probs(const Eigen::Ref<const Vector>& weights);

struct Evaluated {
  RandomKeys rk;
  Fitness fitness;
};

struct ArchiveEntry {
  RandomKeys rk;
  Fitness fitness;
  std::uint64_t stamp = 0;  // insertion sequence; larger is newer
};

// Elite key vectors, best first.
class Archive {
 public:
  explicit Archive(int capacity = 25) : capacity_(capacity) {}

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  const std::vector<ArchiveEntry>& entries() const { return entries_; }
  const ArchiveEntry& best() const { return entries_.front(); }

  // Merges, sorts by fitness (newer first among equals) and keeps the best `capacity`.
  void update(std::vector<Evaluated> newcomers);
  // Drops worst entries beyond the new capacity; growth is left to the caller.
  void set_capacity(int capacity);
  void clear() { entries_.clear(); }

 private:
  std::vector<ArchiveEntry> entries_;
  int capacity_;
  std::uint64_t next_stamp_ = 0;
};

inline constexpr Scalar kSigmaFloor = 1e-6;
inline constexpr Scalar kDefaultSigma = 0.9999;

// Dispersion of dimension `dim` around entry `l` (0-based rank), scaled by xi. Falls back to
// kDefaultSigma when the archive has one entry or the value is at most `floor`.
Scalar sigma(const Archive& archive, int l, int dim, Scalar xi, Scalar floor = kSigmaFloor);

struct SamplingOptions {
  Scalar sigma_floor = kSigmaFloor;
  Scalar default_sigma = kDefaultSigma;
  int max_redraws = 100;
};

// Draws one key vector around a rank-weighted archive member with truncated Gaussians.
RandomKeys sample_ant(const Archive& archive, const AcoParams& params, Rng& rng, const SamplingOptions& options = {});

// FIFO memo of decoded fitness keyed by the canonical decode key.
class DecodeCache {
 public:
  explicit DecodeCache(std::size_t capacity = 1000) : capacity_(capacity) {}

  std::size_t size() const { return queue_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool contains(const std::string& key) const { return map_.count(key) != 0; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  double hit_rate() const;
  void clear();

  Fitness get_or_insert(const std::string& key, const std::function<Fitness()>& compute);

 private:
  std::size_t capacity_;
  std::deque<std::string> queue_;
  std::unordered_map<std::string, Fitness> map_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

struct NelderMeadOptions {
  int budget = 100;  // evaluations, counting the start point
  Scalar step = 0.05;
  Scalar reflection = 1.0;
  Scalar expansion = 2.0;
  Scalar contraction = 0.5;
  Scalar shrink = 0.5;
  Scalar tolerance = 1e-4;  // simplex diameter (max-norm) for termination
};

using Evaluator = std::function<Fitness(const RandomKeys&)>;

// Bounded Nelder-Mead in key space. Never returns anything worse than `start`.
// `trace`, when given, receives the best fitness after every evaluation.
Evaluated nelder_mead(const Evaluated& start, const Evaluator& evaluate, const NelderMeadOptions& options = {},
                      std::vector<Fitness>* trace = nullptr);

struct EngineConfig {
  bool use_cache = true;
  std::size_t cache_capacity = 1000;
  NelderMeadOptions nelder_mead;
  DecodeOptions decode;
  SamplingOptions sampling;
  QLearningConfig qlearning;
  std::optional<ParamSpace> space;  // defaults to ParamSpace::for_items(n)
};

struct GenerationReport {
  int generation = 0;
  Fitness best;               // archive best after the generation
  bool improved = false;      // engine incumbent improved during this generation
  Scalar reward = 0;
  AcoParams params;           // configuration the generation ran with
  double cache_hit_rate = 0;
  std::uint64_t decodes = 0;  // actual decoder invocations in this generation
};

// One continuous-ACO search thread over random-key space.
class AcoEngine {
 public:
  AcoEngine(const Problem& problem, EngineConfig config, std::uint64_t seed);

  // Fresh archive (one semi-greedy solution, the rest uniform keys), fresh parameters,
  // empty Q-table and cache.
  void initialize();
  GenerationReport run_generation(Scalar progress);

  Fitness evaluate(const RandomKeys& rk);

  const Archive& archive() const { return archive_; }
  const Evaluated& incumbent() const { return *incumbent_; }
  const AcoParams& params() const { return params_; }
  const DecodeCache& cache() const { return cache_; }
  std::uint64_t evaluations() const { return evaluations_; }
  std::uint64_t decodes() const { return decodes_; }
  int generation() const { return generation_; }

 private:
  void fill_archive();
  void consider(const Evaluated& e);

  const Problem& problem_;
  EngineConfig config_;
  Rng rng_;
  Archive archive_;
  DecodeCache cache_;
  ParamTuner tuner_;
  AcoParams params_;
  std::optional<Evaluated> incumbent_;
  std::uint64_t evaluations_ = 0;
  std::uint64_t decodes_ = 0;
  int generation_ = 0;
  bool incumbent_improved_ = false;
};

}  // namespace qmc
