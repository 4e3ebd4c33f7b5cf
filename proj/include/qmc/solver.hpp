#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qmc/aco.hpp"

namespace qmc {

// wall: monotonic wall clock. evaluations: virtual seconds = evaluations / evals_per_second,
// which makes single-worker runs reproducible byte for byte.
enum class ClockMode { wall, evaluations };

struct RunConfig {
  double time_limit_s = 10.0;
  int workers = 1;
  std::uint64_t seed = 1;
  int pool_size = 10;
  double restart_fraction = 0.5;  // restart disabled outside (0, 1)
  ClockMode clock = ClockMode::wall;
  double evals_per_second = 10000.0;
  EngineConfig engine;
  std::ostream* log = nullptr;  // per-generation event lines
};

struct PoolEntry {
  RandomKeys rk;
  Fitness fitness;
  std::string key;
  int worker = 0;
  double time_s = 0;
};

// Best distinct solutions shared by all workers. Thread-safe.
class SolutionPool {
 public:
  explicit SolutionPool(int capacity = 10) : capacity_(capacity) {}

  // Admits on a vacancy or a strict objective improvement over the worst entry;
  // rejects duplicates by key.
  bool submit(PoolEntry entry);
  void clear();
  std::vector<PoolEntry> snapshot() const;
  int size() const;
  int capacity() const { return capacity_; }

 private:
  mutable std::mutex mutex_;
  std::vector<PoolEntry> entries_;
  int capacity_;
};

struct TracePoint {
  double time_s;
  Scalar objective;
};

struct RunResult {
  PackingSolution best;
  Fitness best_fitness;
  RandomKeys best_keys;
  double time_to_best_s = 0;
  double elapsed_s = 0;
  int generations = 0;
  std::uint64_t evaluations = 0;
  std::uint64_t decodes = 0;
  double cache_hit_rate = 0;
  int restarts = 0;
  std::vector<TracePoint> trace;  // all-time best over time
  std::vector<PoolEntry> final_pool;
};

// Multi-worker RKO-ACO run; returns the best solution ever observed.
RunResult solve(const Problem& problem, const RunConfig& config);

std::uint64_t worker_seed(std::uint64_t base, int worker);

// 200 s up to 50 items, 400 s up to 100, 600 s beyond.
double default_time_limit(int n);

}  // namespace qmc
