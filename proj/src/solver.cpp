#include "qmc/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace qmc {

bool SolutionPool::submit(PoolEntry entry) {
  std::lock_guard lock(mutex_);
  for (const PoolEntry& e : entries_)
    if (e.key == entry.key) return false;
  if (static_cast<int>(entries_.size()) >= capacity_) {
    if (!(entry.fitness.objective < entries_.back().fitness.objective)) return false;
    entries_.pop_back();
  }
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry, [](const PoolEntry& a, const PoolEntry& b) {
    return compare(a.fitness, b.fitness) < 0;
  });
  entries_.insert(pos, std::move(entry));
  return true;
}

void SolutionPool::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

std::vector<PoolEntry> SolutionPool::snapshot() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

int SolutionPool::size() const {
  std::lock_guard lock(mutex_);
  return static_cast<int>(entries_.size());
}

std::uint64_t worker_seed(std::uint64_t base, int worker) {
  // splitmix64 step over the base seed advanced by the worker index
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(worker) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double default_time_limit(int n) {
  if (n <= 50) return 200.0;
  if (n <= 100) return 400.0;
  return 600.0;
}

namespace {

struct WorkerStats {
  int generations = 0;
  std::uint64_t evaluations = 0;
  std::uint64_t decodes = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
};

class Run {
 public:
  Run(const Problem& problem, const RunConfig& config)
      : problem_(problem), config_(config), pool_(config.pool_size), start_(std::chrono::steady_clock::now()) {}

  void worker(int w, WorkerStats& stats) {
    AcoEngine engine(problem_, config_.engine, worker_seed(config_.seed, w));
    auto now = [&] {
      if (config_.clock == ClockMode::evaluations)
        return static_cast<double>(engine.evaluations()) / config_.evals_per_second;
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    };
    auto harvest = [&] {
      stats.hits += engine.cache().hits();
      stats.misses += engine.cache().misses();
    };

    const double limit = config_.time_limit_s;
    const bool restart_enabled = config_.restart_fraction > 0 && config_.restart_fraction < 1;
    bool restarted = false;

    engine.initialize();
    submit(engine, w, now());
    while (now() < limit) {
      if (restart_enabled && !restarted && now() >= config_.restart_fraction * limit) {
        restarted = true;
        if (!restart_done_.exchange(true)) {
          pool_.clear();
          log(fmt::format("restart w={} t={:.3f}\n", w, now()));
        }
        harvest();
        engine.initialize();
        submit(engine, w, now());
        continue;
      }
      const GenerationReport report = engine.run_generation(now() / limit);
      ++stats.generations;
      if (report.improved) submit(engine, w, now());
      log(fmt::format("gen w={} g={} best={} k={} ants={} q={} xi={} hit={:.4f}\n", w, report.generation,
                      report.best.objective, report.params.archive_size, report.params.ants, report.params.q,
                      report.params.xi, report.cache_hit_rate));
    }
    harvest();
    stats.evaluations = engine.evaluations();
    stats.decodes = engine.decodes();
  }

  RunResult finish(const std::vector<WorkerStats>& stats) {
    if (!best_) throw std::logic_error("solve produced no solution");
    RunResult result;
    result.best_keys = best_->rk;
    result.best_fitness = best_->fitness;
    result.best = decode(best_->rk, problem_, config_.engine.decode);
    result.time_to_best_s = time_to_best_;
    result.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    result.trace = trace_;
    result.restarts = restart_done_ ? 1 : 0;
    result.final_pool = pool_.snapshot();
    std::uint64_t hits = 0, misses = 0;
    for (const WorkerStats& s : stats) {
      result.generations += s.generations;
      result.evaluations += s.evaluations;
      result.decodes += s.decodes;
      hits += s.hits;
      misses += s.misses;
    }
    result.cache_hit_rate = hits + misses == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(hits + misses);
    return result;
  }

 private:
  void submit(const AcoEngine& engine, int w, double t) {
    const Evaluated& inc = engine.incumbent();
    PoolEntry entry{inc.rk, inc.fitness, cache_key(sorted_item_order(inc.rk), decode_genes(inc.rk)), w, t};
    std::lock_guard lock(best_mutex_);
    pool_.submit(entry);
    if (!best_ || compare(entry.fitness, best_->fitness) < 0) {
      time_to_best_ = t;
      trace_.push_back({t, entry.fitness.objective});
      best_ = std::move(entry);
    }
  }

  void log(const std::string& line) {
    if (!config_.log) return;
    std::lock_guard lock(log_mutex_);
    *config_.log << line;
  }

  const Problem& problem_;
  const RunConfig& config_;
  SolutionPool pool_;
  std::chrono::steady_clock::time_point start_;
  std::atomic<bool> restart_done_{false};
  std::mutex best_mutex_;
  std::optional<PoolEntry> best_;
  double time_to_best_ = 0;
  std::vector<TracePoint> trace_;
  std::mutex log_mutex_;
};

}  // namespace

RunResult solve(const Problem& problem, const RunConfig& config) {
  if (!(config.time_limit_s > 0)) throw std::invalid_argument("time limit must be positive");
  if (config.workers < 1) throw std::invalid_argument("need at least one worker");
  if (config.pool_size < 1) throw std::invalid_argument("pool size must be positive");
  if (config.clock == ClockMode::evaluations && !(config.evals_per_second > 0))
    throw std::invalid_argument("evaluation clock rate must be positive");

  Run run(problem, config);
  std::vector<WorkerStats> stats(config.workers);
  if (config.workers == 1) {
    run.worker(0, stats[0]);
  } else {
    std::vector<std::exception_ptr> errors(config.workers);
    {
      std::vector<std::jthread> threads;
      for (int w = 0; w < config.workers; ++w)
        threads.emplace_back([&, w] {
          try {
            run.worker(w, stats[w]);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return run.finish(stats);
}

}  // namespace qmc
