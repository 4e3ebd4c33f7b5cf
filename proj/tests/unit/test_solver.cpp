#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <thread>
#include <sstream>

#include "fixtures.hpp"
#include "qmc/config.hpp"
#include "qmc/metrics.hpp"
#include "qmc/oracle.hpp"
#include "qmc/solver.hpp"

using namespace qmc;

namespace {

// Every map item -> label in 0..n-1, each label group costed at its cheapest holding type.
Scalar naive_optimum(const Instance& inst, Scalar factor) {
  const int n = inst.n;
  std::vector<int> label(n, 0);
  Scalar best = std::numeric_limits<Scalar>::infinity();
  while (true) {
    Scalar cost = 0;
    bool ok = true;
    for (int b = 0; b < n && ok; ++b) {
      Vector load = Vector::Zero(inst.d);
      bool used = false;
      for (int i = 0; i < n; ++i)
        if (label[i] == b) {
          load += inst.weights.row(i).transpose();
          used = true;
        }
      if (!used) continue;
      Scalar cheapest = std::numeric_limits<Scalar>::infinity();
      for (int t = 0; t < inst.m; ++t)
        if ((load.array() <= inst.type_caps.row(t).transpose().array()).all())
          cheapest = std::min(cheapest, inst.type_costs[t]);
      ok = cheapest < std::numeric_limits<Scalar>::infinity();
      cost += cheapest;
    }
    if (ok) {
      for (int i = 0; i < n; ++i)
        for (int s = i + 1; s < n; ++s)
          if (label[i] != label[s]) cost += factor * inst.pair_costs(i, s);
      best = std::min(best, cost);
    }
    int k = 0;
    while (k < n && ++label[k] == n) label[k++] = 0;
    if (k == n) break;
  }
  return best;
}

RunConfig quick(double seconds, std::uint64_t seed = 1) {
  RunConfig cfg;
  cfg.time_limit_s = seconds;
  cfg.seed = seed;
  cfg.clock = ClockMode::evaluations;
  return cfg;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qmc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("brute force on T1") {
  const Problem p(fixtures::t1());
  const auto best = brute_force(p);
  CHECK(best.objective(p) == 14);
  CHECK(best.bin_count() == 1);
  CHECK(best.bins()[0].type == 1);
}

TEST_CASE("brute force agrees with naive enumeration") {
  for (int seed = 1; seed <= 40; ++seed) {
    const auto counting = seed % 3 ? PairCounting::ordered : PairCounting::unordered;
    const Problem p(generate_instance(2 + seed % 5, 1 + seed % 3, 1 + seed % 2, fixtures::shape_of(seed), seed),
                    counting);
    const auto best = brute_force(p);
    check_feasible(best, p.instance);
    CHECK(best.objective(p) == naive_optimum(p.instance, p.pair_factor()));
  }
}

TEST_CASE("brute force without pair costs is plain bin packing") {
  // four items of weight 3; type A (cost 10, cap 6) is the cheap dominant choice
  Instance inst = parse_instance(
      "QMCVSBPP 1\n4 2 1\n3\n3\n3\n3\n10 6\n30 12\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n");
  const Problem p(inst);
  CHECK(brute_force(p).objective(p) == 20);
}

TEST_CASE("brute force refuses large instances") {
  const Problem p(generate_instance(11, 2, 1, CostShape::linear, 1));
  CHECK_THROWS_AS(brute_force(p), std::invalid_argument);
}

TEST_CASE("solution pool") {
  SolutionPool pool(3);
  auto e = [](Scalar obj, const std::string& key) { return PoolEntry{RandomKeys{}, Fitness{obj, {}}, key, 0, 0}; };
  CHECK(pool.submit(e(30, "a")));
  CHECK(pool.submit(e(20, "b")));
  CHECK_FALSE(pool.submit(e(10, "b")));  // duplicate key
  CHECK(pool.submit(e(25, "c")));
  CHECK_FALSE(pool.submit(e(30, "d")));  // tie with the worst
  CHECK(pool.submit(e(5, "e")));
  const auto snap = pool.snapshot();
  REQUIRE(snap.size() == 3);
  CHECK(snap[0].fitness.objective == 5);
  CHECK(snap[1].fitness.objective == 20);
  CHECK(snap[2].fitness.objective == 25);
  pool.clear();
  CHECK(pool.size() == 0);
}

TEST_CASE("concurrent pool submissions keep the invariants") {
  SolutionPool pool(10);
  {
    std::vector<std::jthread> threads;
    for (int w = 0; w < 8; ++w)
      threads.emplace_back([&pool, w] {
        for (int i = 0; i < 500; ++i)
          pool.submit(PoolEntry{RandomKeys{}, Fitness{Scalar((i * 7 + w) % 97 + 1), {}}, std::to_string(i % 50), w, 0});
      });
  }
  const auto snap = pool.snapshot();
  CHECK(snap.size() == 10);
  std::set<std::string> keys;
  for (std::size_t i = 0; i < snap.size(); ++i) {
    keys.insert(snap[i].key);
    if (i) CHECK(snap[i - 1].fitness.objective <= snap[i].fitness.objective);
  }
  CHECK(keys.size() == snap.size());
}

TEST_CASE("worker seeds differ") {
  std::set<std::uint64_t> seeds;
  for (int w = 0; w < 16; ++w) seeds.insert(worker_seed(1, w));
  CHECK(seeds.size() == 16);
  CHECK(worker_seed(1, 0) == worker_seed(1, 0));
  CHECK(worker_seed(1, 0) != worker_seed(2, 0));
  CHECK(default_time_limit(25) == 200);
  CHECK(default_time_limit(100) == 400);
  CHECK(default_time_limit(200) == 600);
}

TEST_CASE("solve finds the T1 optimum") {
  const Problem p(fixtures::t1());
  const RunResult r = solve(p, quick(1.0));
  CHECK(r.best_fitness.objective == 14);
  CHECK(r.best.objective(p) == 14);
  check_feasible(r.best, p.instance);

  RunConfig wall;
  wall.time_limit_s = 1.0;
  CHECK(solve(p, wall).best_fitness.objective == 14);
}

TEST_CASE("single-worker runs are reproducible and restart once") {
  const Problem p(generate_instance(25, 10, 3, CostShape::mixed, 5));
  std::ostringstream a, b;
  RunConfig cfg = quick(2.0, 9);
  cfg.log = &a;
  const RunResult ra = solve(p, cfg);
  cfg.log = &b;
  const RunResult rb = solve(p, cfg);
  CHECK(a.str() == b.str());
  CHECK(ra.best_fitness == rb.best_fitness);
  CHECK(ra.time_to_best_s == rb.time_to_best_s);

  const std::string log = a.str();
  const auto first = log.find("restart ");
  REQUIRE(first != std::string::npos);
  CHECK(log.find("restart ", first + 1) == std::string::npos);
  const double t = std::stod(log.substr(log.find("t=", first) + 2));
  CHECK(t >= 1.0);
  CHECK(t < 1.1);
  CHECK(ra.restarts == 1);

  for (std::size_t i = 1; i < ra.trace.size(); ++i) {
    CHECK(ra.trace[i].objective < ra.trace[i - 1].objective);
    CHECK(ra.trace[i].time_s >= ra.trace[i - 1].time_s);
  }
  CHECK(ra.trace.back().objective == ra.best_fitness.objective);
  CHECK(ra.final_pool.size() <= 10);
}

TEST_CASE("multi-worker runs keep the shared invariants") {
  const Problem p(generate_instance(20, 5, 2, CostShape::convex, 8));
  RunConfig cfg;
  cfg.time_limit_s = 1.0;
  cfg.workers = 4;
  cfg.pool_size = 5;
  const RunResult r = solve(p, cfg);
  check_feasible(r.best, p.instance);
  CHECK(r.best.objective(p) == r.best_fitness.objective);
  CHECK(r.final_pool.size() <= 5);
  std::set<std::string> keys;
  for (const auto& e : r.final_pool) keys.insert(e.key);
  CHECK(keys.size() == r.final_pool.size());
  for (const auto& e : r.final_pool) CHECK(e.fitness.objective >= r.best_fitness.objective);
}

TEST_CASE("metric formulas") {
  CHECK(std::abs(brpd(105, 100) - 4.761904761904762) < 1e-9);
  CHECK(brpd(100, 100) == 0);
  const std::vector<Scalar> same{105, 105, 105};
  CHECK(arpd(same, 100) == doctest::Approx(brpd(105, 100)).epsilon(1e-15));
  CHECK(gap(105, 100) == doctest::Approx(4.761904761904762));
  CHECK(delta_gap(4.0, 1.5) == 2.5);
  CHECK_THROWS_AS(brpd(0, 100), std::invalid_argument);
  CHECK_THROWS_AS(brpd(100, -1), std::invalid_argument);
  CHECK_THROWS_AS(gap(100, 0), std::invalid_argument);
  CHECK_THROWS_AS(arpd(std::vector<Scalar>{}, 100), std::invalid_argument);

  const RunMetrics m = metrics(105, same, 100, 90, 2.0);
  REQUIRE(m.brpd);
  REQUIRE(m.delta_gap);
  CHECK(*m.delta_gap == doctest::Approx(*m.gap - 2.0));
  const RunMetrics none = metrics(105, same, std::nullopt, std::nullopt, std::nullopt);
  CHECK_FALSE(none.brpd);
  CHECK_FALSE(none.gap);
}

TEST_CASE("bench report") {
  const auto dir = scratch("bench");
  std::ofstream refs(dir / "refs.csv");
  refs << "instance,bks,lb\n";
  std::vector<std::string> paths;
  for (int k = 0; k < 3; ++k) {
    const Instance inst = generate_instance(5 + k, 2, 1, fixtures::shape_of(k), 30 + k);
    const auto path = dir / ("g" + std::to_string(k) + ".qmc");
    std::ofstream(path) << serialize_instance(inst);
    paths.push_back(path.string());
    const Problem p(inst);
    const Scalar opt = brute_force(p).objective(p);
    refs << "g" << k << "," << opt << "," << opt << "\n";
  }
  refs.close();

  BenchOptions opts;
  opts.runs = 2;
  opts.time_limit_s = 0.5;
  opts.run.clock = ClockMode::evaluations;
  const auto references = load_references((dir / "refs.csv").string());
  const auto rows = bench(paths, opts, references);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    REQUIRE(r.brpd);
    CHECK(*r.brpd == 0);
    CHECK(*r.gap == 0);
    CHECK(*r.arpd >= *r.brpd);
    CHECK(r.runs == 2);
  }
  std::ostringstream a, b;
  write_bench_csv(rows, a);
  write_bench_csv(bench(paths, opts, references), b);
  CHECK(a.str() == b.str());

  std::istringstream lines(a.str());
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  REQUIRE(all.size() == 5);
  CHECK(all[0] == "instance,n,m,d,shape,best,time_to_best_s,runs,arpd,brpd,lb,gap");
  CHECK(all[4].rfind("summary,", 0) == 0);

  // without references the dependent columns stay empty
  std::ostringstream bare;
  write_bench_csv(bench({paths[0]}, opts, {}), bare);
  CHECK(bare.str().find(",2,,,,\n") != std::string::npos);
}

TEST_CASE("configuration file") {
  const auto values = parse_config("# tuning\nql.alpha = 0.2\naco.q = 0.1, 0.3\nnm.budget=50\n");
  EngineConfig engine;
  apply_config(values, engine, 25);
  CHECK(engine.qlearning.alpha == 0.2);
  CHECK(engine.nelder_mead.budget == 50);
  REQUIRE(engine.space);
  CHECK(engine.space->q == std::vector<Scalar>{0.1, 0.3});
  CHECK(engine.space->archive_sizes == std::vector<int>{25, 30});
  CHECK_THROWS_AS(apply_config(parse_config("ql.beta = 1\n"), engine, 25), std::invalid_argument);
  CHECK_THROWS_AS(apply_config(parse_config("ql.alpha = fast\n"), engine, 25), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("no equals sign\n"), std::invalid_argument);
}
