// Command-line front end: solve, bench, gen, export-lp, oracle.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qmc/config.hpp"
#include "qmc/metrics.hpp"
#include "qmc/milp.hpp"
#include "qmc/oracle.hpp"
#include "qmc/solver.hpp"

namespace {

constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SharedOptions {
  std::string pair_counting = "ordered";
  std::string assign_rule = "max_link";
};

qmc::Problem load_problem(const std::string& path, const SharedOptions& shared) {
  return qmc::Problem(qmc::load_instance(path), qmc::parse_pair_counting(shared.pair_counting),
                      qmc::parse_assign_rule(shared.assign_rule));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << content;
}

struct RunOptions {
  double time_limit = 0;  // 0 selects the size-based default
  int workers = 1;
  std::uint64_t seed = 1;
  int pool_size = 10;
  double restart_frac = 0.5;
  bool no_cache = false;
  bool deterministic = false;
  double evals_per_sec = 10000.0;
  std::string config;
};

void add_run_options(CLI::App* cmd, RunOptions& o, SharedOptions& shared) {
  cmd->add_option("--time-limit", o.time_limit, "Seconds per run (default by instance size)");
  cmd->add_option("--workers", o.workers, "Concurrent ACO workers")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Base random seed");
  cmd->add_option("--pool-size", o.pool_size, "Shared elite pool size")->check(CLI::PositiveNumber);
  cmd->add_option("--restart-frac", o.restart_frac, "Restart point as a fraction of the time limit");
  cmd->add_flag("--no-cache", o.no_cache, "Disable the decode cache");
  cmd->add_flag("--deterministic", o.deterministic, "Measure time in evaluations instead of wall-clock seconds");
  cmd->add_option("--evals-per-sec", o.evals_per_sec, "Evaluation rate of the deterministic clock");
  cmd->add_option("--config", o.config, "Tuning parameters file (key = value)");
  cmd->add_option("--assign-rule", shared.assign_rule, "Best-bin rule")->check(CLI::IsMember({"min_link", "max_link"}));
  cmd->add_option("--pair-counting", shared.pair_counting, "Separation pair counting")
      ->check(CLI::IsMember({"ordered", "unordered"}));
}

qmc::RunConfig make_run_config(const RunOptions& o, int n) {
  qmc::RunConfig cfg;
  cfg.time_limit_s = o.time_limit > 0 ? o.time_limit : qmc::default_time_limit(n);
  cfg.workers = o.workers;
  cfg.seed = o.seed;
  cfg.pool_size = o.pool_size;
  cfg.restart_fraction = o.restart_frac;
  cfg.clock = o.deterministic ? qmc::ClockMode::evaluations : qmc::ClockMode::wall;
  cfg.evals_per_second = o.evals_per_sec;
  cfg.engine.use_cache = !o.no_cache;
  if (!o.config.empty()) qmc::apply_config(qmc::read_config(o.config), cfg.engine, n);
  return cfg;
}

std::vector<std::string> instance_files(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".qmc" || ext == ".txt" || ext == ".dat") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no instance files (*.qmc, *.txt, *.dat) in " + dir);
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver suite for quadratic multiple-constraint variable-sized bin packing"};
  app.require_subcommand(1);
  SharedOptions shared;

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Run the RKO-ACO metaheuristic on one instance");
  std::string solve_path, dump_path, log_path, csv_path;
  RunOptions solve_opts;
  solve_cmd->add_option("instance", solve_path, "Instance file")->required();
  add_run_options(solve_cmd, solve_opts, shared);
  solve_cmd->add_option("--dump-solution", dump_path, "Write the best packing here");
  solve_cmd->add_option("--log", log_path, "Write per-generation events here");
  solve_cmd->add_option("--csv", csv_path, "Write a one-row report in the bench CSV layout");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run every instance in a directory several times");
  std::string bench_dir, ref_path, out_path;
  int runs = 1;
  RunOptions bench_opts;
  bench_cmd->add_option("dir", bench_dir, "Directory of instance files")->required();
  bench_cmd->add_option("--runs", runs, "Runs per instance")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--ref", ref_path, "Reference values CSV (instance,bks,lb)");
  bench_cmd->add_option("--out", out_path, "Report CSV path (stdout when omitted)");
  add_run_options(bench_cmd, bench_opts, shared);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic instance");
  int gen_n = 25, gen_m = 10, gen_d = 3;
  std::string gen_shape = "linear", gen_out;
  std::uint64_t gen_seed = 1;
  gen_cmd->add_option("--n", gen_n, "Items")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--m", gen_m, "Bin types")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--d", gen_d, "Dimensions")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--shape", gen_shape, "Cost shape")->check(CLI::IsMember({"linear", "convex", "concave", "mixed"}));
  gen_cmd->add_option("--seed", gen_seed, "Random seed");
  gen_cmd->add_option("--out", gen_out, "Output path (stdout when omitted)");

  // export-lp
  auto* lp_cmd = app.add_subcommand("export-lp", "Write the original or linearized model as an LP file");
  std::string lp_path, lp_model = "linearized", lp_out;
  bool prune_z = false;
  lp_cmd->add_option("instance", lp_path, "Instance file")->required();
  lp_cmd->add_option("--model", lp_model, "Formulation")->check(CLI::IsMember({"original", "linearized"}));
  lp_cmd->add_option("--out", lp_out, "Output path")->required();
  lp_cmd->add_flag("--prune-z", prune_z, "Drop diagonal and zero-cost z variables");
  lp_cmd->add_option("--pair-counting", shared.pair_counting, "Separation pair counting")
      ->check(CLI::IsMember({"ordered", "unordered"}));

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact optimum by enumeration (at most 10 items)");
  std::string oracle_path, oracle_dump;
  oracle_cmd->add_option("instance", oracle_path, "Instance file")->required();
  oracle_cmd->add_option("--dump-solution", oracle_dump, "Write the optimal packing here");
  oracle_cmd->add_option("--pair-counting", shared.pair_counting, "Separation pair counting")
      ->check(CLI::IsMember({"ordered", "unordered"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve_cmd) {
      const qmc::Problem problem = load_problem(solve_path, shared);
      qmc::RunConfig cfg = make_run_config(solve_opts, problem.n());
      std::ofstream log_file;
      if (!log_path.empty()) {
        log_file.open(log_path, std::ios::binary);
        if (!log_file) throw InputError("cannot write " + log_path);
        cfg.log = &log_file;
      }
      const qmc::RunResult result = qmc::solve(problem, cfg);
      fmt::print("objective: {}\nbins: {}\ntime_to_best_s: {:.3f}\ngenerations: {}\ncache_hit_rate: {:.4f}\n",
                 result.best_fitness.objective, result.best.bin_count(), result.time_to_best_s, result.generations,
                 result.cache_hit_rate);
      if (!dump_path.empty()) write_file(dump_path, qmc::dump_solution(result.best, problem));
      if (!csv_path.empty()) {
        qmc::BenchRow row;
        row.instance = qmc::instance_stem(solve_path);
        row.n = problem.instance.n;
        row.m = problem.instance.m;
        row.d = problem.instance.d;
        row.shape = problem.instance.shape;
        row.best = result.best_fitness.objective;
        row.time_to_best_s = result.time_to_best_s;
        row.runs = 1;
        std::ostringstream csv;
        qmc::write_bench_csv({row}, csv);
        write_file(csv_path, csv.str());
      }
    } else if (*bench_cmd) {
      const auto files = instance_files(bench_dir);
      qmc::BenchOptions options;
      options.runs = runs;
      options.counting = qmc::parse_pair_counting(shared.pair_counting);
      options.assign_rule = qmc::parse_assign_rule(shared.assign_rule);
      if (bench_opts.time_limit > 0) options.time_limit_s = bench_opts.time_limit;
      options.run = make_run_config(bench_opts, qmc::load_instance(files.front()).n);
      const auto refs = ref_path.empty() ? std::map<std::string, qmc::Reference>{} : qmc::load_references(ref_path);
      const auto rows = qmc::bench(files, options, refs);
      std::ostringstream csv;
      qmc::write_bench_csv(rows, csv);
      if (out_path.empty())
        std::cout << csv.str();
      else
        write_file(out_path, csv.str());
    } else if (*gen_cmd) {
      const auto inst = qmc::generate_instance(gen_n, gen_m, gen_d, qmc::parse_cost_shape(gen_shape), gen_seed);
      const auto text = qmc::serialize_instance(inst);
      if (gen_out.empty())
        std::cout << text;
      else
        write_file(gen_out, text);
    } else if (*lp_cmd) {
      const auto inst = qmc::load_instance(lp_path);
      const auto counting = qmc::parse_pair_counting(shared.pair_counting);
      const auto model = lp_model == "original" ? qmc::milp::build_original(inst, counting)
                                                : qmc::milp::build_linearized(inst, counting, prune_z);
      write_file(lp_out, qmc::milp::to_lp(model));
      fmt::print("variables: {}\nconstraints: {}\n", model.vars.size(), model.rows.size());
    } else if (*oracle_cmd) {
      const qmc::Problem problem = load_problem(oracle_path, shared);
      const auto best = qmc::brute_force(problem);
      fmt::print("{}", qmc::dump_solution(best, problem));
      if (!oracle_dump.empty()) write_file(oracle_dump, qmc::dump_solution(best, problem));
    }
  } catch (const qmc::ParseError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInputError;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInputError;
  } catch (const InputError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
