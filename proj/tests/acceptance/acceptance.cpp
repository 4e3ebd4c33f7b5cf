// One line per acceptance criterion: PASS, FAIL or SKIP, with the measured numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <CLI11.hpp>
#include <fmt/format.h>

#include "fixtures.hpp"
#include "qmc/aco.hpp"
#include "qmc/metrics.hpp"
#include "qmc/milp.hpp"
#include "qmc/oracle.hpp"
#include "qmc/solver.hpp"

using namespace qmc;
namespace fs = std::filesystem;
using HighPrecision = boost::multiprecision::cpp_bin_float_50;

namespace {

enum class Verdict { pass, fail, skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

struct Paths {
  std::string cli;
  std::string python;
  std::string lp_check;
  fs::path work;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Verdict::pass : Verdict::fail, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_command(const std::string& cmd, std::string* output = nullptr) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return -1;
  char buf[4096];
  std::string out;
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  if (output) *output = out;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 1. objective equals its z-substituted linear form on random feasible packings
Outcome linearization_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024);
  int trials = 0, equal = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    const Problem p(generate_instance(2 + seed % 19, 1 + seed % 5, 1 + seed % 3, fixtures::shape_of(seed), seed),
                    seed % 4 ? PairCounting::ordered : PairCounting::unordered);
    for (int t = 0; t < 12; ++t, ++trials) {
      const PackingSolution sol =
          t % 3 ? fixtures::random_solution(p, rng) : decode(uniform_keys(p.n(), rng), p);
      equal += objective(sol, p) == objective_via_z(sol, p);
    }
  }
  const double dt = seconds_since(t0);
  return verdict(equal == trials && trials >= 1000 && dt < 10,
                 fmt::format("{}/{} exact matches, n <= 20, {:.2f} s", equal, trials, dt));
}

// 2. solve reaches the brute-force optimum on small instances
Outcome oracle_optimality() {
  const auto t0 = std::chrono::steady_clock::now();
  int matched = 0, below = 0;
  const int count = 50;
  for (int k = 0; k < count; ++k) {
    const Instance inst = generate_instance(3 + k % 6, 1 + k % 3, 1 + k % 2, fixtures::shape_of(k), 1000 + k);
    const Problem p(inst);
    const Scalar opt = brute_force(p).objective(p);
    RunConfig cfg;
    cfg.time_limit_s = 5.0;
    cfg.workers = 1;
    cfg.seed = 7 + k;
    const Scalar got = solve(p, cfg).best_fitness.objective;
    matched += got == opt;
    below += got < opt;
  }
  const double dt = seconds_since(t0);
  return verdict(matched * 10 >= count * 9 && below == 0 && dt < 360,
                 fmt::format("{}/{} optimal, {} below the optimum, {:.1f} s", matched, count, below, dt));
}

// 3. refinement never increases the objective
Outcome monotone_refinement() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(77);
  int checked = 0, increased = 0;
  auto check = [&](const PackingSolution& sol, const Problem& p) {
    const Scalar base = objective(sol, p);
    auto run = [&](const std::function<void(PackingSolution&)>& op) {
      PackingSolution copy = sol;
      op(copy);
      check_feasible(copy, p.instance);
      increased += objective(copy, p) > base;
    };
    run([&](PackingSolution& s) { replace_bin_types(s, p); });
    run([&](PackingSolution& s) { merge_bins(s, p); });
    run([&](PackingSolution& s) { relocate_items(s, p, {0.5, 200}, rng); });
    run([&](PackingSolution& s) { post_process(s, p); });
    ++checked;
  };
  int raw = 0;
  for (int seed = 1; seed <= 200; ++seed) {
    const Problem p(generate_instance(5 + seed % 26, 1 + seed % 8, 1 + seed % 3, fixtures::shape_of(seed), seed));
    for (int t = 0; t < 50; ++t) check(decode(uniform_keys(p.n(), rng), p), p);
    // unrefined constructions give the operators real work
    for (int t = 0; t < 10; ++t, ++raw) check(fixtures::random_solution(p, rng), p);
  }
  const double dt = seconds_since(t0);
  return verdict(increased == 0 && dt < 60,
                 fmt::format("{} solutions ({} decoded, {} unrefined) x 4 operators, {} increases, {:.1f} s", checked,
                             checked - raw, raw, increased, dt));
}

// 4. rank weights and sigma against 50-digit arithmetic over the tuning grid
Outcome formula_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const HighPrecision pi = boost::math::constants::pi<HighPrecision>();
  double worst_w = 0, worst_s = 0;
  int values = 0;
  Rng rng(4);
  for (int k : {25, 30, 55, 60}) {
    for (const char* qs : {"0.0001", "0.001", "0.1", "0.3"}) {
      const double q = std::stod(qs);
      const HighPrecision qh(q);  // the double actually passed in
      const Vector w = rank_weights(k, q);
      for (int l = 1; l <= k; ++l) {
        const HighPrecision qk = qh * k;
        const HighPrecision expect = exp(-HighPrecision((l - 1) * (l - 1)) / (2 * qk * qk)) / (qk * sqrt(2 * pi));
        worst_w = std::max(worst_w, static_cast<double>(abs(HighPrecision(w[l - 1]) - expect)));
        ++values;
      }
    }
    Archive archive(k);
    std::vector<Evaluated> batch;
    for (int e = 0; e < k; ++e) batch.push_back({uniform_keys(20, rng), Fitness{Scalar(e), {}}});
    archive.update(batch);
    for (double xi : {0.80, 0.85})
      for (int l = 0; l < k; ++l)
        for (int dim = 0; dim < 23; ++dim) {
          HighPrecision total = 0;
          for (int e = 0; e < k; ++e)
            total += abs(HighPrecision(archive.entries()[e].rk.keys[dim]) - HighPrecision(archive.entries()[l].rk.keys[dim]));
          const HighPrecision expect = HighPrecision(xi) * total / (k - 1);
          worst_s = std::max(worst_s, static_cast<double>(abs(HighPrecision(sigma(archive, l, dim, xi)) - expect)));
          ++values;
        }
  }
  const double dt = seconds_since(t0);
  return verdict(worst_w <= 1e-12 && worst_s <= 1e-12 && dt < 1,
                 fmt::format("{} values, max error weights {:.2e}, sigma {:.2e}, {:.3f} s", values, worst_w, worst_s, dt));
}

// 5. the cache does not change the search trajectory
Outcome cache_transparency() {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p(generate_instance(25, 10, 3, CostShape::mixed, 5));
  RunConfig cfg;
  cfg.time_limit_s = 30.0;
  cfg.seed = 3;
  cfg.clock = ClockMode::evaluations;
  const RunResult on = solve(p, cfg);
  cfg.engine.use_cache = false;
  const RunResult off = solve(p, cfg);
  bool same = on.trace.size() == off.trace.size() && on.best_fitness == off.best_fitness;
  for (std::size_t i = 0; same && i < on.trace.size(); ++i)
    same = on.trace[i].time_s == off.trace[i].time_s && on.trace[i].objective == off.trace[i].objective;
  const double dt = seconds_since(t0);
  return verdict(same && on.cache_hit_rate > 0 && dt < 120,
                 fmt::format("trace of {} improvements {}, best {}, hit rate {:.3f}, decodes {} vs {}, {:.1f} s",
                             on.trace.size(), same ? "identical" : "DIFFERS", on.best_fitness.objective,
                             on.cache_hit_rate, on.decodes, off.decodes, dt));
}

// McCormick envelope of the original model: each product x_a x_b becomes w <= x_a, w <= x_b,
// w >= x_a + x_b - 1 with w continuous in [0, 1].
milp::ModelSpec mccormick(const Instance& inst) {
  milp::ModelSpec model = milp::build_original(inst);
  model.name = "qmcvsbpp_original_mccormick";
  int k = 0;
  for (const milp::QuadTerm& q : model.quadratic) {
    const std::string tag = std::to_string(++k);
    const int w = model.add_var("w_" + tag, milp::VarKind::continuous, 0, 1);
    model.objective.push_back({w, q.coef});
    model.rows.push_back({"wa_" + tag, {{w, 1}, {q.a, -1}}, milp::Sense::le, 0});
    model.rows.push_back({"wb_" + tag, {{w, 1}, {q.b, -1}}, milp::Sense::le, 0});
    model.rows.push_back({"wab_" + tag, {{w, 1}, {q.a, -1}, {q.b, -1}}, milp::Sense::ge, -1});
  }
  model.quadratic.clear();
  return model;
}

Scalar json_number(const std::string& line, const std::string& key) {
  const auto pos = line.find("\"" + key + "\": ");
  if (pos == std::string::npos) return std::nan("");
  return std::stod(line.substr(pos + key.size() + 4));
}

// 6. external MILP solver: optimum equals brute force; linearized relaxation vs original relaxation
Outcome lower_bound_direction(const Paths& paths) {
  const auto t0 = std::chrono::steady_clock::now();
  if (paths.python.empty() || paths.lp_check.empty()) return {Verdict::skip, "extended: no Python interpreter"};
  const fs::path dir = paths.work / "lp";
  fs::create_directories(dir);
  std::vector<Scalar> optimum;
  std::string files;
  for (int k = 0; k < 10; ++k) {
    const Instance inst = generate_instance(3 + k % 3, 1 + k % 3, 1 + k % 2, fixtures::shape_of(k), 500 + k);
    const Problem p(inst);
    optimum.push_back(brute_force(p).objective(p));
    const auto lin = dir / fmt::format("f{}_lin.lp", k), orig = dir / fmt::format("f{}_mc.lp", k);
    std::ofstream(lin) << milp::to_lp(milp::build_linearized(inst));
    std::ofstream(orig) << milp::to_lp(mccormick(inst));
    files += " '" + lin.string() + "' '" + orig.string() + "'";
  }
  std::string out;
  const int rc = run_command("'" + paths.python + "' '" + paths.lp_check + "'" + files + " 2>&1", &out);
  if (rc == 3) return {Verdict::skip, "extended: highspy is not installed"};
  if (rc != 0) return {Verdict::fail, "solver helper failed: " + out};

  std::istringstream lines(out);
  std::vector<std::string> rows;
  for (std::string line; std::getline(lines, line);) rows.push_back(line);
  if (rows.size() != 20) return {Verdict::fail, "unexpected helper output: " + out};
  int opt_ok = 0, bound_ok = 0, clean = 0;
  std::string gaps;
  for (int k = 0; k < 10; ++k) {
    const std::string& lin = rows[2 * k];
    const std::string& mc = rows[2 * k + 1];
    clean += lin.find("kOk") != std::string::npos && mc.find("kOk") != std::string::npos;
    opt_ok += std::abs(json_number(lin, "mip") - optimum[k]) <= 1e-6 * std::max(1.0, optimum[k]);
    const Scalar lb_lin = json_number(lin, "lp"), lb_orig = json_number(mc, "lp");
    bound_ok += lb_lin >= lb_orig - 1e-6 * std::max(1.0, std::abs(lb_orig));
    gaps += fmt::format(" {:.3g}", lb_lin - lb_orig);
  }
  const double dt = seconds_since(t0);
  return verdict(opt_ok == 10 && bound_ok >= 8 && clean == 10,
                 fmt::format("HiGHS optimum = brute force on {}/10, linearized LP bound >= original relaxation on "
                             "{}/10 (differences:{}), clean reads {}/10, {:.1f} s",
                             opt_ok, bound_ok, gaps, clean, dt));
}

// 7. metric identities
Outcome metric_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = std::abs(brpd(105, 100) - 4.761904761904762) <= 1e-9;
  ok = ok && brpd(100, 100) == 0;
  Rng rng(31);
  std::uniform_real_distribution<double> value(50, 500), shrink(0.8, 1.0);
  std::uniform_int_distribution<int> size(1, 30);
  int ordered = 0, equal_runs = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<Scalar> runs(size(rng));
    for (Scalar& r : runs) r = value(rng);
    const Scalar best = *std::min_element(runs.begin(), runs.end());
    const Scalar bks = t % 2 ? best : best * shrink(rng);
    ordered += arpd(runs, bks) >= brpd(best, bks);
    const std::vector<Scalar> same(runs.size(), best);
    equal_runs += std::abs(arpd(same, bks) - brpd(best, bks)) <= 1e-12;
  }
  const double dt = seconds_since(t0);
  return verdict(ok && ordered == 100 && equal_runs == 100 && dt < 1,
                 fmt::format("BRPD(105,100) = {:.10f}, ARPD >= BRPD on {}/100, ARPD = BRPD for equal runs on {}/100",
                             brpd(105, 100), ordered, equal_runs));
}

// 8. two CLI solves with one worker and the same seed write identical files
Outcome reproducibility(const Paths& paths) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = paths.work / "repro";
  fs::create_directories(dir);
  const fs::path inst = dir / "g25.qmc";
  std::ofstream(inst) << serialize_instance(generate_instance(25, 10, 3, CostShape::mixed, 12));
  auto once = [&](const std::string& tag) {
    const std::string cmd = fmt::format(
        "'{}' solve '{}' --time-limit 10 --workers 1 --seed 42 --deterministic --log '{}' --csv '{}' > /dev/null",
        paths.cli, inst.string(), (dir / (tag + ".log")).string(), (dir / (tag + ".csv")).string());
    return run_command(cmd);
  };
  const int a = once("a"), b = once("b");
  const std::string log_a = read_file(dir / "a.log"), log_b = read_file(dir / "b.log");
  const std::string csv_a = read_file(dir / "a.csv"), csv_b = read_file(dir / "b.csv");
  const double dt = seconds_since(t0);
  return verdict(a == 0 && b == 0 && !log_a.empty() && log_a == log_b && csv_a == csv_b && dt < 60,
                 fmt::format("event log {} bytes {}, CSV {} bytes {}, {:.1f} s", log_a.size(),
                             log_a == log_b ? "identical" : "DIFFERS", csv_a.size(),
                             csv_a == csv_b ? "identical" : "DIFFERS", dt));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  Paths paths;
  std::string work = (fs::temp_directory_path() / "qmc_acceptance").string();
  std::vector<int> only;
  app.add_option("--cli", paths.cli, "qmcvsbpp executable")->required();
  app.add_option("--python", paths.python, "Python interpreter for the external solver helper");
  app.add_option("--lp-check", paths.lp_check, "Solver helper script");
  app.add_option("--work", work, "Scratch directory");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);
  paths.work = work;
  fs::remove_all(paths.work);
  fs::create_directories(paths.work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"linearization identity", linearization_identity},
      {"oracle optimality", oracle_optimality},
      {"monotone refinement", monotone_refinement},
      {"formula fidelity", formula_fidelity},
      {"cache transparency", cache_transparency},
      {"lower-bound direction", [&] { return lower_bound_direction(paths); }},
      {"metric identities", metric_identities},
      {"reproducibility", [&] { return reproducibility(paths); }},
      {"paper-benchmark parity",
       [] { return Outcome{Verdict::skip, "extended: needs the published 96-instance set and its BKS table"}; }},
  };

  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome out;
    try {
      out = criteria[c].second();
    } catch (const std::exception& e) {
      out = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = out.verdict == Verdict::pass ? "PASS" : out.verdict == Verdict::fail ? "FAIL" : "SKIP";
    failures += out.verdict == Verdict::fail;
    std::cout << fmt::format("{} criterion {}: {} - {}", tag, id, criteria[c].first, out.detail) << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
