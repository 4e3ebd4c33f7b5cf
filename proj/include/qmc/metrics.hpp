#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qmc/solver.hpp"

namespace qmc {

// Percent deviations. All denominators must be positive (std::invalid_argument otherwise).
Scalar brpd(Scalar best, Scalar bks);
Scalar arpd(std::span<const Scalar> runs, Scalar bks);
Scalar gap(Scalar best, Scalar lb);
inline Scalar delta_gap(Scalar gap_value, Scalar bkg) { return gap_value - bkg; }

struct RunMetrics {
  Scalar best = 0;
  double time_to_best_s = 0;
  std::vector<Scalar> runs;
  std::optional<Scalar> brpd;
  std::optional<Scalar> arpd;
  std::optional<Scalar> gap;
  std::optional<Scalar> delta_gap;
};

// Fills whatever the available references allow.
RunMetrics metrics(Scalar best, std::span<const Scalar> runs, std::optional<Scalar> bks, std::optional<Scalar> lb,
                   std::optional<Scalar> bkg);

struct Reference {
  std::optional<Scalar> bks;
  std::optional<Scalar> lb;
};

// CSV with header "instance,bks,lb"; empty cells are allowed. Keys are instance file stems.
std::map<std::string, Reference> load_references(const std::string& path);

struct BenchRow {
  std::string instance;
  int n = 0, m = 0, d = 0;
  std::string shape;
  Scalar best = 0;
  double time_to_best_s = 0;
  int runs = 0;
  std::optional<Scalar> arpd, brpd, lb, gap;
};

struct BenchOptions {
  int runs = 1;
  RunConfig run;                          // seed of run r is run.seed + r
  std::optional<double> time_limit_s;     // otherwise default_time_limit(n)
  PairCounting counting = PairCounting::ordered;
  AssignRule assign_rule = AssignRule::max_link;
};

// Instance files are processed in the given order.
std::vector<BenchRow> bench(const std::vector<std::string>& instance_paths, const BenchOptions& options,
                            const std::map<std::string, Reference>& references);

// Header, one row per instance, then a "summary" row of column means.
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

std::string instance_stem(const std::string& path);

}  // namespace qmc
