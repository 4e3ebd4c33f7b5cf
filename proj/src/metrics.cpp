#include "qmc/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace qmc {

namespace {

void require_positive(Scalar v, const char* what) {
  if (!(v > 0)) throw std::invalid_argument(fmt::format("{} must be positive, got {}", what, v));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::optional<Scalar> parse_cell(const std::string& cell) {
  const auto first = cell.find_first_not_of(" \t");
  if (first == std::string::npos) return std::nullopt;
  const auto last = cell.find_last_not_of(" \t");
  Scalar v = 0;
  auto [ptr, ec] = std::from_chars(cell.data() + first, cell.data() + last + 1, v);
  if (ec != std::errc() || ptr != cell.data() + last + 1) throw std::invalid_argument("bad number in reference file: " + cell);
  return v;
}

std::string cell(const std::optional<Scalar>& v) { return v ? fmt::format("{:.6f}", *v) : std::string(); }

}  // namespace

Scalar brpd(Scalar best, Scalar bks) {
  require_positive(best, "Best");
  require_positive(bks, "BKS");
  return (best - bks) / best * 100.0;
}

Scalar arpd(std::span<const Scalar> runs, Scalar bks) {
  require_positive(bks, "BKS");
  if (runs.empty()) throw std::invalid_argument("ARPD needs at least one run");
  Scalar total = 0;
  for (Scalar s : runs) {
    require_positive(s, "run objective");
    total += (s - bks) / s;
  }
  return total / static_cast<Scalar>(runs.size()) * 100.0;
}

Scalar gap(Scalar best, Scalar lb) {
  require_positive(best, "Best");
  require_positive(lb, "LB");
  return (best - lb) / best * 100.0;
}

RunMetrics metrics(Scalar best, std::span<const Scalar> runs, std::optional<Scalar> bks, std::optional<Scalar> lb,
                   std::optional<Scalar> bkg) {
  RunMetrics out;
  out.best = best;
  out.runs.assign(runs.begin(), runs.end());
  if (bks) {
    out.brpd = brpd(best, *bks);
    if (!runs.empty()) out.arpd = arpd(runs, *bks);
  }
  if (lb) {
    out.gap = gap(best, *lb);
    if (bkg) out.delta_gap = delta_gap(*out.gap, *bkg);
  }
  return out;
}

std::map<std::string, Reference> load_references(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open reference file " + path);
  std::map<std::string, Reference> refs;
  std::string line;
  if (!std::getline(in, line)) return refs;
  const auto header = split_csv(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int c_inst = column("instance"), c_bks = column("bks"), c_lb = column("lb");
  if (c_inst < 0) throw std::invalid_argument("reference file lacks an 'instance' column");
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    auto at = [&](int c) { return c >= 0 && c < static_cast<int>(cells.size()) ? cells[c] : std::string(); };
    Reference ref;
    ref.bks = parse_cell(at(c_bks));
    ref.lb = parse_cell(at(c_lb));
    refs[instance_stem(at(c_inst))] = ref;
  }
  return refs;
}

std::string instance_stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::vector<BenchRow> bench(const std::vector<std::string>& instance_paths, const BenchOptions& options,
                            const std::map<std::string, Reference>& references) {
  if (options.runs < 1) throw std::invalid_argument("bench needs at least one run per instance");
  std::vector<BenchRow> rows;
  for (const std::string& path : instance_paths) {
    const Problem problem(load_instance(path), options.counting, options.assign_rule);
    const Instance& inst = problem.instance;
    BenchRow row;
    row.instance = instance_stem(path);
    row.n = inst.n;
    row.m = inst.m;
    row.d = inst.d;
    row.shape = inst.shape;
    row.runs = options.runs;

    RunConfig cfg = options.run;
    cfg.time_limit_s = options.time_limit_s.value_or(default_time_limit(inst.n));
    std::vector<Scalar> objectives;
    double best_time = 0;
    for (int r = 0; r < options.runs; ++r) {
      cfg.seed = options.run.seed + static_cast<std::uint64_t>(r);
      const RunResult result = solve(problem, cfg);
      const Scalar obj = result.best_fitness.objective;
      if (objectives.empty() || obj < *std::min_element(objectives.begin(), objectives.end()))
        best_time = result.time_to_best_s;
      objectives.push_back(obj);
    }
    row.best = *std::min_element(objectives.begin(), objectives.end());
    row.time_to_best_s = best_time;

    std::optional<Scalar> bks, lb;
    if (auto it = references.find(row.instance); it != references.end()) {
      bks = it->second.bks;
      lb = it->second.lb;
    }
    const RunMetrics m = metrics(row.best, objectives, bks, lb, std::nullopt);
    row.arpd = m.arpd;
    row.brpd = m.brpd;
    row.lb = lb;
    row.gap = m.gap;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "instance,n,m,d,shape,best,time_to_best_s,runs,arpd,brpd,lb,gap\n";
  for (const BenchRow& r : rows)
    out << fmt::format("{},{},{},{},{},{},{:.3f},{},{},{},{},{}\n", r.instance, r.n, r.m, r.d, r.shape, r.best,
                       r.time_to_best_s, r.runs, cell(r.arpd), cell(r.brpd), r.lb ? fmt::format("{}", *r.lb) : "",
                       cell(r.gap));
  if (rows.empty()) return;

  auto mean = [&](auto get) -> std::optional<Scalar> {
    Scalar total = 0;
    int count = 0;
    for (const BenchRow& r : rows)
      if (auto v = get(r)) {
        total += *v;
        ++count;
      }
    if (count == 0) return std::nullopt;
    return total / count;
  };
  const auto best = mean([](const BenchRow& r) { return std::optional<Scalar>(r.best); });
  const auto time = mean([](const BenchRow& r) { return std::optional<Scalar>(r.time_to_best_s); });
  int runs = 0;
  for (const BenchRow& r : rows) runs += r.runs;
  out << fmt::format("summary,,,,,{:.6f},{:.3f},{},{},{},,{}\n", *best, *time, runs,
                     cell(mean([](const BenchRow& r) { return r.arpd; })),
                     cell(mean([](const BenchRow& r) { return r.brpd; })),
                     cell(mean([](const BenchRow& r) { return r.gap; })));
}

}  // namespace qmc
