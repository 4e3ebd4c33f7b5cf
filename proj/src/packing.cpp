#include "qmc/packing.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace qmc {

std::weak_ordering compare(const Fitness& a, const Fitness& b) {
  if (a.objective != b.objective) return a.objective < b.objective ? std::weak_ordering::less : std::weak_ordering::greater;
  const TieBreak &ta = a.tiebreak, &tb = b.tiebreak;
  if (ta.utilization != tb.utilization)
    return ta.utilization < tb.utilization ? std::weak_ordering::less : std::weak_ordering::greater;
  if (ta.cost_ratio != tb.cost_ratio)
    return ta.cost_ratio < tb.cost_ratio ? std::weak_ordering::less : std::weak_ordering::greater;
  if (ta.resolved_links != tb.resolved_links)
    return ta.resolved_links > tb.resolved_links ? std::weak_ordering::less : std::weak_ordering::greater;
  return std::weak_ordering::equivalent;
}

bool PackingSolution::complete() const {
  return std::all_of(bin_of_.begin(), bin_of_.end(), [](int b) { return b >= 0; });
}

int PackingSolution::open_bin(int type, int item, const Instance& inst) {
  if (bin_of_[item] >= 0) throw std::logic_error("open_bin: item already assigned");
  Bin bin;
  bin.type = type;
  bin.items.push_back(item);
  bin.load = inst.weights.row(item).transpose();
  bins_.push_back(std::move(bin));
  bin_of_[item] = bin_count() - 1;
  invalidate();
  return bin_count() - 1;
}

void PackingSolution::add_item(int bin, int item, const Instance& inst) {
  if (bin_of_[item] >= 0) throw std::logic_error("add_item: item already assigned");
  bins_[bin].items.push_back(item);
  bins_[bin].load += inst.weights.row(item).transpose();
  bin_of_[item] = bin;
  invalidate();
}

void PackingSolution::remove_item(int item, const Instance& inst) {
  const int b = bin_of_[item];
  if (b < 0) throw std::logic_error("remove_item: item not assigned");
  Bin& bin = bins_[b];
  bin.items.erase(std::find(bin.items.begin(), bin.items.end(), item));
  bin_of_[item] = -1;
  invalidate();
  if (bin.items.empty()) {
    erase_bin(b);
    return;
  }
  // Recomputed rather than subtracted so the load never drifts on fractional data.
  bin.load.setZero();
  for (int i : bin.items) bin.load += inst.weights.row(i).transpose();
}

void PackingSolution::move_item(int item, int to_bin, const Instance& inst) {
  const int from = bin_of_[item];
  if (from == to_bin) return;
  const bool from_empties = bins_[from].items.size() == 1;
  remove_item(item, inst);
  if (from_empties && to_bin > from) --to_bin;
  add_item(to_bin, item, inst);
}

void PackingSolution::set_type(int bin, int type) {
  if (bins_[bin].type == type) return;
  bins_[bin].type = type;
  invalidate();
}

int PackingSolution::merge_bins(int a, int b, int type, const Instance& inst) {
  Bin merged;
  merged.type = type;
  merged.items = bins_[a].items;
  merged.items.insert(merged.items.end(), bins_[b].items.begin(), bins_[b].items.end());
  merged.load = bins_[a].load + bins_[b].load;
  for (int i : merged.items) bin_of_[i] = -1;
  erase_bin(std::max(a, b));
  erase_bin(std::min(a, b));
  bins_.push_back(std::move(merged));
  const int idx = bin_count() - 1;
  for (int i : bins_[idx].items) bin_of_[i] = idx;
  (void)inst;
  invalidate();
  return idx;
}

void PackingSolution::erase_bin(int bin) {
  bins_.erase(bins_.begin() + bin);
  for (int b = bin; b < bin_count(); ++b)
    for (int i : bins_[b].items) bin_of_[i] = b;
  invalidate();
}

const Fitness& PackingSolution::fitness(const Problem& problem) const {
  if (!cached_) cached_ = Fitness{qmc::objective(*this, problem), qmc::tiebreak(*this, problem)};
  return *cached_;
}

bool fits(const Bin& bin, int item, const Instance& inst) {
  return ((bin.load + inst.weights.row(item).transpose()).array() <= inst.type_caps.row(bin.type).transpose().array())
      .all();
}

bool load_fits_type(const Eigen::Ref<const Vector>& load, int type, const Instance& inst) {
  return (load.array() <= inst.type_caps.row(type).transpose().array()).all();
}

int reduced_type(const Eigen::Ref<const Vector>& load, int current, const Problem& problem) {
  const Instance& inst = problem.instance;
  for (int t : problem.stats.cost_order) {
    if (inst.type_costs[t] >= inst.type_costs[current]) break;
    if (load_fits_type(load, t, inst)) return t;
  }
  return current;
}

void check_feasible(const PackingSolution& sol, const Instance& inst) {
  std::vector<int> seen(inst.n, 0);
  for (int b = 0; b < sol.bin_count(); ++b) {
    const Bin& bin = sol.bins()[b];
    if (bin.items.empty()) throw std::logic_error(fmt::format("bin {} is empty", b));
    Vector load = Vector::Zero(inst.d);
    for (int i : bin.items) {
      if (i < 0 || i >= inst.n) throw std::logic_error("item index out of range");
      ++seen[i];
      load += inst.weights.row(i).transpose();
      if (sol.bin_of(i) != b) throw std::logic_error("bin membership index out of sync");
    }
    if (!load.isApprox(bin.load) && load != bin.load) throw std::logic_error(fmt::format("bin {} load out of sync", b));
    if (!load_fits_type(load, bin.type, inst)) throw std::logic_error(fmt::format("bin {} exceeds capacity", b));
  }
  for (int i = 0; i < inst.n; ++i)
    if (seen[i] != 1)
      throw std::logic_error(fmt::format("item {} assigned to {} bins", i + 1, seen[i]));
}

namespace {

void check_structure(const PackingSolution& sol, int n) {
  if (sol.item_count() != n) throw std::logic_error("solution item count differs from instance");
  std::vector<int> seen(n, 0);
  for (const Bin& bin : sol.bins())
    for (int i : bin.items) ++seen[i];
  for (int i = 0; i < n; ++i)
    if (seen[i] != 1) throw std::logic_error(fmt::format("item {} assigned to {} bins", i + 1, seen[i]));
}

}  // namespace

Scalar objective(const PackingSolution& sol, const Problem& problem) {
  const Instance& inst = problem.instance;
  check_structure(sol, inst.n);
  Scalar bin_term = 0;
  for (const Bin& bin : sol.bins()) bin_term += inst.type_costs[bin.type];
  Scalar ordered = 0;
  for (int i = 0; i < inst.n; ++i)
    for (int s = 0; s < inst.n; ++s)
      if (sol.bin_of(i) != sol.bin_of(s)) ordered += inst.pair_costs(i, s);
  return bin_term + (problem.counting == PairCounting::ordered ? ordered : ordered / 2);
}

Scalar objective_via_z(const PackingSolution& sol, const Problem& problem) {
  const Instance& inst = problem.instance;
  const int n = inst.n;
  check_structure(sol, n);
  if (sol.bin_count() > n) throw std::logic_error("more bins than the index set allows");

  // Bin slots j = 0..n-1; opened bins occupy the first slots.
  RowMatrix x = RowMatrix::Zero(n, n);
  RowMatrix y = RowMatrix::Zero(n, inst.m);
  for (int j = 0; j < sol.bin_count(); ++j) {
    y(j, sol.bins()[j].type) = 1;
    for (int i : sol.bins()[j].items) x(i, j) = 1;
  }
  const Scalar weight = problem.counting == PairCounting::ordered ? 1.0 : 0.5;
  Scalar total = (y * inst.type_costs).sum();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int s = 0; s < n; ++s) {
        const Scalar z = x(i, j) * (1 - x(s, j));
        if (z > x(i, j) || z > 1 - x(s, j) || z < x(i, j) - x(s, j))
          throw std::logic_error("linearization rows violated");
        total += weight * inst.pair_costs(i, s) * z;
      }
  return total;
}

TieBreak tiebreak(const PackingSolution& sol, const Problem& problem) {
  const Instance& inst = problem.instance;
  TieBreak tb;
  if (sol.bin_count() == 0) return tb;
  Scalar cost = 0, capacity = 0;
  for (const Bin& bin : sol.bins()) {
    tb.utilization += (bin.load.array() / inst.type_caps.row(bin.type).transpose().array()).maxCoeff();
    cost += inst.type_costs[bin.type];
    capacity += problem.type_capacity_sum[bin.type];
    for (std::size_t a = 0; a < bin.items.size(); ++a)
      for (std::size_t b = a + 1; b < bin.items.size(); ++b)
        tb.resolved_links += problem.stats.links(bin.items[a], bin.items[b]);
  }
  tb.utilization /= sol.bin_count();
  tb.cost_ratio = cost / capacity;
  return tb;
}

std::weak_ordering compare(const PackingSolution& a, const PackingSolution& b, const Problem& problem) {
  return compare(a.fitness(problem), b.fitness(problem));
}

std::string dump_solution(const PackingSolution& sol, const Problem& problem) {
  std::string out;
  for (const Bin& bin : sol.bins()) {
    out += fmt::format("{}:", bin.type + 1);
    std::vector<int> items = bin.items;
    std::sort(items.begin(), items.end());
    for (int i : items) out += fmt::format(" {}", i + 1);
    out += '\n';
  }
  out += fmt::format("objective: {}\n", sol.objective(problem));
  return out;
}

}  // namespace qmc
