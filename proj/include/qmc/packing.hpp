#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "qmc/instance.hpp"

namespace qmc {

struct Bin {
  int type = 0;
  std::vector<int> items;  // insertion order
  Vector load;             // summed weights per dimension
};

// Secondary ordering keys for equal-objective solutions.
struct TieBreak {
  Scalar utilization = 0;     // mean over bins of max_r load_r / Q_r; lower is better
  Scalar cost_ratio = 0;      // bin costs over total opened capacity; lower is better
  Scalar resolved_links = 0;  // link cost of co-located pairs; higher is better
  friend bool operator==(const TieBreak&, const TieBreak&) = default;
};

struct Fitness {
  Scalar objective = 0;
  TieBreak tiebreak;
  friend bool operator==(const Fitness&, const Fitness&) = default;
};

// less means `a` is the better solution.
std::weak_ordering compare(const Fitness& a, const Fitness& b);

// A (possibly partial) assignment of items to typed bins. Bins keep creation order;
// an emptied bin is erased immediately. The fitness is cached and dropped on mutation.
class PackingSolution {
 public:
  PackingSolution() = default;
  explicit PackingSolution(int n_items) : bin_of_(n_items, -1) {}

  const std::vector<Bin>& bins() const { return bins_; }
  int bin_count() const { return static_cast<int>(bins_.size()); }
  int item_count() const { return static_cast<int>(bin_of_.size()); }
  int bin_of(int item) const { return bin_of_[item]; }
  bool complete() const;

  // Opens a bin of `type` holding `item`; returns its index.
  int open_bin(int type, int item, const Instance& inst);
  void add_item(int bin, int item, const Instance& inst);
  // Detaches `item`; its bin is erased if it becomes empty.
  void remove_item(int item, const Instance& inst);
  void move_item(int item, int to_bin, const Instance& inst);
  void set_type(int bin, int type);
  // Replaces bins a and b by one new bin of `type` appended at the end; returns its index.
  int merge_bins(int a, int b, int type, const Instance& inst);

  const Fitness& fitness(const Problem& problem) const;
  Scalar objective(const Problem& problem) const { return fitness(problem).objective; }

 private:
  void erase_bin(int bin);
  void invalidate() { cached_.reset(); }

  std::vector<Bin> bins_;
  std::vector<int> bin_of_;
  mutable std::optional<Fitness> cached_;
};

// True iff item fits into `bin` on every dimension (capacity inclusive).
bool fits(const Bin& bin, int item, const Instance& inst);
bool load_fits_type(const Eigen::Ref<const Vector>& load, int type, const Instance& inst);

// Cheapest type strictly cheaper than `current` that holds `load`, or `current`.
int reduced_type(const Eigen::Ref<const Vector>& load, int current, const Problem& problem);

// Throws std::logic_error unless every item sits in exactly one bin and every bin
// respects its type's capacity and carries a consistent load.
void check_feasible(const PackingSolution& sol, const Instance& inst);

// Bin costs plus the literal sum over ordered pairs (i, s) of c_is x_ij (1 - x_sj).
// Halved pair term under unordered counting. Throws std::logic_error on structural errors.
Scalar objective(const PackingSolution& sol, const Problem& problem);

// Same value through the linearized model: builds x, y and the unique z satisfying the
// linearization rows, checks those rows, and sums the linear objective.
Scalar objective_via_z(const PackingSolution& sol, const Problem& problem);

TieBreak tiebreak(const PackingSolution& sol, const Problem& problem);

std::weak_ordering compare(const PackingSolution& a, const PackingSolution& b, const Problem& problem);

// One "type_id: items..." line per bin (1-based), then "objective: <value>".
std::string dump_solution(const PackingSolution& sol, const Problem& problem);

}  // namespace qmc
