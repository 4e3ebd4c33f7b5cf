#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qmc {

using Scalar = double;
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Raised by the instance parser. The message always carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A QMC-VSBPP instance. Integer-valued data is held exactly (doubles below 2^53),
// so objective sums over integer instances are exact.
struct Instance {
  int n = 0;  // items
  int m = 0;  // bin types
  int d = 0;  // dimensions
  RowMatrix weights;     // n x d, strictly positive
  RowMatrix pair_costs;  // n x n, symmetric, zero diagonal, non-negative
  Vector type_costs;     // m, strictly positive
  RowMatrix type_caps;   // m x d, strictly positive
  std::string shape;     // free-form cost-shape label carried in a "# shape:" comment
  bool integral = true;  // every number in the file was an integer

  friend bool operator==(const Instance& a, const Instance& b);
};

enum class CostShape { linear, convex, concave, mixed };

CostShape parse_cost_shape(std::string_view name);
std::string_view to_string(CostShape shape);

// Parses the whitespace-separated instance format (header "QMCVSBPP 1").
Instance parse_instance(std::string_view text);
Instance load_instance(const std::string& path);
std::string serialize_instance(const Instance& inst);

// Throws std::invalid_argument when an invariant is broken.
void validate(const Instance& inst);

// Deterministic synthetic instance with integer data.
Instance generate_instance(int n, int m, int d, CostShape shape, std::uint64_t seed);

// True when items a and b fit together into bin type t.
bool pair_fits_type(const Instance& inst, int a, int b, int t);
bool item_fits_type(const Instance& inst, int item, int t);

struct LinkStats {
  RowMatrix links;         // pair cost where the pair co-fits some type, else 0
  Vector agg_penalty;      // row sums of links
  Vector agg_weight;       // summed total weight of linked partners
  int largest_type = 0;    // argmax of aggregated capacity
  std::vector<int> cost_order;  // types by ascending cost
  // Type opened for an item that fits no opened bin: largest_type when the item fits it,
  // otherwise the roomiest type that does.
  std::vector<int> open_type;
};

LinkStats compute_link_stats(const Instance& inst);

enum class PairCounting { ordered, unordered };
enum class AssignRule { min_link, max_link };

PairCounting parse_pair_counting(std::string_view name);
AssignRule parse_assign_rule(std::string_view name);
std::string_view to_string(PairCounting counting);
std::string_view to_string(AssignRule rule);

// Everything the solver components share read-only for one instance.
struct Problem {
  Instance instance;
  LinkStats stats;
  PairCounting counting = PairCounting::ordered;
  AssignRule assign_rule = AssignRule::max_link;
  Vector type_capacity_sum;  // per type, summed over dimensions

  explicit Problem(Instance inst, PairCounting counting = PairCounting::ordered,
                   AssignRule rule = AssignRule::max_link);

  int n() const { return instance.n; }
  // Multiplier on each separated unordered pair: 2 under the literal ordered-pair sum.
  Scalar pair_factor() const { return counting == PairCounting::ordered ? 2.0 : 1.0; }
};

}  // namespace qmc
