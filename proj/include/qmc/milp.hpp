#pragma once

#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "qmc/packing.hpp"

namespace qmc::milp {

enum class VarKind { binary, continuous };
enum class Sense { le, ge, eq };

struct Variable {
  std::string name;
  VarKind kind = VarKind::binary;
  Scalar lower = 0;
  Scalar upper = 1;
};

struct Term {
  int var;
  Scalar coef;
};

// coef * v[a] * v[b]
struct QuadTerm {
  int a;
  int b;
  Scalar coef;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::le;
  Scalar rhs = 0;
};

// A mixed-integer model with an optional quadratic objective part.
struct ModelSpec {
  std::string name;
  std::vector<Variable> vars;
  std::vector<Term> objective;
  std::vector<QuadTerm> quadratic;
  std::vector<Row> rows;
  std::unordered_map<std::string, int> index;

  int add_var(std::string name, VarKind kind = VarKind::binary, Scalar lower = 0, Scalar upper = 1);
  int var(const std::string& name) const;
  bool has_var(const std::string& name) const { return index.count(name) != 0; }
  int count_prefix(char prefix) const;

  Scalar evaluate(const std::vector<Scalar>& values) const;
  // Largest violation over all rows and variable bounds.
  Scalar max_violation(const std::vector<Scalar>& values) const;
};

// Variable names, 1-based: x_i_j (item i in bin slot j), y_j_m (slot j has type m), z_i_j_s.
std::string x_name(int item, int bin);
std::string y_name(int bin, int type);
std::string z_name(int item, int bin, int other);

// Quadratic model: n^2 x, n*m y; assignment, one-type and capacity rows.
ModelSpec build_original(const Instance& inst, PairCounting counting = PairCounting::ordered);

// Linear model with z_ijs replacing x_ij (1 - x_sj). `prune_z` drops diagonal and
// zero-cost z variables together with their rows.
ModelSpec build_linearized(const Instance& inst, PairCounting counting = PairCounting::ordered, bool prune_z = false);

// Variable values induced by a packing (bins fill the first slots in creation order).
std::vector<Scalar> assignment_from(const PackingSolution& sol, const ModelSpec& model, const Instance& inst);

// CPLEX-style LP text. Quadratic objective terms go into a "[ ... ] / 2" block.
void write_lp(const ModelSpec& model, std::ostream& out);
std::string to_lp(const ModelSpec& model);

}  // namespace qmc::milp
