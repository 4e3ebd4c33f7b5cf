#include "qmc/milp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace qmc::milp {

int ModelSpec::add_var(std::string var_name, VarKind kind, Scalar lower, Scalar upper) {
  if (index.count(var_name)) throw std::logic_error("duplicate variable " + var_name);
  const int id = static_cast<int>(vars.size());
  index.emplace(var_name, id);
  vars.push_back({std::move(var_name), kind, lower, upper});
  return id;
}

int ModelSpec::var(const std::string& var_name) const {
  auto it = index.find(var_name);
  if (it == index.end()) throw std::out_of_range("unknown variable " + var_name);
  return it->second;
}

int ModelSpec::count_prefix(char prefix) const {
  return static_cast<int>(std::count_if(vars.begin(), vars.end(), [&](const Variable& v) {
    return !v.name.empty() && v.name.front() == prefix;
  }));
}

Scalar ModelSpec::evaluate(const std::vector<Scalar>& values) const {
  Scalar total = 0;
  for (const Term& t : objective) total += t.coef * values[t.var];
  for (const QuadTerm& t : quadratic) total += t.coef * values[t.a] * values[t.b];
  return total;
}

Scalar ModelSpec::max_violation(const std::vector<Scalar>& values) const {
  Scalar worst = 0;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    worst = std::max(worst, vars[v].lower - values[v]);
    worst = std::max(worst, values[v] - vars[v].upper);
  }
  for (const Row& row : rows) {
    Scalar lhs = 0;
    for (const Term& t : row.terms) lhs += t.coef * values[t.var];
    switch (row.sense) {
      case Sense::le: worst = std::max(worst, lhs - row.rhs); break;
      case Sense::ge: worst = std::max(worst, row.rhs - lhs); break;
      case Sense::eq: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

std::string x_name(int item, int bin) { return fmt::format("x_{}_{}", item + 1, bin + 1); }
std::string y_name(int bin, int type) { return fmt::format("y_{}_{}", bin + 1, type + 1); }
std::string z_name(int item, int bin, int other) { return fmt::format("z_{}_{}_{}", item + 1, bin + 1, other + 1); }

namespace {

Scalar pair_weight(PairCounting counting) { return counting == PairCounting::ordered ? 1.0 : 0.5; }

// Variables and the rows shared by both models.
ModelSpec build_core(const Instance& inst) {
  const int n = inst.n, m = inst.m, d = inst.d;
  ModelSpec model;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) model.add_var(x_name(i, j));
  for (int j = 0; j < n; ++j)
    for (int t = 0; t < m; ++t) model.add_var(y_name(j, t));

  for (int j = 0; j < n; ++j)
    for (int t = 0; t < m; ++t) model.objective.push_back({model.var(y_name(j, t)), inst.type_costs[t]});

  for (int i = 0; i < n; ++i) {
    Row row{fmt::format("assign_{}", i + 1), {}, Sense::eq, 1};
    for (int j = 0; j < n; ++j) row.terms.push_back({model.var(x_name(i, j)), 1});
    model.rows.push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j) {
    Row row{fmt::format("type_{}", j + 1), {}, Sense::le, 1};
    for (int t = 0; t < m; ++t) row.terms.push_back({model.var(y_name(j, t)), 1});
    model.rows.push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j)
    for (int r = 0; r < d; ++r) {
      Row row{fmt::format("cap_{}_{}", j + 1, r + 1), {}, Sense::le, 0};
      for (int i = 0; i < n; ++i) row.terms.push_back({model.var(x_name(i, j)), inst.weights(i, r)});
      for (int t = 0; t < m; ++t) row.terms.push_back({model.var(y_name(j, t)), -inst.type_caps(t, r)});
      model.rows.push_back(std::move(row));
    }
  return model;
}

}  // namespace

ModelSpec build_original(const Instance& inst, PairCounting counting) {
  const int n = inst.n;
  const Scalar f = pair_weight(counting);
  ModelSpec model = build_core(inst);
  model.name = "qmcvsbpp_original";
  // sum_j sum_i sum_s c_is x_ij (1 - x_sj) = sum_ij (sum_s c_is) x_ij - sum_j sum_{i,s} c_is x_ij x_sj
  for (int i = 0; i < n; ++i) {
    const Scalar row_sum = inst.pair_costs.row(i).sum();
    if (row_sum == 0) continue;
    for (int j = 0; j < n; ++j) model.objective.push_back({model.var(x_name(i, j)), f * row_sum});
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int s = i + 1; s < n; ++s) {
        const Scalar c = inst.pair_costs(i, s) + inst.pair_costs(s, i);
        if (c == 0) continue;
        model.quadratic.push_back({model.var(x_name(i, j)), model.var(x_name(s, j)), -f * c});
      }
  return model;
}

ModelSpec build_linearized(const Instance& inst, PairCounting counting, bool prune_z) {
  const int n = inst.n;
  const Scalar f = pair_weight(counting);
  ModelSpec model = build_core(inst);
  model.name = "qmcvsbpp_linearized";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int s = 0; s < n; ++s) {
        if (prune_z && (i == s || inst.pair_costs(i, s) == 0)) continue;
        const int z = model.add_var(z_name(i, j, s));
        if (inst.pair_costs(i, s) != 0) model.objective.push_back({z, f * inst.pair_costs(i, s)});
      }
  const auto base = model.rows.size();
  std::vector<Row> upper_x, upper_not_x, lower;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int s = 0; s < n; ++s) {
        const std::string zn = z_name(i, j, s);
        if (!model.has_var(zn)) continue;
        const int z = model.var(zn), xi = model.var(x_name(i, j)), xs = model.var(x_name(s, j));
        const std::string tag = fmt::format("{}_{}_{}", i + 1, j + 1, s + 1);
        upper_x.push_back({"zx_" + tag, {{z, 1}, {xi, -1}}, Sense::le, 0});
        upper_not_x.push_back({"znx_" + tag, {{z, 1}, {xs, 1}}, Sense::le, 1});
        // on the diagonal x_ij - x_sj cancels and the row reads z >= 0
        if (i == s)
          lower.push_back({"zlb_" + tag, {{z, 1}}, Sense::ge, 0});
        else
          lower.push_back({"zlb_" + tag, {{z, 1}, {xi, -1}, {xs, 1}}, Sense::ge, 0});
      }
  model.rows.reserve(base + 3 * upper_x.size());
  for (auto* family : {&upper_x, &upper_not_x, &lower})
    for (Row& row : *family) model.rows.push_back(std::move(row));
  return model;
}

std::vector<Scalar> assignment_from(const PackingSolution& sol, const ModelSpec& model, const Instance& inst) {
  const int n = inst.n;
  if (sol.bin_count() > n) throw std::logic_error("assignment_from: more bins than slots");
  std::vector<Scalar> values(model.vars.size(), 0.0);
  RowMatrix x = RowMatrix::Zero(n, n);
  for (int j = 0; j < sol.bin_count(); ++j) {
    values[model.var(y_name(j, sol.bins()[j].type))] = 1;
    for (int i : sol.bins()[j].items) x(i, j) = 1;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      values[model.var(x_name(i, j))] = x(i, j);
      for (int s = 0; s < n; ++s)
        if (auto it = model.index.find(z_name(i, j, s)); it != model.index.end())
          values[it->second] = x(i, j) * (1 - x(s, j));
    }
  return values;
}

namespace {

std::string number(Scalar v) {
  if (std::nearbyint(v) == v && std::abs(v) < 9.0e15) return fmt::format("{}", static_cast<long long>(v));
  return fmt::format("{}", v);
}

class LineWriter {
 public:
  explicit LineWriter(std::ostream& out) : out_(out) {}

  void term(Scalar coef, const std::string& text, bool first) {
    std::string piece;
    if (coef < 0)
      piece = fmt::format("- {} {}", number(-coef), text);
    else
      piece = first ? fmt::format("{} {}", number(coef), text) : fmt::format("+ {} {}", number(coef), text);
    raw(piece);
  }

  void raw(const std::string& piece) {
    if (width_ + piece.size() + 1 > 200) {
      out_ << "\n   ";
      width_ = 3;
    }
    out_ << ' ' << piece;
    width_ += piece.size() + 1;
  }

  void start(const std::string& head) {
    out_ << ' ' << head;
    width_ = head.size() + 1;
  }

  void end() { out_ << '\n'; }

 private:
  std::ostream& out_;
  std::size_t width_ = 0;
};

}  // namespace

void write_lp(const ModelSpec& model, std::ostream& out) {
  out << "\\ " << model.name << '\n';
  out << "Minimize\n";
  LineWriter line(out);
  line.start("obj:");
  bool first = true;
  for (const Term& t : model.objective) {
    if (t.coef == 0) continue;
    line.term(t.coef, model.vars[t.var].name, first);
    first = false;
  }
  if (first) line.raw("0 " + model.vars.front().name);
  if (!model.quadratic.empty()) {
    line.raw("+ [");
    bool qfirst = true;
    for (const QuadTerm& q : model.quadratic) {
      line.term(2 * q.coef, model.vars[q.a].name + " * " + model.vars[q.b].name, qfirst);
      qfirst = false;
    }
    line.raw("] / 2");
  }
  line.end();

  out << "Subject To\n";
  for (const Row& row : model.rows) {
    line.start(row.name + ":");
    bool rfirst = true;
    for (const Term& t : row.terms) {
      line.term(t.coef, model.vars[t.var].name, rfirst);
      rfirst = false;
    }
    const char* sense = row.sense == Sense::le ? "<=" : row.sense == Sense::ge ? ">=" : "=";
    line.raw(fmt::format("{} {}", sense, number(row.rhs)));
    line.end();
  }

  bool bounds_header = false;
  for (const Variable& v : model.vars) {
    if (v.kind != VarKind::continuous) continue;
    if (!bounds_header) {
      out << "Bounds\n";
      bounds_header = true;
    }
    out << ' ' << number(v.lower) << " <= " << v.name << " <= " << number(v.upper) << '\n';
  }

  bool binary_header = false;
  for (const Variable& v : model.vars) {
    if (v.kind != VarKind::binary) continue;
    if (!binary_header) {
      out << "Binaries\n";
      binary_header = true;
    }
    out << ' ' << v.name << '\n';
  }
  out << "End\n";
}

std::string to_lp(const ModelSpec& model) {
  std::ostringstream out;
  write_lp(model, out);
  return out.str();
}

}  // namespace qmc::milp
