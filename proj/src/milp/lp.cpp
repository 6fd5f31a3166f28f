#include "mmimo/milp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmimo/milp/dual_simplex.hpp"

namespace mmimo::milp {

int LinearProgram::add_var(double lb, double ub, double obj, std::string name) {
  vars.push_back(Variable{lb, ub, obj, std::move(name)});
  return num_vars() - 1;
}

int LinearProgram::add_constraint(std::vector<std::pair<int, double>> row, Sense s, double rhs,
                                  std::string name) {
  cons.push_back(Constraint{std::move(row), s, rhs, std::move(name)});
  return num_constraints() - 1;
}

void LinearProgram::validate() const {
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Variable& v = vars[j];
    if (std::isnan(v.lb) || std::isnan(v.ub) || !std::isfinite(v.obj))
      throw std::invalid_argument("variable " + std::to_string(j) + ": non-finite data");
    if (v.lb > v.ub) throw std::invalid_argument("variable " + std::to_string(j) + ": lb > ub");
    if (v.lb == kInf || v.ub == -kInf)
      throw std::invalid_argument("variable " + std::to_string(j) + ": empty domain");
  }
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const Constraint& c = cons[i];
    if (!std::isfinite(c.rhs))
      throw std::invalid_argument("constraint " + std::to_string(i) + ": non-finite rhs");
    for (const auto& [j, a] : c.row) {
      if (j < 0 || j >= num_vars())
        throw std::invalid_argument("constraint " + std::to_string(i) + ": bad variable index");
      if (!std::isfinite(a))
        throw std::invalid_argument("constraint " + std::to_string(i) + ": non-finite coefficient");
    }
  }
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Numerical: return "numerical";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts) {
  DualSimplex ds(lp, opts);
  ds.solve();
  return ds.solution();
}

double primal_residual(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.vars.size(); ++j) {
    worst = std::max(worst, lp.vars[j].lb - x[j]);
    worst = std::max(worst, x[j] - lp.vars[j].ub);
  }
  for (const Constraint& c : lp.cons) {
    double act = 0.0, scale = 0.0;
    for (const auto& [j, a] : c.row) {
      act += a * x[static_cast<std::size_t>(j)];
      scale = std::max(scale, std::abs(a));
    }
    if (scale == 0.0) scale = 1.0;
    double v = 0.0;
    if (c.sense != Sense::Ge) v = std::max(v, act - c.rhs);
    if (c.sense != Sense::Le) v = std::max(v, c.rhs - act);
    worst = std::max(worst, v / scale);
  }
  return worst;
}

}  // namespace mmimo::milp
