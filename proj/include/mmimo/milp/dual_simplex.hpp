#pragma once

// Dense bounded-variable dual simplex with an explicit basis inverse.
//
// Rows are stored as A x - r = 0 with the row activities r as logical
// variables, so every constraint sense becomes a bound on r. Dual
// feasibility is obtained by placing each nonbasic variable at the bound its
// reduced cost prefers; where that bound is infinite a temporary box is used
// and widened if it is still active at the optimum.
//
// The solver keeps its basis between calls, so after set_bounds() a
// subsequent solve() re-optimizes from the previous basis. This is what the
// branch-and-bound driver relies on.

#include <cstdint>
#include <vector>

#include "mmimo/milp/lp.hpp"

namespace mmimo::milp {

class DualSimplex {
 public:
  explicit DualSimplex(const LinearProgram& lp, LpOptions opts = {});

  LpStatus solve();

  /// Changes the bounds of structural variable j (original units).
  void set_bounds(int j, double lb, double ub);
  double lower(int j) const;
  double upper(int j) const;

  const Basis& basis() const { return basis_; }
  void load_basis(const Basis& b);

  /// Objective in the original sense (valid after an Optimal solve).
  double objective() const;
  std::vector<double> primal() const;
  LpSolution solution() const;

  LpStatus status() const { return status_; }
  std::int64_t iterations() const { return total_iterations_; }
  int num_vars() const { return n_; }
  int num_rows() const { return m_; }

 private:
  void build(const LinearProgram& lp);
  void compute_scaling(const LinearProgram& lp);
  bool refactor();
  void compute_primal();
  void compute_duals();
  bool make_dual_feasible();
  void place_at_bound(int j);
  LpStatus iterate();
  LpStatus primal_iterate();
  LpStatus iterate_after_loss();
  bool primal_feasible() const;
  bool dual_feasible() const;
  void perturb_costs();
  void restore_costs();
  double value_at_bound(int j) const;
  double working_objective() const;
  void ftran(int j, std::vector<double>& out) const;

  LpOptions opts_;
  int n_ = 0;
  int m_ = 0;
  double sense_sign_ = 1.0;

  CscMatrix a_;  // scaled structural columns
  std::vector<double> col_scale_;
  std::vector<double> row_scale_;

  std::vector<double> cost_;  // scaled, minimization form, size n+m
  std::vector<double> base_cost_;
  bool perturbed_ = false;
  std::vector<double> lb_;
  std::vector<double> ub_;
  std::vector<bool> artificial_;
  double box_ = 1e7;

  Basis basis_;
  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<double> binv_;
  bool factored_ = false;
  bool dirty_primal_ = true;
  int since_refactor_ = 0;
  bool bland_ = false;
  int degenerate_run_ = 0;

  LpStatus status_ = LpStatus::Numerical;
  std::int64_t total_iterations_ = 0;

  std::vector<double> rho_;
  std::vector<double> alpha_;
  std::vector<double> column_;
};

}  // namespace mmimo::milp
