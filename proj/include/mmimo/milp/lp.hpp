#pragma once

// Bounded-variable linear programs and their solutions.

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mmimo/milp/kernels.hpp"

namespace mmimo::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Le, Ge, Eq };
enum class ObjSense { Min, Max };

struct Variable {
  double lb = 0.0;
  double ub = kInf;
  double obj = 0.0;
  std::string name;
};

struct Constraint {
  std::vector<std::pair<int, double>> row;  // (variable, coefficient)
  Sense sense = Sense::Le;
  double rhs = 0.0;
  std::string name;
};

struct LinearProgram {
  ObjSense sense = ObjSense::Min;
  std::vector<Variable> vars;
  std::vector<Constraint> cons;

  int add_var(double lb, double ub, double obj, std::string name = {});
  int add_constraint(std::vector<std::pair<int, double>> row, Sense sense, double rhs,
                     std::string name = {});
  int num_vars() const { return static_cast<int>(vars.size()); }
  int num_constraints() const { return static_cast<int>(cons.size()); }

  /// Throws std::invalid_argument on inconsistent bounds, non-finite data or
  /// out-of-range variable references.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, Numerical, IterationLimit };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Numerical;
  std::vector<double> x;
  /// d objective / d rhs, one per constraint.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  std::vector<double> row_activity;
  double objective = 0.0;
  std::int64_t iterations = 0;
};

struct LpOptions {
  double primal_tol = 1e-7;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::int64_t max_iterations = 200000;
  int refactor_interval = 100;
  bool scale = true;
  /// Perturb costs during the dual phase against dual degeneracy.
  bool perturb = true;
  kernels::Mode kernels = kernels::Mode::Serial;
};

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, Free };

/// Simplex basis over structural columns followed by one logical per row.
struct Basis {
  std::vector<int> head;
  std::vector<VarStatus> status;
};

/// Solves an LP from scratch with the built-in dual simplex.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts = {});

/// Largest absolute violation of bounds and rows by x.
double primal_residual(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace mmimo::milp
