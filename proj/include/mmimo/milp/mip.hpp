#pragma once

// LP-based branch and bound for mixed-integer programs.
//
// Nodes split one fractional integer variable into x <= floor(v) and
// x >= ceil(v). The search dives depth-first (up branch first) and, once an
// incumbent exists, restarts each new dive from the open node with the best
// bound. Node LPs are warm-started from the parent basis.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mmimo/milp/lp.hpp"

namespace mmimo::milp {

enum class VarType : std::uint8_t { Continuous, Integer, Binary };

struct MipProblem {
  LinearProgram lp;
  std::vector<VarType> types;  // one per variable

  int add_var(double lb, double ub, double obj, VarType t, std::string name = {});
  bool is_integer(int j) const { return types[static_cast<std::size_t>(j)] != VarType::Continuous; }
  /// Throws std::invalid_argument if the mask does not match or a binary has
  /// bounds outside [0, 1].
  void validate() const;
};

enum class MipStatus {
  Optimal,
  Infeasible,
  /// The tree was exhausted without finding anything better than the cutoff.
  NoneBetterThanCutoff,
  TimeoutWithIncumbent,
  TimeoutNoIncumbent,
  Unbounded,
  Numerical,
};

const char* to_string(MipStatus s);

struct NodeEvent {
  std::int64_t node = 0;
  int depth = 0;
  double lp_objective = 0.0;
  double incumbent = 0.0;  // +-inf when none
  std::size_t open = 0;
};

struct MipOptions {
  double time_limit_s = 60.0;
  double int_tol = 1e-6;
  double rel_gap = 0.0;
  double abs_gap = 1e-9;
  std::int64_t max_nodes = -1;
  /// Only solutions strictly better than this value are accepted.
  std::optional<double> cutoff;
  /// Known feasible point used as the first incumbent (checked before use).
  std::vector<double> initial_solution;
  /// Called with the root LP solution; may return a feasible point.
  std::function<std::optional<std::vector<double>>(const std::vector<double>&)> heuristic;
  std::function<void(const NodeEvent&)> on_node;
  LpOptions lp;
};

struct MipSolution {
  MipStatus status = MipStatus::Numerical;
  std::vector<double> x;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  double root_lp = 0.0;
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;
  double seconds = 0.0;

  bool has_solution() const { return !x.empty(); }
};

MipSolution solve_mip(const MipProblem& p, const MipOptions& opts = {});

/// True if x satisfies bounds, rows (scaled residual <= tol) and integrality.
bool is_feasible(const MipProblem& p, const std::vector<double>& x, double tol = 1e-6);

}  // namespace mmimo::milp
