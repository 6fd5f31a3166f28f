#pragma once

// Solver adapter. Master, pricing and frame solves go through a backend so
// an external engine can be substituted without touching the callers.

#include <string>

#include "mmimo/milp/lp.hpp"
#include "mmimo/milp/mip.hpp"

namespace mmimo::milp {

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts) const = 0;
  virtual MipSolution solve_mip(const MipProblem& p, const MipOptions& opts) const = 0;
};

/// The dual simplex and branch and bound in this library.
class BuiltinBackend final : public SolverBackend {
 public:
  std::string name() const override { return "builtin"; }
  LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts) const override {
    return milp::solve_lp(lp, opts);
  }
  MipSolution solve_mip(const MipProblem& p, const MipOptions& opts) const override {
    return milp::solve_mip(p, opts);
  }
};

const SolverBackend& builtin_backend();

}  // namespace mmimo::milp
