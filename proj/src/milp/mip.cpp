#include "mmimo/milp/mip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <tuple>

#include "mmimo/milp/backend.hpp"
#include "mmimo/milp/dual_simplex.hpp"

namespace mmimo::milp {

int MipProblem::add_var(double lb, double ub, double obj, VarType t, std::string name) {
  types.push_back(t);
  return lp.add_var(lb, ub, obj, std::move(name));
}

void MipProblem::validate() const {
  lp.validate();
  if (types.size() != lp.vars.size())
    throw std::invalid_argument("integrality mask size does not match variable count");
  for (std::size_t j = 0; j < types.size(); ++j)
    if (types[j] == VarType::Binary && (lp.vars[j].lb < 0.0 || lp.vars[j].ub > 1.0))
      throw std::invalid_argument("binary variable " + std::to_string(j) + " has bounds outside [0,1]");
}

const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return "optimal";
    case MipStatus::Infeasible: return "infeasible";
    case MipStatus::NoneBetterThanCutoff: return "none_better_than_cutoff";
    case MipStatus::TimeoutWithIncumbent: return "timeout_with_incumbent";
    case MipStatus::TimeoutNoIncumbent: return "timeout_no_incumbent";
    case MipStatus::Unbounded: return "unbounded";
    case MipStatus::Numerical: return "numerical";
  }
  return "unknown";
}

bool is_feasible(const MipProblem& p, const std::vector<double>& x, double tol) {
  if (x.size() != p.lp.vars.size()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j])) return false;
    if (p.types[j] != VarType::Continuous && std::abs(x[j] - std::round(x[j])) > tol) return false;
  }
  return primal_residual(p.lp, x) <= tol;
}

namespace {

using Clock = std::chrono::steady_clock;
using BoundChange = std::tuple<int, double, double>;

struct Node {
  std::vector<BoundChange> bounds;
  std::shared_ptr<const Basis> basis;
  std::int64_t parent = -1;
  int depth = 0;
  double bound = -kInf;  // minimization form
};

}  // namespace

MipSolution solve_mip(const MipProblem& p, const MipOptions& o) {
  p.validate();
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };
  const double sg = p.lp.sense == ObjSense::Max ? -1.0 : 1.0;
  const int n = p.lp.num_vars();

  MipSolution out;
  LinearProgram lp = p.lp;
  for (int j = 0; j < n; ++j) {
    if (!p.is_integer(j)) continue;
    Variable& v = lp.vars[static_cast<std::size_t>(j)];
    v.lb = std::ceil(v.lb - o.int_tol);
    v.ub = std::floor(v.ub + o.int_tol);
    if (v.lb > v.ub) {
      out.status = MipStatus::Infeasible;
      return out;
    }
  }

  bool int_obj = true;
  for (int j = 0; j < n; ++j) {
    const double c = lp.vars[static_cast<std::size_t>(j)].obj;
    if (c == 0.0) continue;
    if (!p.is_integer(j) || c != std::round(c)) int_obj = false;
  }

  double inc = kInf;
  if (o.cutoff) inc = sg * *o.cutoff;
  std::vector<double> inc_x;

  auto objective_of = [&](const std::vector<double>& x) {
    double v = 0.0;
    for (int j = 0; j < n; ++j) v += lp.vars[static_cast<std::size_t>(j)].obj * x[static_cast<std::size_t>(j)];
    return sg * v;
  };
  bool has_continuous = false;
  for (int j = 0; j < n; ++j) has_continuous = has_continuous || !p.is_integer(j);

  // Rounds the integers and recomputes the continuous part for them exactly,
  // so big-M rows cannot hide a violation inside the integrality tolerance.
  auto polish = [&](std::vector<double>& x) {
    for (int j = 0; j < n; ++j)
      if (p.is_integer(j)) x[static_cast<std::size_t>(j)] = std::round(x[static_cast<std::size_t>(j)]);
    if (!has_continuous) return true;
    LinearProgram fixed = lp;
    for (int j = 0; j < n; ++j) {
      if (!p.is_integer(j)) continue;
      Variable& v = fixed.vars[static_cast<std::size_t>(j)];
      v.lb = v.ub = x[static_cast<std::size_t>(j)];
    }
    DualSimplex ps(fixed, o.lp);
    if (ps.solve() != LpStatus::Optimal) return false;
    std::vector<double> y = ps.primal();
    for (int j = 0; j < n; ++j)
      if (!p.is_integer(j)) x[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(j)];
    return true;
  };
  auto try_incumbent = [&](std::vector<double> x) {
    if (!polish(x)) return false;
    if (!is_feasible(p, x, 1e-6)) return false;
    const double v = objective_of(x);
    if (!(v < inc - 1e-9)) return false;
    inc = v;
    inc_x = std::move(x);
    return true;
  };
  auto prune = [&](double bound) {
    if (inc == kInf) return false;
    if (int_obj) return std::ceil(bound - 1e-6) >= inc - 1e-9;
    const double tol = std::max(o.abs_gap, o.rel_gap * std::abs(inc));
    return bound >= inc - tol;
  };

  if (!o.initial_solution.empty()) try_incumbent(o.initial_solution);

  std::vector<double> root_lb(static_cast<std::size_t>(n)), root_ub(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    root_lb[static_cast<std::size_t>(j)] = lp.vars[static_cast<std::size_t>(j)].lb;
    root_ub[static_cast<std::size_t>(j)] = lp.vars[static_cast<std::size_t>(j)].ub;
  }

  auto ds = std::make_unique<DualSimplex>(lp, o.lp);
  std::vector<int> applied;
  auto apply = [&](const Node& node) {
    for (int j : applied) ds->set_bounds(j, root_lb[static_cast<std::size_t>(j)], root_ub[static_cast<std::size_t>(j)]);
    applied.clear();
    for (const auto& [j, l, u] : node.bounds) {
      ds->set_bounds(j, l, u);
      applied.push_back(j);
    }
  };

  std::vector<Node> open;
  std::optional<Node> dive;
  dive = Node{};
  std::int64_t last_solved = -2;
  bool timed_out = false;
  bool numerical = false;
  bool root = true;

  while (dive || !open.empty()) {
    if (elapsed() > o.time_limit_s || (o.max_nodes >= 0 && out.nodes >= o.max_nodes)) {
      timed_out = true;
      break;
    }
    Node node;
    if (dive) {
      node = std::move(*dive);
      dive.reset();
    } else {
      std::size_t pick = open.size() - 1;
      if (!inc_x.empty()) {
        for (std::size_t i = 0; i < open.size(); ++i)
          if (open[i].bound < open[pick].bound) pick = i;
      }
      node = std::move(open[pick]);
      open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    if (prune(node.bound)) continue;

    apply(node);
    if (node.basis && node.parent != last_solved) ds->load_basis(*node.basis);
    const std::int64_t id = out.nodes++;
    LpStatus st = ds->solve();
    if (st == LpStatus::Numerical || st == LpStatus::IterationLimit) {
      out.lp_iterations += ds->iterations();
      ds = std::make_unique<DualSimplex>(lp, o.lp);
      applied.clear();
      apply(node);
      st = ds->solve();
    }
    last_solved = id;
    if (st == LpStatus::Unbounded && root) {
      out.status = MipStatus::Unbounded;
      out.lp_iterations += ds->iterations();
      out.seconds = elapsed();
      return out;
    }
    if (st != LpStatus::Optimal) {
      if (st != LpStatus::Infeasible) numerical = true;
      root = false;
      continue;
    }

    const double obj = sg * ds->objective();
    std::vector<double> x = ds->primal();
    if (root) {
      out.root_lp = ds->objective();
      if (o.heuristic) {
        if (auto h = o.heuristic(x)) try_incumbent(std::move(*h));
      }
      root = false;
    }
    if (prune(obj)) continue;

    int branch = -1;
    double most = o.int_tol;
    for (int j = 0; j < n; ++j) {
      if (!p.is_integer(j)) continue;
      const double v = x[static_cast<std::size_t>(j)];
      const double frac = std::abs(v - std::round(v));
      if (frac > most) {
        most = frac;
        branch = j;
      }
    }
    if (branch < 0) {
      std::vector<double> r = x;
      if (polish(r)) {
        try_incumbent(std::move(r));
        continue;
      }
      // No continuous completion at the rounded point: split on a variable
      // that sits off its integer, on the side that actually cuts it off.
      most = 0.0;
      for (int j = 0; j < n; ++j) {
        if (!p.is_integer(j)) continue;
        const double v = x[static_cast<std::size_t>(j)];
        const double r = std::round(v);
        if (v == r) continue;
        if (v < r ? !(ds->lower(j) < r) : !(r < ds->upper(j))) continue;
        if (std::abs(v - r) > most) {
          most = std::abs(v - r);
          branch = j;
        }
      }
      if (branch < 0) continue;
    }

    if (o.on_node) o.on_node(NodeEvent{id, node.depth, sg * obj, sg * inc, open.size()});

    const double v = x[static_cast<std::size_t>(branch)];
    const double lo = ds->lower(branch), hi = ds->upper(branch);
    auto basis = std::make_shared<const Basis>(ds->basis());
    Node down{node.bounds, basis, id, node.depth + 1, obj};
    double split_lo = std::floor(v), split_hi = std::ceil(v);
    if (split_lo == split_hi) {
      split_lo = v < std::round(v) ? std::round(v) - 1.0 : std::round(v);
      split_hi = split_lo + 1.0;
    }
    down.bounds.emplace_back(branch, lo, split_lo);
    Node up{std::move(node.bounds), basis, id, node.depth + 1, obj};
    up.bounds.emplace_back(branch, split_hi, hi);
    open.push_back(std::move(down));
    dive = std::move(up);
  }

  out.lp_iterations += ds->iterations();
  out.seconds = elapsed();
  if (!inc_x.empty()) {
    out.x = inc_x;
    out.objective = sg * inc;
  }
  if (timed_out) {
    double b = kInf;
    if (dive) b = std::min(b, dive->bound);
    for (const Node& nd : open) b = std::min(b, nd.bound);
    if (!inc_x.empty()) b = std::min(b, inc);
    out.bound = sg * b;
    out.status = inc_x.empty() ? MipStatus::TimeoutNoIncumbent : MipStatus::TimeoutWithIncumbent;
    if (!inc_x.empty()) out.gap = std::abs(inc - b) / std::max(1.0, std::abs(inc));
    return out;
  }
  if (!inc_x.empty()) {
    out.status = MipStatus::Optimal;
    out.bound = out.objective;
  } else if (numerical) {
    out.status = MipStatus::Numerical;
  } else if (o.cutoff) {
    out.status = MipStatus::NoneBetterThanCutoff;
    out.bound = *o.cutoff;
  } else {
    out.status = MipStatus::Infeasible;
  }
  return out;
}

const SolverBackend& builtin_backend() {
  static const BuiltinBackend b;
  return b;
}

}  // namespace mmimo::milp
