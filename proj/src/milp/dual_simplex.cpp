#include "mmimo/milp/dual_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace mmimo::milp {

namespace {

constexpr double kSingularTol = 1e-11;
constexpr double kMaxBox = 1e12;

double pow2_round(double s) { return std::exp2(std::round(std::log2(s))); }

}  // namespace

DualSimplex::DualSimplex(const LinearProgram& lp, LpOptions opts) : opts_(opts) {
  lp.validate();
  build(lp);
}

void DualSimplex::compute_scaling(const LinearProgram& lp) {
  col_scale_.assign(static_cast<std::size_t>(n_), 1.0);
  row_scale_.assign(static_cast<std::size_t>(m_), 1.0);
  if (!opts_.scale) return;

  // Geometric-mean equilibration, alternating rows and columns.
  for (int pass = 0; pass < 6; ++pass) {
    for (int i = 0; i < m_; ++i) {
      double lo = kInf, hi = 0.0;
      for (const auto& [j, v] : lp.cons[static_cast<std::size_t>(i)].row) {
        const double a = std::abs(v) * col_scale_[static_cast<std::size_t>(j)];
        if (a == 0.0) continue;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      if (hi > 0.0) row_scale_[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(lo * hi);
    }
    std::vector<double> lo(static_cast<std::size_t>(n_), kInf), hi(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, v] : lp.cons[static_cast<std::size_t>(i)].row) {
        const double a = std::abs(v) * row_scale_[static_cast<std::size_t>(i)];
        if (a == 0.0) continue;
        lo[static_cast<std::size_t>(j)] = std::min(lo[static_cast<std::size_t>(j)], a);
        hi[static_cast<std::size_t>(j)] = std::max(hi[static_cast<std::size_t>(j)], a);
      }
    }
    for (int j = 0; j < n_; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (hi[u] > 0.0) col_scale_[u] = 1.0 / std::sqrt(lo[u] * hi[u]);
    }
  }
  for (double& s : row_scale_) s = pow2_round(s);
  for (double& s : col_scale_) s = pow2_round(s);
}

void DualSimplex::build(const LinearProgram& lp) {
  n_ = lp.num_vars();
  m_ = lp.num_constraints();
  sense_sign_ = lp.sense == ObjSense::Max ? -1.0 : 1.0;
  compute_scaling(lp);

  // Merge duplicate (row, col) entries, then lay out column-major.
  std::vector<std::map<int, double>> cols(static_cast<std::size_t>(n_));
  for (int i = 0; i < m_; ++i)
    for (const auto& [j, v] : lp.cons[static_cast<std::size_t>(i)].row)
      cols[static_cast<std::size_t>(j)][i] += v;
  a_.rows = m_;
  a_.cols = n_;
  a_.start.assign(1, 0);
  for (int j = 0; j < n_; ++j) {
    for (const auto& [i, v] : cols[static_cast<std::size_t>(j)]) {
      if (v == 0.0) continue;
      a_.index.push_back(i);
      a_.value.push_back(v * row_scale_[static_cast<std::size_t>(i)] *
                         col_scale_[static_cast<std::size_t>(j)]);
    }
    a_.start.push_back(static_cast<int>(a_.index.size()));
  }

  const auto N = static_cast<std::size_t>(n_ + m_);
  cost_.assign(N, 0.0);
  lb_.assign(N, -kInf);
  ub_.assign(N, kInf);
  artificial_.assign(N, false);
  for (int j = 0; j < n_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const Variable& v = lp.vars[u];
    cost_[u] = sense_sign_ * v.obj * col_scale_[u];
    lb_[u] = v.lb / col_scale_[u];
    ub_[u] = v.ub / col_scale_[u];
  }
  for (int i = 0; i < m_; ++i) {
    const Constraint& c = lp.cons[static_cast<std::size_t>(i)];
    const auto u = static_cast<std::size_t>(n_ + i);
    const double rhs = c.rhs * row_scale_[static_cast<std::size_t>(i)];
    if (c.sense != Sense::Ge) ub_[u] = rhs;
    if (c.sense != Sense::Le) lb_[u] = rhs;
  }

  base_cost_ = cost_;
  perturbed_ = false;
  basis_.head.resize(static_cast<std::size_t>(m_));
  basis_.status.assign(N, VarStatus::Basic);
  for (int i = 0; i < m_; ++i) basis_.head[static_cast<std::size_t>(i)] = n_ + i;
  for (int j = 0; j < n_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    basis_.status[u] = std::isfinite(lb_[u])   ? VarStatus::AtLower
                       : std::isfinite(ub_[u]) ? VarStatus::AtUpper
                                               : VarStatus::Free;
  }
  x_.assign(N, 0.0);
  d_.assign(N, 0.0);
  rho_.assign(static_cast<std::size_t>(m_), 0.0);
  alpha_.assign(N, 0.0);
  column_.assign(static_cast<std::size_t>(m_), 0.0);
  factored_ = false;
  dirty_primal_ = true;
}

void DualSimplex::set_bounds(int j, double lb, double ub) {
  if (j < 0 || j >= n_) throw std::out_of_range("set_bounds: bad variable index");
  if (lb > ub) throw std::invalid_argument("set_bounds: lb > ub");
  const auto u = static_cast<std::size_t>(j);
  lb_[u] = lb / col_scale_[u];
  ub_[u] = ub / col_scale_[u];
  if (basis_.status[u] != VarStatus::Basic) {
    artificial_[u] = false;
    if (basis_.status[u] == VarStatus::AtLower && !std::isfinite(lb_[u]))
      basis_.status[u] = std::isfinite(ub_[u]) ? VarStatus::AtUpper : VarStatus::Free;
    if (basis_.status[u] == VarStatus::AtUpper && !std::isfinite(ub_[u]))
      basis_.status[u] = std::isfinite(lb_[u]) ? VarStatus::AtLower : VarStatus::Free;
    x_[u] = value_at_bound(j);
    dirty_primal_ = true;
  }
}

double DualSimplex::lower(int j) const {
  return lb_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)];
}

double DualSimplex::upper(int j) const {
  return ub_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)];
}

void DualSimplex::load_basis(const Basis& b) {
  if (b.head.size() != static_cast<std::size_t>(m_) ||
      b.status.size() != static_cast<std::size_t>(n_ + m_))
    throw std::invalid_argument("load_basis: dimension mismatch");
  basis_ = b;
  std::fill(artificial_.begin(), artificial_.end(), false);
  for (int j = 0; j < n_ + m_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    VarStatus& s = basis_.status[u];
    if (s == VarStatus::AtLower && !std::isfinite(lb_[u]))
      s = std::isfinite(ub_[u]) ? VarStatus::AtUpper : VarStatus::Free;
    if (s == VarStatus::AtUpper && !std::isfinite(ub_[u]))
      s = std::isfinite(lb_[u]) ? VarStatus::AtLower : VarStatus::Free;
    if (s != VarStatus::Basic) x_[u] = value_at_bound(j);
  }
  factored_ = false;
  dirty_primal_ = true;
}

double DualSimplex::value_at_bound(int j) const {
  const auto u = static_cast<std::size_t>(j);
  switch (basis_.status[u]) {
    case VarStatus::AtLower: return artificial_[u] ? -box_ : lb_[u];
    case VarStatus::AtUpper: return artificial_[u] ? box_ : ub_[u];
    case VarStatus::Free: return 0.0;
    case VarStatus::Basic: return x_[u];
  }
  return 0.0;
}

void DualSimplex::ftran(int j, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto m = static_cast<std::size_t>(m_);
  if (j >= n_) {
    const auto r = static_cast<std::size_t>(j - n_);
    for (std::size_t i = 0; i < m; ++i) out[i] = -binv_[i * m + r];
    return;
  }
  for (int t = a_.start[static_cast<std::size_t>(j)]; t < a_.start[static_cast<std::size_t>(j) + 1]; ++t) {
    const auto r = static_cast<std::size_t>(a_.index[static_cast<std::size_t>(t)]);
    const double v = a_.value[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < m; ++i) out[i] += binv_[i * m + r] * v;
  }
}

bool DualSimplex::refactor() {
  const auto m = static_cast<std::size_t>(m_);
  std::vector<double> w(m * m, 0.0);
  binv_.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) binv_[i * m + i] = 1.0;
  std::vector<int> orig(m);
  for (std::size_t i = 0; i < m; ++i) orig[i] = static_cast<int>(i);

  auto load_column = [&](std::size_t c) {
    const int j = basis_.head[c];
    for (std::size_t r = 0; r < m; ++r) w[r * m + c] = 0.0;
    if (j >= n_) {
      w[static_cast<std::size_t>(j - n_) * m + c] = -1.0;
    } else {
      for (int t = a_.start[static_cast<std::size_t>(j)]; t < a_.start[static_cast<std::size_t>(j) + 1]; ++t)
        w[static_cast<std::size_t>(a_.index[static_cast<std::size_t>(t)]) * m + c] =
            a_.value[static_cast<std::size_t>(t)];
    }
  };
  for (std::size_t c = 0; c < m; ++c) load_column(c);

  auto swap_rows = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap_ranges(w.begin() + static_cast<std::ptrdiff_t>(a * m),
                     w.begin() + static_cast<std::ptrdiff_t>((a + 1) * m),
                     w.begin() + static_cast<std::ptrdiff_t>(b * m));
    std::swap_ranges(binv_.begin() + static_cast<std::ptrdiff_t>(a * m),
                     binv_.begin() + static_cast<std::ptrdiff_t>((a + 1) * m),
                     binv_.begin() + static_cast<std::ptrdiff_t>(b * m));
    std::swap(orig[a], orig[b]);
  };

  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    double best = 0.0;
    for (std::size_t r = c; r < m; ++r) {
      const double v = std::abs(w[r * m + c]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < kSingularTol) {
      // Swap in the logical of an unpivoted row whose logical is not basic
      // further right; its transformed column is -e_c below the diagonal.
      std::size_t pick = m;
      for (std::size_t r = c; r < m && pick == m; ++r) {
        const int logical = n_ + orig[r];
        bool used = false;
        for (std::size_t c2 = c + 1; c2 < m; ++c2)
          if (basis_.head[c2] == logical) used = true;
        if (!used) pick = r;
      }
      if (pick == m) return false;
      swap_rows(c, pick);
      const int old = basis_.head[c];
      const auto uo = static_cast<std::size_t>(old);
      basis_.status[uo] = std::isfinite(lb_[uo])   ? VarStatus::AtLower
                          : std::isfinite(ub_[uo]) ? VarStatus::AtUpper
                                                   : VarStatus::Free;
      artificial_[uo] = false;
      x_[uo] = value_at_bound(old);
      const int logical = n_ + orig[c];
      basis_.head[c] = logical;
      basis_.status[static_cast<std::size_t>(logical)] = VarStatus::Basic;
      const auto oc = static_cast<std::size_t>(orig[c]);
      for (std::size_t r = 0; r < m; ++r) w[r * m + c] = -binv_[r * m + oc];
      piv = c;
      dirty_primal_ = true;
    }
    swap_rows(c, piv);
    const double inv = 1.0 / w[c * m + c];
    for (std::size_t k = 0; k < m; ++k) {
      w[c * m + k] *= inv;
      binv_[c * m + k] *= inv;
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c) continue;
      const double f = w[r * m + c];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < m; ++k) {
        w[r * m + k] -= f * w[c * m + k];
        binv_[r * m + k] -= f * binv_[c * m + k];
      }
    }
  }
  factored_ = true;
  since_refactor_ = 0;
  return true;
}

void DualSimplex::compute_primal() {
  const auto m = static_cast<std::size_t>(m_);
  std::vector<double> v(m, 0.0);
  for (int j = 0; j < n_ + m_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (basis_.status[u] == VarStatus::Basic) continue;
    x_[u] = value_at_bound(j);
    const double xj = x_[u];
    if (xj == 0.0) continue;
    if (j >= n_) {
      v[static_cast<std::size_t>(j - n_)] -= xj;
    } else {
      for (int t = a_.start[u]; t < a_.start[u + 1]; ++t)
        v[static_cast<std::size_t>(a_.index[static_cast<std::size_t>(t)])] +=
            a_.value[static_cast<std::size_t>(t)] * xj;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += binv_[i * m + k] * v[k];
    x_[static_cast<std::size_t>(basis_.head[i])] = -s;
  }
  dirty_primal_ = false;
}

void DualSimplex::compute_duals() {
  const auto m = static_cast<std::size_t>(m_);
  std::vector<double> y(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double cb = cost_[static_cast<std::size_t>(basis_.head[i])];
    if (cb == 0.0) continue;
    for (std::size_t k = 0; k < m; ++k) y[k] += cb * binv_[i * m + k];
  }
  for (int j = 0; j < n_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    double s = cost_[u];
    for (int t = a_.start[u]; t < a_.start[u + 1]; ++t)
      s -= y[static_cast<std::size_t>(a_.index[static_cast<std::size_t>(t)])] *
           a_.value[static_cast<std::size_t>(t)];
    d_[u] = s;
  }
  for (std::size_t i = 0; i < m; ++i) d_[static_cast<std::size_t>(n_) + i] = y[i];
  for (int h : basis_.head) d_[static_cast<std::size_t>(h)] = 0.0;
}

void DualSimplex::place_at_bound(int j) {
  const auto u = static_cast<std::size_t>(j);
  const double tol = opts_.dual_tol;
  const bool lo = std::isfinite(lb_[u]);
  const bool hi = std::isfinite(ub_[u]);
  artificial_[u] = false;
  if (lo && hi && lb_[u] == ub_[u]) {
    basis_.status[u] = VarStatus::AtLower;
  } else if (d_[u] > tol) {
    basis_.status[u] = VarStatus::AtLower;
    artificial_[u] = !lo;
  } else if (d_[u] < -tol) {
    basis_.status[u] = VarStatus::AtUpper;
    artificial_[u] = !hi;
  } else if (basis_.status[u] == VarStatus::AtUpper && hi) {
    // keep
  } else if (lo) {
    basis_.status[u] = VarStatus::AtLower;
  } else if (hi) {
    basis_.status[u] = VarStatus::AtUpper;
  } else {
    basis_.status[u] = VarStatus::Free;
  }
  x_[u] = value_at_bound(j);
}

bool DualSimplex::make_dual_feasible() {
  const double tol = opts_.dual_tol;
  bool changed = false;
  for (int j = 0; j < n_ + m_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const VarStatus s = basis_.status[u];
    if (s == VarStatus::Basic) continue;
    const bool fixed = std::isfinite(lb_[u]) && lb_[u] == ub_[u];
    bool bad = false;
    if (fixed) {
      bad = s != VarStatus::AtLower || artificial_[u];
    } else if (s == VarStatus::AtLower) {
      bad = d_[u] < -tol || (!artificial_[u] && !std::isfinite(lb_[u])) ||
            (artificial_[u] && d_[u] <= tol);
    } else if (s == VarStatus::AtUpper) {
      bad = d_[u] > tol || (!artificial_[u] && !std::isfinite(ub_[u])) ||
            (artificial_[u] && d_[u] >= -tol);
    } else {
      bad = std::abs(d_[u]) > tol || std::isfinite(lb_[u]) || std::isfinite(ub_[u]);
    }
    if (bad) {
      place_at_bound(j);
      changed = true;
    }
  }
  if (changed) dirty_primal_ = true;
  return changed;
}

bool DualSimplex::primal_feasible() const {
  const double ptol = opts_.primal_tol;
  for (int j = 0; j < n_ + m_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (basis_.status[u] != VarStatus::Basic) {
      if (artificial_[u]) return false;
      if (basis_.status[u] == VarStatus::Free && (std::isfinite(lb_[u]) || std::isfinite(ub_[u])))
        return false;
      continue;
    }
    if (x_[u] < lb_[u] - ptol || x_[u] > ub_[u] + ptol) return false;
  }
  return true;
}

bool DualSimplex::dual_feasible() const {
  const double tol = opts_.dual_tol;
  for (int j = 0; j < n_ + m_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const VarStatus st = basis_.status[u];
    if (st == VarStatus::Basic) continue;
    if (std::isfinite(lb_[u]) && lb_[u] == ub_[u]) continue;
    if ((st == VarStatus::AtLower || st == VarStatus::Free) && d_[u] < -tol) return false;
    if ((st == VarStatus::AtUpper || st == VarStatus::Free) && d_[u] > tol) return false;
  }
  return true;
}

// Shifts the cost of every nonbasic structural away from zero reduced cost
// in the direction its bound status already prefers.
void DualSimplex::perturb_costs() {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (int j = 0; j < n_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 29;
    const double r = 0.5 + 0.5 * static_cast<double>(h >> 11) * 0x1.0p-53;
    const double xi = (1e-7 + 1e-7 * std::abs(base_cost_[u])) * r;
    switch (basis_.status[u]) {
      case VarStatus::AtLower: cost_[u] = base_cost_[u] + xi; break;
      case VarStatus::AtUpper: cost_[u] = base_cost_[u] - xi; break;
      default: cost_[u] = base_cost_[u]; break;
    }
  }
  perturbed_ = true;
}

void DualSimplex::restore_costs() {
  cost_ = base_cost_;
  perturbed_ = false;
}

LpStatus DualSimplex::solve() {
  bland_ = false;
  degenerate_run_ = 0;
  if (perturbed_) restore_costs();
  if (!refactor()) return status_ = LpStatus::Numerical;
  compute_duals();
  if (dirty_primal_) compute_primal();

  if (primal_feasible()) {
    status_ = primal_iterate();
    return status_;
  }
  if (opts_.perturb) {
    perturb_costs();
    compute_duals();
  }
  make_dual_feasible();
  if (dirty_primal_) compute_primal();
  status_ = iterate();
  if (perturbed_) {
    restore_costs();
    if (status_ == LpStatus::Optimal) {
      compute_duals();
      if (!dual_feasible()) {
        bland_ = false;
        degenerate_run_ = 0;
        status_ = primal_iterate();
      }
    } else if (status_ == LpStatus::IterationLimit) {
      bland_ = false;
      degenerate_run_ = 0;
      if (!refactor()) return status_ = LpStatus::Numerical;
      compute_duals();
      make_dual_feasible();
      compute_primal();
      status_ = iterate();
    }
  }
  return status_;
}

LpStatus DualSimplex::primal_iterate() {
  const auto m = static_cast<std::size_t>(m_);
  const double ptol = opts_.primal_tol;
  const double dtol = opts_.dual_tol;
  const std::size_t N = static_cast<std::size_t>(n_ + m_);
  std::int64_t local = 0;
  double best_obj = kInf;
  int stalls = 0;
  std::int64_t next_check = opts_.refactor_interval;
  bool verified = false;

  auto refresh = [&]() -> bool {
    if (!refactor()) return false;
    compute_duals();
    compute_primal();
    return true;
  };

  while (true) {
    if (local >= opts_.max_iterations) return LpStatus::IterationLimit;
    if (since_refactor_ >= opts_.refactor_interval) {
      if (!refresh()) return LpStatus::Numerical;
      if (!primal_feasible()) return iterate_after_loss();
    }
    if (local >= next_check) {
      next_check = local + opts_.refactor_interval;
      const double obj = working_objective();
      if (obj < best_obj - 1e-9 * (1.0 + std::abs(obj))) {
        best_obj = obj;
        stalls = 0;
      } else if (++stalls >= 5) {
        bland_ = true;
      }
    }

    // Entering variable: largest dual infeasibility.
    int q = -1;
    double best = 0.0;
    for (std::size_t u = 0; u < N; ++u) {
      const VarStatus st = basis_.status[u];
      if (st == VarStatus::Basic) continue;
      if (std::isfinite(lb_[u]) && lb_[u] == ub_[u]) continue;
      double inf = 0.0;
      if ((st == VarStatus::AtLower || st == VarStatus::Free) && d_[u] < -dtol) inf = -d_[u];
      if ((st == VarStatus::AtUpper || st == VarStatus::Free) && d_[u] > dtol) inf = d_[u];
      if (inf <= 0.0) continue;
      if (bland_) {
        q = static_cast<int>(u);
        break;
      }
      if (inf > best) {
        best = inf;
        q = static_cast<int>(u);
      }
    }
    if (q < 0) {
      if (since_refactor_ > 0 && !verified) {
        verified = true;
        if (!refresh()) return LpStatus::Numerical;
        if (!primal_feasible()) return iterate_after_loss();
        continue;
      }
      return LpStatus::Optimal;
    }
    verified = false;

    const auto uq = static_cast<std::size_t>(q);
    const double dir = d_[uq] < 0.0 ? 1.0 : -1.0;
    ftran(q, column_);

    // Harris two-pass ratio test on the primal step.
    double theta_max = kInf;
    for (std::size_t i = 0; i < m; ++i) {
      const double rate = -dir * column_[i];
      if (std::abs(rate) <= opts_.pivot_tol) continue;
      const auto b = static_cast<std::size_t>(basis_.head[i]);
      const double r = rate < 0.0 ? (x_[b] - lb_[b] + ptol) / -rate : (ub_[b] - x_[b] + ptol) / rate;
      if (bland_) {
        const double r0 = rate < 0.0 ? (x_[b] - lb_[b]) / -rate : (ub_[b] - x_[b]) / rate;
        theta_max = std::min(theta_max, std::max(r0, 0.0));
      } else {
        theta_max = std::min(theta_max, r);
      }
    }
    int p = -1;
    double best_rate = 0.0, theta = kInf;
    for (std::size_t i = 0; i < m; ++i) {
      const double rate = -dir * column_[i];
      if (std::abs(rate) <= opts_.pivot_tol) continue;
      const auto b = static_cast<std::size_t>(basis_.head[i]);
      const double r = rate < 0.0 ? (x_[b] - lb_[b]) / -rate : (ub_[b] - x_[b]) / rate;
      if (!std::isfinite(r)) continue;
      if (r <= theta_max + (bland_ ? 1e-12 : 0.0)) {
        const bool take = bland_ ? (p < 0 || basis_.head[i] < basis_.head[static_cast<std::size_t>(p)])
                                 : std::abs(rate) > best_rate;
        if (take) {
          best_rate = std::abs(rate);
          p = static_cast<int>(i);
          theta = std::max(r, 0.0);
        }
      }
    }
    const double span = ub_[uq] - lb_[uq];
    if (std::isfinite(span) && span <= theta) {
      // Bound flip of the entering variable, no basis change.
      for (std::size_t i = 0; i < m; ++i) x_[static_cast<std::size_t>(basis_.head[i])] -= dir * span * column_[i];
      basis_.status[uq] = dir > 0.0 ? VarStatus::AtUpper : VarStatus::AtLower;
      x_[uq] = dir > 0.0 ? ub_[uq] : lb_[uq];
      ++total_iterations_;
      ++local;
      continue;
    }
    if (p < 0) return LpStatus::Unbounded;

    const auto up = static_cast<std::size_t>(p);
    const int leaving = basis_.head[up];
    const auto ul = static_cast<std::size_t>(leaving);
    const double rate = -dir * column_[up];
    const bool to_lower = rate < 0.0;

    std::copy(binv_.begin() + static_cast<std::ptrdiff_t>(up * m),
              binv_.begin() + static_cast<std::ptrdiff_t>((up + 1) * m), rho_.begin());
    kernels::pivot_row(opts_.kernels, a_, rho_, alpha_);
    const double aq = column_[up];
    if (std::abs(aq - alpha_[uq]) > 1e-6 * (1.0 + std::abs(aq)) || std::abs(aq) <= opts_.pivot_tol) {
      if (since_refactor_ == 0) return LpStatus::Numerical;
      if (!refresh()) return LpStatus::Numerical;
      if (!primal_feasible()) return iterate_after_loss();
      continue;
    }

    for (std::size_t i = 0; i < m; ++i) x_[static_cast<std::size_t>(basis_.head[i])] -= dir * theta * column_[i];
    x_[uq] += dir * theta;
    x_[ul] = to_lower ? lb_[ul] : ub_[ul];

    const double step = d_[uq] / aq;
    kernels::update_reduced_costs(opts_.kernels, d_, alpha_, step);
    for (int h : basis_.head) d_[static_cast<std::size_t>(h)] = 0.0;
    d_[ul] = -step;
    d_[uq] = 0.0;

    basis_.status[ul] = to_lower ? VarStatus::AtLower : VarStatus::AtUpper;
    basis_.status[uq] = VarStatus::Basic;
    basis_.head[up] = q;
    kernels::pivot_inverse(opts_.kernels, binv_, m_, column_, p);

    ++since_refactor_;
    ++total_iterations_;
    ++local;
    if (theta < 1e-12) {
      if (++degenerate_run_ > 300) bland_ = true;
    } else {
      degenerate_run_ = 0;
    }
  }
}

// Primal feasibility was lost to round-off during the primal phase; fall
// back to the dual method from the current basis.
LpStatus DualSimplex::iterate_after_loss() {
  make_dual_feasible();
  if (dirty_primal_) compute_primal();
  return iterate();
}

LpStatus DualSimplex::iterate() {
  const auto m = static_cast<std::size_t>(m_);
  const double ptol = opts_.primal_tol;
  const double dtol = opts_.dual_tol;
  std::int64_t local = 0;
  double best_obj = -kInf;
  int stalls = 0;
  std::int64_t next_check = opts_.refactor_interval;
  bool verified = false;

  auto refresh = [&]() -> bool {
    if (!refactor()) return false;
    compute_duals();
    make_dual_feasible();
    compute_primal();
    return true;
  };

  while (true) {
    if (local >= opts_.max_iterations) return LpStatus::IterationLimit;
    if (since_refactor_ >= opts_.refactor_interval) {
      if (!refresh()) return LpStatus::Numerical;
    }
    if (local >= next_check) {
      next_check = local + opts_.refactor_interval;
      const double obj = working_objective();
      if (obj > best_obj + 1e-9 * (1.0 + std::abs(obj))) {
        best_obj = obj;
        stalls = 0;
      } else if (++stalls >= 10 && perturbed_) {
        return LpStatus::IterationLimit;
      } else if (stalls >= 5) {
        bland_ = true;
      }
    }

    // Leaving row: largest bound violation among basic variables.
    int p = -1;
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const int j = basis_.head[i];
      const auto u = static_cast<std::size_t>(j);
      double viol = 0.0;
      if (x_[u] < lb_[u] - ptol) viol = lb_[u] - x_[u];
      else if (x_[u] > ub_[u] + ptol) viol = x_[u] - ub_[u];
      if (viol <= 0.0) continue;
      if (bland_) {
        if (p < 0 || j < basis_.head[static_cast<std::size_t>(p)]) p = static_cast<int>(i);
      } else if (viol > worst) {
        worst = viol;
        p = static_cast<int>(i);
      }
    }

    if (p < 0) {
      if (since_refactor_ > 0 && !verified) {
        verified = true;
        if (!refresh()) return LpStatus::Numerical;
        continue;
      }
      bool boxed = false;
      for (int j = 0; j < n_ + m_; ++j) {
        const auto u = static_cast<std::size_t>(j);
        if (basis_.status[u] != VarStatus::Basic && artificial_[u]) boxed = true;
      }
      if (boxed) {
        if (box_ >= kMaxBox) return LpStatus::Unbounded;
        box_ *= 100.0;
        compute_primal();
        verified = false;
        continue;
      }
      return LpStatus::Optimal;
    }
    verified = false;

    const auto up = static_cast<std::size_t>(p);
    const int leaving = basis_.head[up];
    const auto ul = static_cast<std::size_t>(leaving);
    const bool below = x_[ul] < lb_[ul];
    const double bound = below ? lb_[ul] : ub_[ul];
    const double delta = x_[ul] - bound;

    std::copy(binv_.begin() + static_cast<std::ptrdiff_t>(up * m),
              binv_.begin() + static_cast<std::ptrdiff_t>((up + 1) * m), rho_.begin());
    kernels::pivot_row(opts_.kernels, a_, rho_, alpha_);

    // Harris two-pass ratio test on the dual step.
    int q = -1;
    double theta_max = kInf;
    auto eligible = [&](std::size_t u, double& dj) -> bool {
      const VarStatus s = basis_.status[u];
      if (s == VarStatus::Basic) return false;
      if (std::isfinite(lb_[u]) && lb_[u] == ub_[u]) return false;
      const double a = alpha_[u];
      if (std::abs(a) <= opts_.pivot_tol) return false;
      // Direction in which moving this variable repairs the leaving row.
      const bool increase_ok = below ? a < 0.0 : a > 0.0;
      if (s == VarStatus::AtLower) {
        if (!increase_ok) return false;
        dj = std::max(d_[u], 0.0);
      } else if (s == VarStatus::AtUpper) {
        if (increase_ok) return false;
        dj = std::max(-d_[u], 0.0);
      } else {
        dj = std::abs(d_[u]);
      }
      return true;
    };
    const std::size_t N = static_cast<std::size_t>(n_ + m_);
    for (std::size_t u = 0; u < N; ++u) {
      double dj = 0.0;
      if (!eligible(u, dj)) continue;
      const double r = bland_ ? dj / std::abs(alpha_[u]) : (dj + dtol) / std::abs(alpha_[u]);
      theta_max = std::min(theta_max, r);
    }
    double best_alpha = 0.0;
    for (std::size_t u = 0; u < N; ++u) {
      double dj = 0.0;
      if (!eligible(u, dj)) continue;
      const double r = dj / std::abs(alpha_[u]);
      if (bland_) {
        if (r <= theta_max + 1e-12) {
          q = static_cast<int>(u);
          break;
        }
      } else if (r <= theta_max && std::abs(alpha_[u]) > best_alpha) {
        best_alpha = std::abs(alpha_[u]);
        q = static_cast<int>(u);
      }
    }
    if (q < 0) {
      if (since_refactor_ > 0) {
        if (!refresh()) return LpStatus::Numerical;
        continue;
      }
      return LpStatus::Infeasible;
    }

    const auto uq = static_cast<std::size_t>(q);
    ftran(q, column_);
    const double aq = column_[up];
    if (std::abs(aq - alpha_[uq]) > 1e-6 * (1.0 + std::abs(aq)) || std::abs(aq) <= opts_.pivot_tol) {
      if (since_refactor_ == 0) return LpStatus::Numerical;
      if (!refresh()) return LpStatus::Numerical;
      continue;
    }

    const double step = d_[uq] / aq;
    kernels::update_reduced_costs(opts_.kernels, d_, alpha_, step);
    for (int h : basis_.head) d_[static_cast<std::size_t>(h)] = 0.0;
    d_[ul] = -step;
    d_[uq] = 0.0;

    const double theta = delta / aq;
    for (std::size_t i = 0; i < m; ++i) x_[static_cast<std::size_t>(basis_.head[i])] -= theta * column_[i];
    x_[uq] += theta;
    x_[ul] = bound;

    basis_.status[ul] = below ? VarStatus::AtLower : VarStatus::AtUpper;
    artificial_[ul] = false;
    basis_.status[uq] = VarStatus::Basic;
    artificial_[uq] = false;
    basis_.head[up] = q;
    kernels::pivot_inverse(opts_.kernels, binv_, m_, column_, p);

    ++since_refactor_;
    ++total_iterations_;
    ++local;
    if (std::abs(step) < 1e-12) {
      if (++degenerate_run_ > 300) bland_ = true;
    } else {
      degenerate_run_ = 0;
    }
  }
}

double DualSimplex::working_objective() const {
  double s = 0.0;
  for (int j = 0; j < n_ + m_; ++j) s += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
  return s;
}

double DualSimplex::objective() const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
  return sense_sign_ * s;
}

std::vector<double> DualSimplex::primal() const {
  std::vector<double> x(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    x[u] = x_[u] * col_scale_[u];
  }
  return x;
}

LpSolution DualSimplex::solution() const {
  LpSolution s;
  s.status = status_;
  s.iterations = total_iterations_;
  s.x = primal();
  s.objective = objective();
  s.duals.resize(static_cast<std::size_t>(m_));
  s.row_activity.resize(static_cast<std::size_t>(m_));
  s.reduced_costs.resize(static_cast<std::size_t>(n_));
  for (int i = 0; i < m_; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const auto l = static_cast<std::size_t>(n_ + i);
    s.duals[u] = sense_sign_ * d_[l] * row_scale_[u];
    s.row_activity[u] = x_[l] / row_scale_[u];
  }
  for (int j = 0; j < n_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    s.reduced_costs[u] = sense_sign_ * d_[u] / col_scale_[u];
  }
  return s;
}

}  // namespace mmimo::milp
