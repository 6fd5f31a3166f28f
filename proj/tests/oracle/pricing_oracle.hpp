#pragma once

// Exhaustive pricing oracle for small instances. Uplink and downlink role
// sets are enumerated separately; each subset is judged with the exact SINR
// expressions, using the closed-form coefficients for fair and static power
// and a feasibility LP over the coefficients for optimized power.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mmimo/milp/lp.hpp"
#include "mmimo/model.hpp"
#include "mmimo/power.hpp"

namespace oracle {

using namespace mmimo;

inline std::vector<int> subset(int mask, int K) {
  std::vector<int> s;
  for (int k = 0; k < K; ++k)
    if (mask >> k & 1) s.push_back(k);
  return s;
}

inline bool sinr_ok(const Instance& inst, Precoder pc, Direction dir, const std::vector<int>& set,
                    const PowerVector& pw) {
  const std::vector<int> none;
  for (int k : set) {
    const double s = dir == Direction::Up ? effective_sinr(inst, pc, dir, set, none, pw, k)
                                          : effective_sinr(inst, pc, dir, none, set, pw, k);
    if (s < inst.device(k).sinr_threshold * (1.0 - 1e-9)) return false;
  }
  return true;
}

// Is there eta in [0,1]^|set| (summing to <= 1 on the downlink) meeting
// every threshold? The SINR constraints are linear in eta for fixed sets.
inline bool lp_feasible(const Instance& inst, Precoder pc, Direction dir, const std::vector<int>& set) {
  const int n = static_cast<int>(set.size());
  const double M = inst.params.num_antennas;
  const double g = pc == Precoder::MRC ? M : M - n;
  if (g <= 0) return false;
  const bool up = dir == Direction::Up;
  const double rho = up ? inst.params.uplink_snr : inst.params.downlink_snr;
  milp::LinearProgram lp;
  for (int i = 0; i < n; ++i) lp.add_var(0, 1, 1);
  auto leak = [&](int k) {
    const Device& d = inst.device(k);
    return pc == Precoder::MRC ? d.beta : d.beta - d.gamma;
  };
  for (int i = 0; i < n; ++i) {
    const Device& d = inst.device(set[i]);
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < n; ++j) {
      double a = up ? -d.sinr_threshold * rho * leak(set[j]) : -d.sinr_threshold * rho * leak(set[i]);
      if (i == j) a += g * rho * d.gamma;
      row.emplace_back(j, a);
    }
    lp.add_constraint(row, milp::Sense::Ge, d.sinr_threshold);
  }
  if (!up) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < n; ++j) row.emplace_back(j, 1.0);
    lp.add_constraint(row, milp::Sense::Le, 1.0);
  }
  return milp::solve_lp(lp).status == milp::LpStatus::Optimal;
}

inline bool side_feasible(const Instance& inst, Precoder pc, PowerScheme sch, Direction dir,
                          const std::vector<int>& set) {
  if (set.empty()) return true;
  const int K = inst.size();
  if (pc == Precoder::ZF && static_cast<int>(set.size()) >= inst.params.num_antennas) return false;
  PowerVector pw = PowerVector::zeros(K);
  const bool up = dir == Direction::Up;
  switch (sch) {
    case PowerScheme::Optimal:
      return lp_feasible(inst, pc, dir, set);
    case PowerScheme::Downlink:
      if (!up) return lp_feasible(inst, pc, dir, set);
      for (int k : set) pw.up[k] = 1.0;
      return sinr_ok(inst, pc, dir, set, pw);
    case PowerScheme::Fair:
      if (up) pw.up = fair_uplink(inst, set);
      else pw.down = fair_downlink(inst, set, pc);
      return sinr_ok(inst, pc, dir, set, pw);
    case PowerScheme::Static: {
      const PowerVector s = static_coeffs(inst);
      pw = s;
      if (!up) {
        double total = 0;
        for (int k : set) total += s.down[k];
        if (total > 1.0 + 1e-9) return false;
        for (int k = 0; k < K; ++k)
          if (std::find(set.begin(), set.end(), k) == set.end()) pw.down[k] = 0;
      }
      return sinr_ok(inst, pc, dir, set, pw);
    }
  }
  return false;
}

struct Best {
  double value = 0.0;
  int tx_mask = 0;
  int rx_mask = 0;
};

inline Best best_price(const Instance& inst, Precoder pc, PowerScheme sch, const std::vector<double>& pu,
                       const std::vector<double>& pd) {
  const int K = inst.size();
  const int full = 1 << K;
  std::vector<double> vu(full, -1.0), vd(full, -1.0);
  for (int m = 0; m < full; ++m) {
    const auto s = subset(m, K);
    double a = 0, b = 0;
    for (int k : s) {
      a += pu[k];
      b += pd[k];
    }
    if (side_feasible(inst, pc, sch, Direction::Up, s)) vu[m] = a;
    if (side_feasible(inst, pc, sch, Direction::Down, s)) vd[m] = b;
  }
  Best best;
  for (int t = 0; t < full; ++t) {
    if (vu[t] < 0) continue;
    for (int r = 0; r < full; ++r) {
      if (vd[r] < 0) continue;
      if (__builtin_popcount(static_cast<unsigned>(t | r)) > inst.params.num_pilots) continue;
      if (vu[t] + vd[r] > best.value) best = {vu[t] + vd[r], t, r};
    }
  }
  return best;
}

}  // namespace oracle
