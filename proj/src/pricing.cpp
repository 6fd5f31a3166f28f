#include "mmimo/pricing.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <functional>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mmimo/errors.hpp"

namespace mmimo {

namespace {

using milp::Sense;
using milp::VarType;

constexpr double kFeasTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double leak_of(const Device& d, Precoder p) { return p == Precoder::MRC ? d.beta : d.beta - d.gamma; }

// Closed-form feasibility of one side of a compatible set. Every scheme gives
// a downward-closed family, which the search relies on.
class SideCheck {
 public:
  SideCheck(const Instance& inst, Precoder precoder, PowerScheme scheme)
      : inst_(inst), precoder_(precoder), scheme_(scheme) {
    const PowerVector s = static_coeffs(inst);
    static_ = s.up;
    for (const Device& d : inst.devices) leak_.push_back(leak_of(d, precoder));
  }

  // Members are `set` plus `extra` when extra >= 0.
  bool up_ok(const std::vector<int>& set, int extra = -1) const {
    const int n = static_cast<int>(set.size()) + (extra >= 0 ? 1 : 0);
    if (n == 0) return true;
    const double g = gain(n);
    if (g <= 0.0) return false;
    const double rho = inst_.params.uplink_snr;
    switch (scheme_) {
      case PowerScheme::Optimal: {
        double load = 0.0, worst = 0.0;
        each(set, extra, [&](int j) {
          const Device& d = inst_.devices[static_cast<std::size_t>(j)];
          const double a = d.sinr_threshold / (g * rho * d.gamma);
          load += leak_[static_cast<std::size_t>(j)] * a;
          worst = std::max(worst, a);
        });
        const double slack = 1.0 - rho * load;
        return slack > 0.0 && worst / slack <= 1.0 + kFeasTol;
      }
      case PowerScheme::Downlink: {
        double sum = 0.0;
        each(set, extra, [&](int j) { sum += leak_[static_cast<std::size_t>(j)]; });
        const double denom = 1.0 + rho * sum;
        bool ok = true;
        each(set, extra, [&](int k) {
          const Device& d = inst_.devices[static_cast<std::size_t>(k)];
          if (g * rho * d.gamma < d.sinr_threshold * denom * (1.0 - kFeasTol)) ok = false;
        });
        return ok;
      }
      case PowerScheme::Fair: {
        double phi = kInf, sum = 0.0, mu = 0.0;
        each(set, extra, [&](int j) {
          const Device& d = inst_.devices[static_cast<std::size_t>(j)];
          phi = std::min(phi, d.gamma);
          sum += leak_[static_cast<std::size_t>(j)] / d.gamma;
          mu = std::max(mu, d.sinr_threshold);
        });
        return g * rho * phi >= mu * (1.0 + rho * phi * sum) * (1.0 - kFeasTol);
      }
      case PowerScheme::Static: {
        double sum = 0.0;
        each(set, extra, [&](int j) {
          sum += leak_[static_cast<std::size_t>(j)] * static_[static_cast<std::size_t>(j)];
        });
        const double denom = 1.0 + rho * sum;
        bool ok = true;
        each(set, extra, [&](int k) {
          const Device& d = inst_.devices[static_cast<std::size_t>(k)];
          if (g * rho * d.gamma * static_[static_cast<std::size_t>(k)] <
              d.sinr_threshold * denom * (1.0 - kFeasTol))
            ok = false;
        });
        return ok;
      }
    }
    return false;
  }

  bool down_ok(const std::vector<int>& set, int extra = -1) const {
    const int n = static_cast<int>(set.size()) + (extra >= 0 ? 1 : 0);
    if (n == 0) return true;
    const double g = gain(n);
    if (g <= 0.0) return false;
    const double rho = inst_.params.downlink_snr;
    switch (scheme_) {
      case PowerScheme::Optimal:
      case PowerScheme::Downlink: {
        double sb = 0.0, sc = 0.0;
        each(set, extra, [&](int j) {
          const Device& d = inst_.devices[static_cast<std::size_t>(j)];
          const double b = d.sinr_threshold / (g * rho * d.gamma);
          sb += b;
          sc += rho * b * leak_[static_cast<std::size_t>(j)];
        });
        return sc < 1.0 && sb / (1.0 - sc) <= 1.0 + kFeasTol;
      }
      case PowerScheme::Fair: {
        double A = 0.0, mu = 0.0;
        each(set, extra, [&](int j) {
          const Device& d = inst_.devices[static_cast<std::size_t>(j)];
          A += 1.0 / (rho * d.gamma) + leak_[static_cast<std::size_t>(j)] / d.gamma;
          mu = std::max(mu, d.sinr_threshold);
        });
        return g >= mu * A * (1.0 - kFeasTol);
      }
      case PowerScheme::Static: {
        double total = 0.0;
        each(set, extra, [&](int j) { total += static_[static_cast<std::size_t>(j)]; });
        if (total > 1.0 + kFeasTol) return false;
        bool ok = true;
        each(set, extra, [&](int k) {
          const Device& d = inst_.devices[static_cast<std::size_t>(k)];
          const double lhs = g * rho * d.gamma * static_[static_cast<std::size_t>(k)];
          const double rhs = d.sinr_threshold * (1.0 + rho * leak_[static_cast<std::size_t>(k)] * total);
          if (lhs < rhs * (1.0 - kFeasTol)) ok = false;
        });
        return ok;
      }
    }
    return false;
  }

 private:
  double gain(int n) const {
    const int M = inst_.params.num_antennas;
    return precoder_ == Precoder::MRC ? static_cast<double>(M) : static_cast<double>(M - n);
  }

  template <class F>
  static void each(const std::vector<int>& set, int extra, F&& f) {
    for (int j : set) f(j);
    if (extra >= 0) f(extra);
  }

  const Instance& inst_;
  Precoder precoder_;
  PowerScheme scheme_;
  std::vector<double> static_;
  std::vector<double> leak_;
};

void check_duals(const Instance& inst, const DualPrices& duals) {
  const auto K = static_cast<std::size_t>(inst.size());
  if (duals.up.size() != K || duals.down.size() != K)
    throw PreconditionError("dual vector size does not match the device count");
  for (std::size_t k = 0; k < K; ++k)
    if (!(duals.up[k] >= 0.0) || !(duals.down[k] >= 0.0) || !std::isfinite(duals.up[k]) ||
        !std::isfinite(duals.down[k]))
      throw PreconditionError("dual prices must be finite and non-negative (device " +
                              std::to_string(k) + ")");
}

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

DualPrices DualPrices::zeros(int num_devices) {
  DualPrices d;
  d.up.assign(static_cast<std::size_t>(num_devices), 0.0);
  d.down.assign(static_cast<std::size_t>(num_devices), 0.0);
  return d;
}

double DualPrices::value(const CompatibleSet& c) const {
  double v = 0.0;
  for (int k : c.tx) v += up.at(static_cast<std::size_t>(k));
  for (int k : c.rx) v += down.at(static_cast<std::size_t>(k));
  return v;
}

std::string_view to_string(PricingEngine e) { return e == PricingEngine::Search ? "search" : "mip"; }

PricingEngine parse_pricing_engine(std::string_view s) {
  if (s == "search") return PricingEngine::Search;
  if (s == "mip") return PricingEngine::Mip;
  throw FormatError("unknown pricing engine '" + std::string(s) + "'");
}

std::optional<PowerVector> scheme_powers(const Instance& inst, Precoder precoder,
                                         PowerScheme scheme, std::span<const int> tx,
                                         std::span<const int> rx) {
  const std::vector<int> t(tx.begin(), tx.end());
  const std::vector<int> r(rx.begin(), rx.end());
  const SideCheck check(inst, precoder, scheme);
  std::vector<int> members;
  std::set_union(t.begin(), t.end(), r.begin(), r.end(), std::back_inserter(members));
  if (static_cast<int>(members.size()) > inst.params.num_pilots) return std::nullopt;
  if (!check.up_ok(t) || !check.down_ok(r)) return std::nullopt;

  PowerVector p = PowerVector::zeros(inst.size());
  switch (scheme) {
    case PowerScheme::Optimal:
    case PowerScheme::Downlink: {
      if (scheme == PowerScheme::Optimal) {
        auto up = minimal_uplink_power(inst, precoder, tx);
        if (!up) return std::nullopt;
        p.up = std::move(*up);
      } else {
        for (int k : t) p.up[static_cast<std::size_t>(k)] = 1.0;
      }
      auto down = minimal_downlink_power(inst, precoder, rx);
      if (!down) return std::nullopt;
      p.down = std::move(*down);
      break;
    }
    case PowerScheme::Fair: {
      const auto up = fair_uplink(inst, tx);
      for (int k : t) p.up[static_cast<std::size_t>(k)] = up[static_cast<std::size_t>(k)];
      p.down = fair_downlink(inst, rx, precoder);
      break;
    }
    case PowerScheme::Static: {
      const PowerVector s = static_coeffs(inst);
      for (int k : t) p.up[static_cast<std::size_t>(k)] = s.up[static_cast<std::size_t>(k)];
      for (int k : r) p.down[static_cast<std::size_t>(k)] = s.down[static_cast<std::size_t>(k)];
      break;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Search engine

namespace {

// Devices with identical beta, gamma and threshold are interchangeable for
// feasibility, so the search works on classes of such devices. A dynamic
// program inside each class gives the best dual value for every count of
// transmitters, receivers and pilots; a depth-first search over classes then
// picks one such option per class.
struct Option {
  int t = 0;
  int r = 0;
  int m = 0;
  double value = 0.0;
};

struct DeviceClass {
  std::vector<int> members;  // device ids, in dynamic-program order
  std::vector<double> pu, pd;
  std::vector<Option> options;  // value descending, always includes the empty option
  double a = 0.0;               // uplink knapsack weight of one member
  double b = 0.0;               // downlink knapsack weight of one member
  int cap = 0;                  // max of t, r, m considered
  std::vector<double> dp;       // (i, t, r, m) -> best value
  std::vector<std::int8_t> how; // role of member i-1 in the best (i, t, r, m)

  std::size_t at(int i, int t, int r, int m) const {
    const auto n = static_cast<std::size_t>(cap + 1);
    return ((static_cast<std::size_t>(i) * n + static_cast<std::size_t>(t)) * n +
            static_cast<std::size_t>(r)) * n + static_cast<std::size_t>(m);
  }
};

class ClassSearch {
 public:
  ClassSearch(const Instance& inst, Precoder precoder, PowerScheme scheme, const DualPrices& duals,
              double threshold, double time_limit_s)
      : inst_(inst), check_(inst, precoder, scheme), best_(threshold), limit_(time_limit_s) {
    pilots_ = inst.params.num_pilots;
    setup_knapsacks(precoder, scheme);
    for (const Device& d : inst.devices) {
      const auto k = static_cast<std::size_t>(d.id);
      double pu = duals.up[k];
      double pd = duals.down[k];
      if (pu > 0.0 && !check_.up_ok({}, d.id)) pu = 0.0;
      if (pd > 0.0 && !check_.down_ok({}, d.id)) pd = 0.0;
      if (pu <= 0.0 && pd <= 0.0) continue;
      DeviceClass* cls = nullptr;
      for (DeviceClass& c : classes_) {
        const Device& e = inst.device(c.members.front());
        if (e.beta == d.beta && e.gamma == d.gamma && e.sinr_threshold == d.sinr_threshold) {
          cls = &c;
          break;
        }
      }
      if (!cls) {
        classes_.emplace_back();
        cls = &classes_.back();
        cls->a = up_.w[k];
        cls->b = down_.w[k];
      }
      cls->members.push_back(d.id);
      cls->pu.push_back(pu);
      cls->pd.push_back(pd);
    }
    for (DeviceClass& c : classes_) build_options(c);
    std::stable_sort(classes_.begin(), classes_.end(), [](const DeviceClass& x, const DeviceClass& y) {
      return x.options.front().value > y.options.front().value;
    });
    const std::size_t C = classes_.size();
    chosen_.assign(C, Option{});
    best_choice_.assign(C, Option{});
    mult_.assign(C + 1, {0.0, 0.0, 0.0});
    t0_ = std::chrono::steady_clock::now();
  }

  void run() { dfs(0, 0.0, 0); }

  bool found() const { return found_; }
  bool timed_out() const { return timed_out_; }

  // Device sets of the best choice.
  void best_sets(std::vector<int>& tx, std::vector<int>& rx) const {
    tx.clear();
    rx.clear();
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      const DeviceClass& cl = classes_[c];
      int t = best_choice_[c].t, r = best_choice_[c].r, m = best_choice_[c].m;
      for (int i = static_cast<int>(cl.members.size()); i > 0 && m > 0; --i) {
        const int role = cl.how[cl.at(i, t, r, m)];
        const bool rt = role & 2, rr = role & 1;
        if (rt) tx.push_back(cl.members[static_cast<std::size_t>(i - 1)]);
        if (rr) rx.push_back(cl.members[static_cast<std::size_t>(i - 1)]);
        t -= rt;
        r -= rr;
        m -= role != 0;
      }
    }
    std::sort(tx.begin(), tx.end());
    std::sort(rx.begin(), rx.end());
  }

 private:
  void build_options(DeviceClass& c) {
    const int s = static_cast<int>(c.members.size());
    c.cap = std::min(pilots_, s);
    const int n = c.cap;
    c.dp.assign(c.at(s, n, n, n) + 1, -kInf);
    c.how.assign(c.dp.size(), 0);
    c.dp[c.at(0, 0, 0, 0)] = 0.0;
    for (int i = 0; i < s; ++i) {
      const double pu = c.pu[static_cast<std::size_t>(i)], pd = c.pd[static_cast<std::size_t>(i)];
      for (int t = 0; t <= n; ++t)
        for (int r = 0; r <= n; ++r)
          for (int m = 0; m <= n; ++m) {
            const double v = c.dp[c.at(i, t, r, m)];
            if (v == -kInf) continue;
            for (int role = 0; role < 4; ++role) {
              const int dt = role >> 1, dr = role & 1, dm = role != 0;
              if ((dt && pu <= 0.0) || (dr && pd <= 0.0)) continue;
              if (t + dt > n || r + dr > n || m + dm > n) continue;
              const double nv = v + (dt ? pu : 0.0) + (dr ? pd : 0.0);
              const std::size_t to = c.at(i + 1, t + dt, r + dr, m + dm);
              if (nv > c.dp[to]) {
                c.dp[to] = nv;
                c.how[to] = static_cast<std::int8_t>(role);
              }
            }
          }
    }
    for (int t = 0; t <= n; ++t)
      for (int r = 0; r <= n; ++r) {
        double prev = -kInf;
        for (int m = std::max(t, r); m <= std::min(n, t + r); ++m) {
          const double v = c.dp[c.at(s, t, r, m)];
          if (v > prev + 1e-15) {
            c.options.push_back(Option{t, r, m, v});
            prev = v;
          }
        }
      }
    std::stable_sort(c.options.begin(), c.options.end(),
                     [](const Option& x, const Option& y) { return x.value > y.value; });
  }

  // Largest counts of class c that can still join each side.
  void limits(const DeviceClass& c, int room, int& tmax, int& rmax) {
    tmax = 0;
    rmax = 0;
    const int n = std::min(c.cap, room);
    const std::size_t base_t = tx_.size(), base_r = rx_.size();
    for (int t = 1; t <= n; ++t) {
      tx_.push_back(c.members[static_cast<std::size_t>(t - 1)]);
      if (!check_.up_ok(tx_)) break;
      tmax = t;
    }
    tx_.resize(base_t);
    for (int r = 1; r <= n; ++r) {
      rx_.push_back(c.members[static_cast<std::size_t>(r - 1)]);
      if (!check_.down_ok(rx_)) break;
      rmax = r;
    }
    rx_.resize(base_r);
  }

  void record(double value) {
    if (value > best_ + 1e-12) {
      best_ = value;
      best_choice_ = chosen_;
      found_ = true;
    }
  }

  void dfs(std::size_t c, double value, int used) {
    if (timed_out_) return;
    if ((++nodes_ & 255) == 0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count() > limit_) {
      timed_out_ = true;
      return;
    }
    record(value);
    if (c == classes_.size() || used == pilots_) return;
    const int room = pilots_ - used;

    // Per-class limits for the bound; the first entry is this class.
    lim_.resize(classes_.size());
    for (std::size_t j = c; j < classes_.size(); ++j) limits(classes_[j], room, lim_[j].first, lim_[j].second);
    if (prunable(c, value, room)) return;
    const int tmax = lim_[c].first, rmax = lim_[c].second;

    const DeviceClass& cl = classes_[c];
    const std::size_t base_t = tx_.size(), base_r = rx_.size();
    for (const Option& o : cl.options) {
      if (o.m > room || o.t > tmax || o.r > rmax) continue;
      if (value + o.value + rest_bound(c + 1, room - o.m) <= best_ + 1e-12) continue;
      for (int i = 0; i < o.t; ++i) tx_.push_back(cl.members[static_cast<std::size_t>(i)]);
      for (int i = 0; i < o.r; ++i) rx_.push_back(cl.members[static_cast<std::size_t>(i)]);
      chosen_[c] = o;
      if (c + 1 == classes_.size()) {
        record(value + o.value);
      } else {
        dfs(c + 1, value + o.value, used + o.m);
      }
      chosen_[c] = Option{};
      tx_.resize(base_t);
      rx_.resize(base_r);
      if (timed_out_) return;
    }
  }

  // Sum over classes >= c of their best option using at most `room`
  // pilots each, ignoring feasibility. Cheap filter for the option loop.
  double rest_bound(std::size_t c, int room) {
    double s = 0.0;
    for (std::size_t j = c; j < classes_.size(); ++j) {
      for (const Option& o : classes_[j].options) {
        if (o.m <= room) {
          s += o.value;
          break;
        }
      }
    }
    return s;
  }

  // Lagrangian dual of the relaxation of the remaining problem: uplink and
  // downlink knapsacks and the pilot count are priced by (lam, nu, kappa),
  // leaving a separable choice of one option per class.
  double dual_value(std::size_t c, const std::array<double, 3>& x, double capu, double capd,
                    int room) const {
    double s = x[0] * capu + x[1] * capd + x[2] * room;
    for (std::size_t j = c; j < classes_.size(); ++j) {
      const DeviceClass& cl = classes_[j];
      double best = 0.0;
      for (const Option& o : cl.options) {
        if (o.m > room || o.t > lim_[j].first || o.r > lim_[j].second) continue;
        best = std::max(best, o.value - x[0] * o.t * cl.a - x[1] * o.r * cl.b - x[2] * o.m);
      }
      s += best;
    }
    return s;
  }

  bool prunable(std::size_t c, double value, int room) {
    const double target = best_ + 1e-12 - value;
    const double capu = residual(up_, tx_);
    const double capd = residual(down_, rx_);
    std::array<double, 3>& x = mult_[c];
    double cur = dual_value(c, x, capu, capd, room);
    if (cur <= target) return true;
    std::array<double, 3> hi{0.0, 0.0, 0.0};
    for (std::size_t j = c; j < classes_.size(); ++j) {
      for (const Option& o : classes_[j].options) {
        if (o.t > 0 && classes_[j].a > 0.0) hi[0] = std::max(hi[0], o.value / (o.t * classes_[j].a));
        if (o.r > 0 && classes_[j].b > 0.0) hi[1] = std::max(hi[1], o.value / (o.r * classes_[j].b));
        if (o.m > 0) hi[2] = std::max(hi[2], o.value / o.m);
      }
    }
    for (int round = 0; round < 4; ++round) {
      const double before = cur;
      for (int k = 0; k < 3; ++k) {
        x[static_cast<std::size_t>(k)] = line_min(
            [&](double v) {
              std::array<double, 3> y = x;
              y[static_cast<std::size_t>(k)] = v;
              return dual_value(c, y, capu, capd, room);
            },
            hi[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(k)], cur);
        if (cur <= target) return true;
      }
      if (before - cur < 1e-3 * (before - target)) break;
    }
    if (c + 1 < mult_.size()) mult_[c + 1] = x;
    return false;
  }

  // Golden-section search of a convex function on [0, hi]; returns the best
  // point seen, keeping x when nothing improves on fx.
  template <class F>
  static double line_min(F&& f, double hi, double x, double& fx) {
    if (hi <= 0.0) return x;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, up = hi;
    double x1 = up - g * (up - lo), x2 = lo + g * (up - lo);
    double f1 = f(x1), f2 = f(x2);
    double bx = x, bf = fx;
    for (int it = 0; it < 24; ++it) {
      if (f1 < bf) {
        bf = f1;
        bx = x1;
      }
      if (f2 < bf) {
        bf = f2;
        bx = x2;
      }
      if (f1 <= f2) {
        up = x2;
        x2 = x1;
        f2 = f1;
        x1 = up - g * (up - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (up - lo);
        f2 = f(x2);
      }
    }
    const double f0 = f(0.0);
    if (f0 < bf) {
      bf = f0;
      bx = 0.0;
    }
    fx = bf;
    return bx;
  }

  // Each side's feasible family is contained in {sum of w over members <= cap},
  // where w does not depend on the set and cap is linear in the array gain and
  // can only shrink as members are added.
  struct Knapsack {
    std::vector<double> w;  // per device
    std::function<double(const std::vector<int>&, double)> cap;
  };

  double residual(const Knapsack& ks, const std::vector<int>& set) const {
    const int M = inst_.params.num_antennas;
    const double g = gain_zf_ ? static_cast<double>(M - static_cast<int>(set.size()) - 1)
                              : static_cast<double>(M);
    double cap = ks.cap(set, g);
    cap += 1e-6 * std::abs(cap) + 1e-12;
    for (int j : set) cap -= ks.w[static_cast<std::size_t>(j)];
    return std::max(cap, 0.0);
  }

  void setup_knapsacks(Precoder precoder, PowerScheme scheme) {
    const SystemParams& sp = inst_.params;
    const double ru = sp.uplink_snr, rd = sp.downlink_snr;
    const auto K = static_cast<std::size_t>(inst_.size());
    const PowerVector st = static_coeffs(inst_);
    std::vector<double> leak(K), gam(K), mu(K);
    double gmin = kInf, mu_lo = kInf, gam_hi = 0.0, snr_hi = 0.0;
    for (const Device& d : inst_.devices) {
      const auto k = static_cast<std::size_t>(d.id);
      leak[k] = leak_of(d, precoder);
      gam[k] = d.gamma;
      mu[k] = d.sinr_threshold;
      gmin = std::min(gmin, d.gamma);
      mu_lo = std::min(mu_lo, d.sinr_threshold);
      gam_hi = std::max(gam_hi, d.gamma);
      snr_hi = std::max(snr_hi, d.gamma / d.sinr_threshold);
    }
    const auto mu_of = [mu, mu_lo](const std::vector<int>& set) {
      double m = mu_lo;
      for (int j : set) m = std::max(m, mu[static_cast<std::size_t>(j)]);
      return m;
    };
    up_.w.assign(K, 0.0);
    down_.w.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      switch (scheme) {
        case PowerScheme::Optimal: up_.w[k] = leak[k] * mu[k] / gam[k]; break;
        case PowerScheme::Downlink: up_.w[k] = ru * leak[k]; break;
        case PowerScheme::Fair: up_.w[k] = leak[k] / gam[k]; break;
        case PowerScheme::Static: up_.w[k] = ru * leak[k] * st.up[k]; break;
      }
      switch (scheme) {
        case PowerScheme::Optimal:
        case PowerScheme::Downlink: down_.w[k] = mu[k] * (1.0 + rd * leak[k]) / (rd * gam[k]); break;
        case PowerScheme::Fair: down_.w[k] = 1.0 / (rd * gam[k]) + leak[k] / gam[k]; break;
        case PowerScheme::Static: down_.w[k] = st.down[k]; break;
      }
    }
    switch (scheme) {
      case PowerScheme::Optimal:
        up_.cap = [=](const std::vector<int>& set, double g) {
          double worst = 0.0;
          for (int j : set) worst = std::max(worst, mu[static_cast<std::size_t>(j)] / (ru * gam[static_cast<std::size_t>(j)]));
          return g - worst;
        };
        break;
      case PowerScheme::Downlink:
        up_.cap = [=](const std::vector<int>& set, double g) {
          double c = g * ru * snr_hi;
          for (int j : set) c = std::min(c, g * ru * gam[static_cast<std::size_t>(j)] / mu[static_cast<std::size_t>(j)]);
          return c - 1.0;
        };
        break;
      case PowerScheme::Fair:
        up_.cap = [=](const std::vector<int>& set, double g) {
          double phi = gam_hi;
          for (int j : set) phi = std::min(phi, gam[static_cast<std::size_t>(j)]);
          return g / mu_of(set) - 1.0 / (ru * phi);
        };
        break;
      case PowerScheme::Static:
        up_.cap = [=](const std::vector<int>& set, double g) { return g * ru * gmin / mu_of(set) - 1.0; };
        break;
    }
    switch (scheme) {
      case PowerScheme::Optimal:
      case PowerScheme::Downlink:
        down_.cap = [](const std::vector<int>&, double g) { return g; };
        break;
      case PowerScheme::Fair:
        down_.cap = [=](const std::vector<int>& set, double g) { return g / mu_of(set); };
        break;
      case PowerScheme::Static:
        down_.cap = [=](const std::vector<int>& set, double g) {
          double c = 1.0;
          for (int j : set) {
            const auto u = static_cast<std::size_t>(j);
            if (leak[u] > 0.0) c = std::min(c, (g * rd * gmin / mu[u] - 1.0) / (rd * leak[u]));
          }
          return c;
        };
        break;
    }
    gain_zf_ = precoder == Precoder::ZF;
  }

  const Instance& inst_;
  SideCheck check_;
  int pilots_ = 0;
  std::vector<DeviceClass> classes_;
  std::vector<Option> chosen_, best_choice_;
  std::vector<std::pair<int, int>> lim_;
  std::vector<std::array<double, 3>> mult_;  // multipliers per class depth
  std::vector<int> tx_, rx_;
  double best_;
  bool found_ = false;
  bool timed_out_ = false;
  double limit_;
  std::int64_t nodes_ = 0;
  std::chrono::steady_clock::time_point t0_;
  Knapsack up_, down_;
  bool gain_zf_ = false;
};

std::optional<Candidate> make_candidate(const Instance& inst, Precoder precoder,
                                        PowerScheme scheme, const DualPrices& duals,
                                        std::vector<int> tx, std::vector<int> rx) {
  std::sort(tx.begin(), tx.end());
  std::sort(rx.begin(), rx.end());
  auto powers = scheme_powers(inst, precoder, scheme, tx, rx);
  if (!powers) return std::nullopt;
  Candidate c;
  c.cset = make_cset(std::move(tx), std::move(rx), *powers);
  c.price = duals.value(c.cset);
  return c;
}

}  // namespace

std::optional<Candidate> search_pricing(const Instance& inst, Precoder precoder,
                                        PowerScheme scheme, const DualPrices& duals,
                                        double threshold, double time_limit_s) {
  check_duals(inst, duals);
  ClassSearch s(inst, precoder, scheme, duals, threshold, time_limit_s);
  s.run();
  if (!s.found()) {
    if (s.timed_out()) throw PricingInconclusiveError("pricing search timed out without a candidate");
    if (threshold == -kInf) {
      Candidate c;
      c.status = "optimal";
      return c;
    }
    return std::nullopt;
  }
  std::vector<int> tx, rx;
  s.best_sets(tx, rx);
  auto c = make_candidate(inst, precoder, scheme, duals, std::move(tx), std::move(rx));
  if (!c) throw ModelError("search produced a set the power scheme rejects");
  c->status = s.timed_out() ? "timeout_with_incumbent" : "optimal";
  c->proven = !s.timed_out();
  return c;
}

// ---------------------------------------------------------------------------
// MIP engine

PricingModel build_pricing(const Instance& inst, Precoder precoder, PowerScheme scheme,
                           const DualPrices& duals) {
  check_duals(inst, duals);
  inst.validate();
  const int K = inst.size();
  const auto uK = static_cast<std::size_t>(K);
  const SystemParams& sp = inst.params;
  const double M = sp.num_antennas;
  const double ru = sp.uplink_snr;
  const double rd = sp.downlink_snr;
  const bool zf = precoder == Precoder::ZF;

  PricingModel pm;
  pm.precoder = precoder;
  pm.scheme = scheme;
  double gmin = kInf;
  std::vector<double> leak(uK);
  for (const Device& d : inst.devices) {
    pm.max_gamma = std::max(pm.max_gamma, d.gamma);
    pm.max_mu = std::max(pm.max_mu, d.sinr_threshold);
    pm.max_beta = std::max(pm.max_beta, d.beta);
    gmin = std::min(gmin, d.gamma);
    leak[static_cast<std::size_t>(d.id)] = leak_of(d, precoder);
  }
  pm.delta = pm.max_mu * (K * ru * pm.max_beta + 1.0);
  {
    // Largest right-hand side an SINR row can reach with in-range powers.
    double up_rhs = 0.0, max_leak = 0.0;
    for (double l : leak) {
      up_rhs += l;
      max_leak = std::max(max_leak, l);
    }
    up_rhs = pm.max_mu * (1.0 + ru * up_rhs);
    const double down_rhs = pm.max_mu * (1.0 + rd * max_leak);
    const double need = std::max(up_rhs, down_rhs);
    if (!(pm.delta > need)) {
      pm.delta = need * (1.0 + 1e-6) + 1.0;
      pm.delta_enlarged = true;
    }
  }
  const double delta = pm.delta;
  const double Gamma = pm.max_gamma;
  const bool fair = scheme == PowerScheme::Fair;
  // Fair uplink coefficients of inactive devices can reach Gamma / gmin.
  const double slack_m = std::max(delta, Gamma / gmin);
  const PowerVector stat = static_coeffs(inst);

  milp::MipProblem& p = pm.mip;
  p.lp.sense = milp::ObjSense::Max;
  PricingLayout& L = pm.layout;
  auto vname = [](const char* base, int a, int b = -1) {
    return b < 0 ? std::string(base) + "_" + std::to_string(a)
                 : std::string(base) + "_" + std::to_string(a) + "_" + std::to_string(b);
  };

  // Pilot variables.
  for (int k = 0; k < K; ++k)
    L.u_up.push_back(p.add_var(0, 1, duals.up[static_cast<std::size_t>(k)], VarType::Binary, vname("uu", k)));
  for (int k = 0; k < K; ++k)
    L.u_down.push_back(p.add_var(0, 1, duals.down[static_cast<std::size_t>(k)], VarType::Binary, vname("ud", k)));
  for (int k = 0; k < K; ++k) L.u.push_back(p.add_var(0, 1, 0, VarType::Binary, vname("u", k)));

  if (scheme == PowerScheme::Downlink) {
    const std::vector<int> none;
    const SideCheck check(inst, precoder, scheme);
    for (int k = 0; k < K; ++k)
      if (!check.up_ok(none, k)) {
        pm.excluded_up.push_back(k);
        p.lp.vars[static_cast<std::size_t>(L.u_up[static_cast<std::size_t>(k)])].ub = 0.0;
      }
  }

  for (int k = 0; k < K; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    p.lp.add_constraint({{L.u[uk], 1}, {L.u_up[uk], -1}}, Sense::Ge, 0, vname("role_t", k));
    p.lp.add_constraint({{L.u[uk], 1}, {L.u_down[uk], -1}}, Sense::Ge, 0, vname("role_r", k));
    p.lp.add_constraint({{L.u[uk], 1}, {L.u_up[uk], -1}, {L.u_down[uk], -1}}, Sense::Le, 0,
                        vname("role_any", k));
  }
  {
    std::vector<std::pair<int, double>> row;
    for (int k = 0; k < K; ++k) row.emplace_back(L.u[static_cast<std::size_t>(k)], 1.0);
    p.lp.add_constraint(std::move(row), Sense::Le, sp.num_pilots, "pilots");
  }

  const bool eta_up_var = scheme == PowerScheme::Optimal || fair;
  const bool eta_down_var = scheme != PowerScheme::Static;

  // Power variables.
  if (eta_up_var) {
    for (int k = 0; k < K; ++k) {
      const double ub = fair ? Gamma / inst.device(k).gamma : 1.0;
      L.eta_up.push_back(p.add_var(0, ub, 0, VarType::Continuous, vname("eu", k)));
    }
  }
  if (eta_down_var) {
    for (int k = 0; k < K; ++k) L.eta_down.push_back(p.add_var(0, 1, 0, VarType::Continuous, vname("ed", k)));
    std::vector<std::pair<int, double>> row;
    for (int k = 0; k < K; ++k) row.emplace_back(L.eta_down[static_cast<std::size_t>(k)], 1.0);
    p.lp.add_constraint(std::move(row), Sense::Le, 1.0, "bs_power");
  }
  if (scheme == PowerScheme::Static) {
    std::vector<std::pair<int, double>> row;
    for (int k = 0; k < K; ++k) row.emplace_back(L.u_down[static_cast<std::size_t>(k)], stat.down[static_cast<std::size_t>(k)]);
    p.lp.add_constraint(std::move(row), Sense::Le, 1.0, "bs_power");
  }

  // Product eta_a * u_b with the given slack on the lower bound.
  auto product = [&](const char* base, int a, int b, int eta, int u, double slack_coef, int slack_u) {
    const int x = p.add_var(0, kInf, 0, VarType::Continuous, vname(base, a, b));
    p.lp.add_constraint({{x, 1}, {u, -1}}, Sense::Le, 0);
    p.lp.add_constraint({{x, 1}, {eta, -1}}, Sense::Le, 0);
    // x >= eta + u - 1 - slack (1 - u_s)
    std::vector<std::pair<int, double>> row{{x, 1}, {eta, -1}, {u, -1}};
    double rhs = -1.0;
    if (slack_coef > 0.0) {
      row.emplace_back(slack_u, -slack_coef);
      rhs -= slack_coef;
    }
    p.lp.add_constraint(std::move(row), Sense::Ge, rhs);
    return x;
  };

  if (eta_up_var) {
    const double s = fair ? slack_m : 0.0;
    if (!zf) {
      for (int k = 0; k < K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        L.x_up.push_back(product("xu", k, k, L.eta_up[uk], L.u_up[uk], s, L.u_up[uk]));
      }
    } else {
      for (int k = 0; k < K; ++k)
        for (int j = 0; j < K; ++j)
          L.x_up.push_back(product("xu", k, j, L.eta_up[static_cast<std::size_t>(k)],
                                   L.u_up[static_cast<std::size_t>(j)], s,
                                   L.u_up[static_cast<std::size_t>(k)]));
    }
  }
  if (eta_down_var) {
    if (!zf) {
      for (int k = 0; k < K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        L.x_down.push_back(product("xd", k, k, L.eta_down[uk], L.u_down[uk], 0.0, -1));
      }
    } else {
      for (int k = 0; k < K; ++k)
        for (int j = 0; j < K; ++j)
          L.x_down.push_back(product("xd", k, j, L.eta_down[static_cast<std::size_t>(k)],
                                     L.u_down[static_cast<std::size_t>(j)], 0.0, -1));
    }
  }
  auto xu_diag = [&](int j) {
    return zf ? L.x_up[static_cast<std::size_t>(j * K + j)] : L.x_up[static_cast<std::size_t>(j)];
  };
  auto xd_diag = [&](int j) {
    return zf ? L.x_down[static_cast<std::size_t>(j * K + j)] : L.x_down[static_cast<std::size_t>(j)];
  };

  // Uplink SINR rows: Delta (1 - uu_k) + rho g_k(eta) >= mu_k (1 + rho sum leak_j eta_j uu_j).
  for (int k = 0; k < K; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const Device& d = inst.device(k);
    const double mu = d.sinr_threshold;
    std::vector<std::pair<int, double>> row{{L.u_up[uk], -delta}};
    double rhs = mu - delta;
    const double cg = ru * d.gamma;
    switch (scheme) {
      case PowerScheme::Optimal:
      case PowerScheme::Fair:
        row.emplace_back(L.eta_up[uk], M * cg);
        if (zf)
          for (int j = 0; j < K; ++j) row.emplace_back(L.x_up[uk * uK + static_cast<std::size_t>(j)], -cg);
        for (int j = 0; j < K; ++j) row.emplace_back(xu_diag(j), -mu * ru * leak[static_cast<std::size_t>(j)]);
        break;
      case PowerScheme::Downlink:
        rhs -= M * cg;
        if (zf)
          for (int j = 0; j < K; ++j) row.emplace_back(L.u_up[static_cast<std::size_t>(j)], -cg);
        for (int j = 0; j < K; ++j)
          row.emplace_back(L.u_up[static_cast<std::size_t>(j)], -mu * ru * leak[static_cast<std::size_t>(j)]);
        break;
      case PowerScheme::Static: {
        const double s = stat.up[uk];
        rhs -= M * cg * s;
        if (zf)
          for (int j = 0; j < K; ++j) row.emplace_back(L.u_up[static_cast<std::size_t>(j)], -cg * s);
        for (int j = 0; j < K; ++j)
          row.emplace_back(L.u_up[static_cast<std::size_t>(j)],
                           -mu * ru * leak[static_cast<std::size_t>(j)] * stat.up[static_cast<std::size_t>(j)]);
        break;
      }
    }
    p.lp.add_constraint(std::move(row), Sense::Ge, rhs, vname("sinr_up", k));
  }

  // Downlink SINR rows: Delta (1 - ud_k) + rho g_k(eta) >= mu_k (1 + rho leak_k sum eta_j ud_j).
  for (int k = 0; k < K; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const Device& d = inst.device(k);
    const double mu = d.sinr_threshold;
    std::vector<std::pair<int, double>> row{{L.u_down[uk], -delta}};
    double rhs = mu - delta;
    const double cg = rd * d.gamma;
    if (scheme == PowerScheme::Static) {
      const double s = stat.down[uk];
      rhs -= M * cg * s;
      if (zf)
        for (int j = 0; j < K; ++j) row.emplace_back(L.u_down[static_cast<std::size_t>(j)], -cg * s);
      for (int j = 0; j < K; ++j)
        row.emplace_back(L.u_down[static_cast<std::size_t>(j)], -mu * rd * leak[uk] * stat.down[static_cast<std::size_t>(j)]);
    } else {
      row.emplace_back(L.eta_down[uk], M * cg);
      if (zf)
        for (int j = 0; j < K; ++j) row.emplace_back(L.x_down[uk * uK + static_cast<std::size_t>(j)], -cg);
      for (int j = 0; j < K; ++j) row.emplace_back(xd_diag(j), -mu * rd * leak[uk]);
    }
    p.lp.add_constraint(std::move(row), Sense::Ge, rhs, vname("sinr_down", k));
  }

  if (fair) {
    L.phi = p.add_var(0, Gamma, 0, VarType::Continuous, "phi");
    for (int k = 0; k < K; ++k) L.z.push_back(p.add_var(0, 1, 0, VarType::Binary, vname("z", k)));
    for (int k = 0; k < K; ++k) L.y_up.push_back(p.add_var(0, 1, 0, VarType::Binary, vname("yu", k)));
    std::vector<std::pair<int, double>> phi_lo{{L.phi, 1}};
    std::vector<std::pair<int, double>> ysum;
    for (int k = 0; k < K; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      const double g = inst.device(k).gamma;
      // gamma_k eta_k = phi
      p.lp.add_constraint({{L.eta_up[uk], g}, {L.phi, -1}}, Sense::Eq, 0, vname("fair_eta", k));
      // phi <= gamma_k uu_k + (1 - uu_k) Gamma
      p.lp.add_constraint({{L.phi, 1}, {L.u_up[uk], Gamma - g}}, Sense::Le, Gamma, vname("phi_hi", k));
      phi_lo.emplace_back(L.z[uk], -g);
      ysum.emplace_back(L.y_up[uk], 1.0);
      p.lp.add_constraint({{L.y_up[uk], 1}, {L.u_up[uk], -1}}, Sense::Le, 0);
      p.lp.add_constraint({{L.y_up[uk], 1}, {L.z[uk], -1}}, Sense::Le, 0);
      p.lp.add_constraint({{L.y_up[uk], 1}, {L.u_up[uk], -1}, {L.z[uk], -1}}, Sense::Ge, -1);
    }
    p.lp.add_constraint(std::move(phi_lo), Sense::Ge, 0, "phi_lo");
    p.lp.add_constraint(ysum, Sense::Le, 1, "select_one");
    for (int k = 0; k < K; ++k) {
      auto row = ysum;
      row.emplace_back(L.u_up[static_cast<std::size_t>(k)], -1.0);
      p.lp.add_constraint(std::move(row), Sense::Ge, 0, vname("select_active", k));
    }

    // Downlink: eta_k rho gamma_k sum_j ud_j (1/(rho gamma_j) + leak_j/gamma_j) = (1 + rho leak_k) ud_k,
    // with eta_k ud_j linearized (ZF reuses its K*K products).
    if (!zf) {
      for (int k = 0; k < K; ++k)
        for (int j = 0; j < K; ++j)
          L.y_down.push_back(product("yd", k, j, L.eta_down[static_cast<std::size_t>(k)],
                                     L.u_down[static_cast<std::size_t>(j)], 0.0, -1));
    }
    const std::vector<int>& prod = zf ? L.x_down : L.y_down;
    for (int k = 0; k < K; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      const double gk = inst.device(k).gamma;
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < K; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const double gj = inst.device(j).gamma;
        row.emplace_back(prod[uk * uK + uj], rd * gk * (1.0 / (rd * gj) + leak[uj] / gj));
      }
      row.emplace_back(L.u_down[uk], -(1.0 + rd * leak[uk]));
      p.lp.add_constraint(std::move(row), Sense::Eq, 0, vname("fair_down", k));
    }
  }

  p.validate();
  return pm;
}

std::optional<Candidate> solve_pricing(const Instance& inst, const PricingModel& model,
                                       const DualPrices& duals, const PricingOptions& opts) {
  check_duals(inst, duals);
  const milp::SolverBackend& be = opts.backend ? *opts.backend : milp::builtin_backend();
  milp::MipOptions mo;
  mo.time_limit_s = opts.time_limit_s;
  mo.cutoff = 1.0 + opts.eps_rc;
  const milp::MipSolution s = be.solve_mip(model.mip, mo);
  switch (s.status) {
    case milp::MipStatus::NoneBetterThanCutoff:
    case milp::MipStatus::Infeasible:
      return std::nullopt;
    case milp::MipStatus::TimeoutNoIncumbent:
      throw PricingInconclusiveError("pricing MIP timed out without an incumbent");
    case milp::MipStatus::Unbounded:
    case milp::MipStatus::Numerical:
      throw PricingInconclusiveError(std::string("pricing MIP failed: ") + milp::to_string(s.status));
    case milp::MipStatus::Optimal:
    case milp::MipStatus::TimeoutWithIncumbent:
      break;
  }

  // Decode membership; roles without a price are dropped, which keeps the
  // set feasible because every scheme's feasible family is downward closed.
  std::vector<int> tx, rx;
  for (int k = 0; k < inst.size(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (s.x[static_cast<std::size_t>(model.layout.u_up[uk])] > 0.5 && duals.up[uk] > 0.0) tx.push_back(k);
    if (s.x[static_cast<std::size_t>(model.layout.u_down[uk])] > 0.5 && duals.down[uk] > 0.0) rx.push_back(k);
  }
  auto c = make_candidate(inst, model.precoder, model.scheme, duals, tx, rx);
  if (!c || c->price <= 1.0 + opts.eps_rc) {
    // The MIP accepted a set only within its tolerances; fall back to the
    // exact search for this round.
    auto alt = search_pricing(inst, model.precoder, model.scheme, duals, 1.0 + opts.eps_rc,
                              opts.time_limit_s);
    if (alt) alt->status = "mip_rejected_search";
    return alt;
  }
  c->status = milp::to_string(s.status);
  c->proven = s.status == milp::MipStatus::Optimal;
  return c;
}

std::optional<Candidate> price(const Instance& inst, Precoder precoder, PowerScheme scheme,
                               const DualPrices& duals, const PricingOptions& opts) {
  if (opts.engine == PricingEngine::Mip) {
    const PricingModel m = build_pricing(inst, precoder, scheme, duals);
    return solve_pricing(inst, m, duals, opts);
  }
  return search_pricing(inst, precoder, scheme, duals, 1.0 + opts.eps_rc, opts.time_limit_s);
}

VerifyReport verify_candidate(const Instance& inst, Precoder precoder, PowerScheme scheme,
                              const CompatibleSet& c) {
  auto fail = [](std::string why, int k = -1, double margin = 0.0) {
    VerifyReport r;
    r.ok = false;
    r.reason = std::move(why);
    r.device = k;
    r.margin = margin;
    return r;
  };
  const int K = inst.size();
  if (c.empty()) return fail("empty");
  if (c.eta_up.size() != c.tx.size() || c.eta_down.size() != c.rx.size()) return fail("shape");
  for (const auto* v : {&c.tx, &c.rx}) {
    if (!std::is_sorted(v->begin(), v->end()) || std::adjacent_find(v->begin(), v->end()) != v->end())
      return fail("unsorted");
    for (int k : *v)
      if (k < 0 || k >= K) return fail("bad_id", k);
  }
  const std::vector<int> members = sorted_union(c.tx, c.rx);
  if (static_cast<int>(members.size()) > inst.params.num_pilots) return fail("pilots");
  if (precoder == Precoder::ZF) {
    const auto M = static_cast<std::size_t>(inst.params.num_antennas);
    if (c.tx.size() >= M || c.rx.size() >= M) return fail("zf_rank");
  }

  double budget = 0.0;
  for (std::size_t i = 0; i < c.tx.size(); ++i) {
    const double e = c.eta_up[i];
    if (!(e >= -1e-12) || e > 1.0 + 1e-9) return fail("uplink_power", c.tx[i]);
  }
  for (std::size_t i = 0; i < c.rx.size(); ++i) {
    const double e = c.eta_down[i];
    if (!(e >= -1e-12)) return fail("downlink_power", c.rx[i]);
    budget += e;
  }
  if (budget > 1.0 + 1e-9) return fail("bs_power", -1, budget - 1.0);

  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-7 * std::max(1.0, std::abs(b)); };
  switch (scheme) {
    case PowerScheme::Downlink:
      for (std::size_t i = 0; i < c.tx.size(); ++i)
        if (!close(c.eta_up[i], 1.0)) return fail("scheme_uplink", c.tx[i]);
      break;
    case PowerScheme::Fair: {
      const auto up = fair_uplink(inst, c.tx);
      const auto down = fair_downlink(inst, c.rx, precoder);
      for (std::size_t i = 0; i < c.tx.size(); ++i)
        if (!close(c.eta_up[i], up[static_cast<std::size_t>(c.tx[i])])) return fail("scheme_uplink", c.tx[i]);
      for (std::size_t i = 0; i < c.rx.size(); ++i)
        if (!close(c.eta_down[i], down[static_cast<std::size_t>(c.rx[i])])) return fail("scheme_downlink", c.rx[i]);
      break;
    }
    case PowerScheme::Static: {
      const PowerVector s = static_coeffs(inst);
      for (std::size_t i = 0; i < c.tx.size(); ++i)
        if (!close(c.eta_up[i], s.up[static_cast<std::size_t>(c.tx[i])])) return fail("scheme_uplink", c.tx[i]);
      for (std::size_t i = 0; i < c.rx.size(); ++i)
        if (!close(c.eta_down[i], s.down[static_cast<std::size_t>(c.rx[i])])) return fail("scheme_downlink", c.rx[i]);
      break;
    }
    case PowerScheme::Optimal:
      break;
  }

  const PowerVector pw = dense_powers(c, K);
  for (int k : c.tx) {
    const double s = effective_sinr(inst, precoder, Direction::Up, c.tx, c.rx, pw, k);
    const double mu = inst.device(k).sinr_threshold;
    if (s < mu * (1.0 - 1e-6)) return fail("sinr_up", k, s / mu - 1.0);
  }
  for (int k : c.rx) {
    const double s = effective_sinr(inst, precoder, Direction::Down, c.tx, c.rx, pw, k);
    const double mu = inst.device(k).sinr_threshold;
    if (s < mu * (1.0 - 1e-6)) return fail("sinr_down", k, s / mu - 1.0);
  }
  return {};
}

}  // namespace mmimo
