#include "mmimo/power.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "mmimo/errors.hpp"

namespace mmimo {

namespace {

constexpr double kBudgetTol = 1e-9;

double antenna_gain(const Instance& inst, Precoder precoder, std::size_t active) {
  const int M = inst.params.num_antennas;
  if (precoder == Precoder::MRC) return static_cast<double>(M);
  return static_cast<double>(M) - static_cast<double>(active);
}

double leakage(const Device& d, Precoder precoder) {
  return precoder == Precoder::MRC ? d.beta : d.beta - d.gamma;
}

}  // namespace

std::string_view to_string(PowerScheme s) {
  switch (s) {
    case PowerScheme::Optimal: return "optimal";
    case PowerScheme::Fair: return "fair";
    case PowerScheme::Static: return "static";
    case PowerScheme::Downlink: return "downlink";
  }
  return "?";
}

PowerScheme parse_power_scheme(std::string_view s) {
  if (s == "optimal") return PowerScheme::Optimal;
  if (s == "fair") return PowerScheme::Fair;
  if (s == "static") return PowerScheme::Static;
  if (s == "downlink") return PowerScheme::Downlink;
  throw FormatError("unknown power scheme '" + std::string(s) + "'");
}

std::vector<double> fair_uplink(const Instance& inst, std::span<const int> active_tx) {
  std::vector<double> eta(static_cast<std::size_t>(inst.size()), 0.0);
  if (active_tx.empty()) return eta;
  double phi = std::numeric_limits<double>::infinity();
  for (int k : active_tx) phi = std::min(phi, inst.device(k).gamma);
  for (const Device& d : inst.devices) eta[static_cast<std::size_t>(d.id)] = phi / d.gamma;
  return eta;
}

std::vector<double> fair_downlink(const Instance& inst, std::span<const int> active_rx,
                                  Precoder precoder) {
  std::vector<double> eta(static_cast<std::size_t>(inst.size()), 0.0);
  if (active_rx.empty()) return eta;
  const double rho = inst.params.downlink_snr;
  double A = 0.0;
  for (int j : active_rx) {
    const Device& d = inst.device(j);
    A += 1.0 / (rho * d.gamma) + leakage(d, precoder) / d.gamma;
  }
  for (int k : active_rx) {
    const Device& d = inst.device(k);
    eta[static_cast<std::size_t>(k)] = (1.0 + rho * leakage(d, precoder)) / (rho * d.gamma * A);
  }
  return eta;
}

PowerVector static_coeffs(const Instance& inst) {
  double gmin = std::numeric_limits<double>::infinity();
  for (const Device& d : inst.devices) gmin = std::min(gmin, d.gamma);
  PowerVector p = PowerVector::zeros(inst.size());
  for (const Device& d : inst.devices) {
    const auto k = static_cast<std::size_t>(d.id);
    p.up[k] = gmin / d.gamma;
    p.down[k] = p.up[k];
  }
  return p;
}

std::optional<std::vector<double>> minimal_uplink_power(const Instance& inst, Precoder precoder,
                                                        std::span<const int> active_tx) {
  std::vector<double> eta(static_cast<std::size_t>(inst.size()), 0.0);
  if (active_tx.empty()) return eta;
  const double gain = antenna_gain(inst, precoder, active_tx.size());
  if (gain <= 0.0) return std::nullopt;
  const double rho = inst.params.uplink_snr;
  // eta_k >= a_k (1 + rho * S) with S the weighted power sum; the least
  // fixed point is eta_k = a_k / (1 - rho * sum_j leak_j a_j).
  double load = 0.0;
  for (int j : active_tx) {
    const Device& d = inst.device(j);
    const double a = d.sinr_threshold / (gain * rho * d.gamma);
    eta[static_cast<std::size_t>(j)] = a;
    load += leakage(d, precoder) * a;
  }
  const double slack = 1.0 - rho * load;
  if (slack <= 0.0) return std::nullopt;
  for (int j : active_tx) {
    double& e = eta[static_cast<std::size_t>(j)];
    e /= slack;
    if (e > 1.0 + 1e-12) return std::nullopt;
    e = std::min(e, 1.0);
  }
  return eta;
}

std::optional<std::vector<double>> minimal_downlink_power(const Instance& inst,
                                                          Precoder precoder,
                                                          std::span<const int> active_rx) {
  std::vector<double> eta(static_cast<std::size_t>(inst.size()), 0.0);
  if (active_rx.empty()) return eta;
  const double gain = antenna_gain(inst, precoder, active_rx.size());
  if (gain <= 0.0) return std::nullopt;
  const double rho = inst.params.downlink_snr;
  // eta_k = b_k (1 + rho leak_k E), E = sum eta  =>  E = sum b / (1 - rho sum b leak).
  double sum_b = 0.0;
  double sum_c = 0.0;
  for (int j : active_rx) {
    const Device& d = inst.device(j);
    const double b = d.sinr_threshold / (gain * rho * d.gamma);
    sum_b += b;
    sum_c += rho * b * leakage(d, precoder);
  }
  if (sum_c >= 1.0) return std::nullopt;
  const double total = sum_b / (1.0 - sum_c);
  if (total > 1.0 + 1e-12) return std::nullopt;
  for (int j : active_rx) {
    const Device& d = inst.device(j);
    const double b = d.sinr_threshold / (gain * rho * d.gamma);
    eta[static_cast<std::size_t>(j)] = b * (1.0 + rho * leakage(d, precoder) * total);
  }
  return eta;
}

PowerVector resolve_power(PowerScheme scheme, const Instance& inst, std::span<const int> tx,
                          std::span<const int> rx, Precoder precoder,
                          const PowerVector* supplied) {
  PowerVector out = PowerVector::zeros(inst.size());
  switch (scheme) {
    case PowerScheme::Fair: {
      const auto up = fair_uplink(inst, tx);
      const auto down = fair_downlink(inst, rx, precoder);
      for (int k : tx) out.up[static_cast<std::size_t>(k)] = up[static_cast<std::size_t>(k)];
      for (int k : rx) out.down[static_cast<std::size_t>(k)] = down[static_cast<std::size_t>(k)];
      break;
    }
    case PowerScheme::Static: {
      const PowerVector s = static_coeffs(inst);
      for (int k : tx) out.up[static_cast<std::size_t>(k)] = s.up[static_cast<std::size_t>(k)];
      for (int k : rx) out.down[static_cast<std::size_t>(k)] = s.down[static_cast<std::size_t>(k)];
      break;
    }
    case PowerScheme::Optimal:
    case PowerScheme::Downlink: {
      if (supplied == nullptr)
        throw PreconditionError("optimized power schemes need coefficients from pricing");
      for (int k : tx) out.up[static_cast<std::size_t>(k)] = supplied->up.at(static_cast<std::size_t>(k));
      for (int k : rx) out.down[static_cast<std::size_t>(k)] = supplied->down.at(static_cast<std::size_t>(k));
      if (scheme == PowerScheme::Downlink)
        for (int k : tx) out.up[static_cast<std::size_t>(k)] = 1.0;
      break;
    }
  }

  double budget = 0.0;
  for (int k : tx) {
    const double e = out.up[static_cast<std::size_t>(k)];
    if (e < -kBudgetTol || e > 1.0 + kBudgetTol)
      throw InfeasiblePowerError("uplink coefficient of device " + std::to_string(k) +
                                 " out of range: " + std::to_string(e));
  }
  for (int k : rx) {
    const double e = out.down[static_cast<std::size_t>(k)];
    if (e < -kBudgetTol) throw InfeasiblePowerError("negative downlink coefficient");
    budget += e;
  }
  if (budget > 1.0 + kBudgetTol)
    throw InfeasiblePowerError("downlink coefficients sum to " + std::to_string(budget));
  return out;
}

}  // namespace mmimo
