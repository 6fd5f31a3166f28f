#include "mmimo/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mmimo/errors.hpp"

namespace mmimo {

std::string_view to_string(Precoder p) { return p == Precoder::MRC ? "mrc" : "zf"; }
std::string_view to_string(Direction d) { return d == Direction::Up ? "up" : "down"; }

Precoder parse_precoder(std::string_view s) {
  if (s == "mrc" || s == "MRC") return Precoder::MRC;
  if (s == "zf" || s == "ZF") return Precoder::ZF;
  throw FormatError("unknown precoder '" + std::string(s) + "'");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

void SystemParams::validate() const {
  if (num_antennas < 1) throw DomainError("num_antennas must be positive");
  if (num_pilots < 1) throw DomainError("num_pilots must be positive");
  if (num_antennas < num_pilots) throw DomainError("need M >= P");
  if (pilot_len < 1) throw DomainError("pilot_len must be positive");
  if (!(uplink_snr > 0.0) || !(downlink_snr > 0.0)) throw DomainError("SNR must be positive");
  if (!(pathloss_exp > 0.0)) throw DomainError("path loss exponent must be positive");
  if (!(ref_dist_m > 0.0)) throw DomainError("reference distance must be positive");
  if (block_meta) {
    const auto& b = *block_meta;
    if (b.samples != b.pilot_samples + b.uplink_samples + b.downlink_samples)
      throw DomainError("block samples must equal pilot + uplink + downlink samples");
  }
}

void Instance::validate() const {
  params.validate();
  if (devices.empty()) throw DomainError("instance needs at least one device");
  for (int k = 0; k < size(); ++k) {
    const Device& d = devices[static_cast<std::size_t>(k)];
    if (d.id != k) throw DomainError("device ids must be dense and ordered 0..K-1");
    if (!(d.beta > 0.0)) throw DomainError("device " + std::to_string(k) + ": beta must be positive");
    if (!(d.gamma > 0.0) || d.gamma > d.beta * (1.0 + 1e-12))
      throw DomainError("device " + std::to_string(k) + ": need 0 < gamma <= beta");
    const double expect = channel_gamma(d.beta, params);
    if (std::abs(d.gamma - expect) > 1e-12 * expect)
      throw DomainError("device " + std::to_string(k) + ": gamma inconsistent with beta");
    if (d.up_demand < 0 || d.down_demand < 0) throw DomainError("demands must be non-negative");
    if (d.up_demand + d.down_demand < 1)
      throw DomainError("device " + std::to_string(k) + " has no demand");
    if (!(d.sinr_threshold > 0.0)) throw DomainError("SINR threshold must be positive");
  }
}

Device make_device(int id, double beta, int up_demand, int down_demand, double sinr_threshold,
                   const SystemParams& params, double dist_m) {
  Device d;
  d.id = id;
  d.dist_m = dist_m;
  d.beta = beta;
  d.gamma = channel_gamma(beta, params);
  d.up_demand = up_demand;
  d.down_demand = down_demand;
  d.sinr_threshold = sinr_threshold;
  return d;
}

std::vector<int> CompatibleSet::members() const {
  std::vector<int> out;
  std::set_union(tx.begin(), tx.end(), rx.begin(), rx.end(), std::back_inserter(out));
  return out;
}

bool CompatibleSet::transmits(int k) const { return std::binary_search(tx.begin(), tx.end(), k); }
bool CompatibleSet::receives(int k) const { return std::binary_search(rx.begin(), rx.end(), k); }

double CompatibleSet::up_power(int k) const {
  auto it = std::lower_bound(tx.begin(), tx.end(), k);
  if (it == tx.end() || *it != k) return 0.0;
  return eta_up[static_cast<std::size_t>(it - tx.begin())];
}

double CompatibleSet::down_power(int k) const {
  auto it = std::lower_bound(rx.begin(), rx.end(), k);
  if (it == rx.end() || *it != k) return 0.0;
  return eta_down[static_cast<std::size_t>(it - rx.begin())];
}

PowerVector PowerVector::zeros(int num_devices) {
  const auto n = static_cast<std::size_t>(num_devices);
  return PowerVector{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

CompatibleSet make_cset(std::vector<int> tx, std::vector<int> rx, const PowerVector& powers) {
  std::sort(tx.begin(), tx.end());
  std::sort(rx.begin(), rx.end());
  CompatibleSet c;
  c.tx = std::move(tx);
  c.rx = std::move(rx);
  for (int k : c.tx) c.eta_up.push_back(powers.up.at(static_cast<std::size_t>(k)));
  for (int k : c.rx) c.eta_down.push_back(powers.down.at(static_cast<std::size_t>(k)));
  return c;
}

PowerVector dense_powers(const CompatibleSet& c, int num_devices) {
  PowerVector p = PowerVector::zeros(num_devices);
  for (std::size_t i = 0; i < c.tx.size(); ++i) p.up.at(static_cast<std::size_t>(c.tx[i])) = c.eta_up[i];
  for (std::size_t i = 0; i < c.rx.size(); ++i) p.down.at(static_cast<std::size_t>(c.rx[i])) = c.eta_down[i];
  return p;
}

double path_loss_beta(double dist_m, const SystemParams& params) {
  if (!(dist_m > 0.0)) throw DomainError("distance must be positive");
  return std::pow(dist_m / params.ref_dist_m, -params.pathloss_exp);
}

double channel_gamma(double beta, const SystemParams& params) {
  if (beta < 0.0 || std::isnan(beta)) throw DomainError("beta must be non-negative");
  if (params.perfect_csi) return beta;
  const double snr = params.pilot_len * params.uplink_snr;
  return snr * beta * beta / (1.0 + snr * beta);
}

double effective_sinr(const Instance& inst, Precoder precoder, Direction dir,
                      std::span<const int> active_tx, std::span<const int> active_rx,
                      const PowerVector& powers, int k) {
  const bool up = dir == Direction::Up;
  const std::span<const int> active = up ? active_tx : active_rx;
  if (std::find(active.begin(), active.end(), k) == active.end())
    throw PreconditionError("device " + std::to_string(k) + " is not active in direction " +
                            std::string(to_string(dir)));
  const auto& eta = up ? powers.up : powers.down;
  const double rho = up ? inst.params.uplink_snr : inst.params.downlink_snr;
  const int M = inst.params.num_antennas;
  const int L = static_cast<int>(active.size());
  const Device& dk = inst.device(k);

  double gain = static_cast<double>(M);
  if (precoder == Precoder::ZF) {
    if (L >= M) throw ModelError("zero forcing needs M > L (M=" + std::to_string(M) +
                                 ", L=" + std::to_string(L) + ")");
    gain = static_cast<double>(M - L);
  }
  const double numerator = gain * rho * dk.gamma * eta[static_cast<std::size_t>(k)];

  double interference = 0.0;
  if (up) {
    for (int j : active) {
      const Device& dj = inst.device(j);
      const double leak = precoder == Precoder::MRC ? dj.beta : dj.beta - dj.gamma;
      interference += leak * eta[static_cast<std::size_t>(j)];
    }
  } else {
    double total = 0.0;
    for (int j : active) total += eta[static_cast<std::size_t>(j)];
    const double leak = precoder == Precoder::MRC ? dk.beta : dk.beta - dk.gamma;
    interference = leak * total;
  }
  return numerator / (1.0 + rho * interference);
}

}  // namespace mmimo
