#pragma once

#include <random>
#include <vector>

#include "mmimo/model.hpp"
#include "mmimo/pricing.hpp"

namespace oracle {

// Small random cell: few antennas and demanding thresholds so that the SINR
// constraints actually bind.
inline mmimo::Instance random_instance(std::mt19937& rng, int K, int P) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  mmimo::Instance inst;
  inst.params.num_antennas = 8 + static_cast<int>(24 * u(rng));
  inst.params.num_pilots = P;
  inst.params.uplink_snr = mmimo::db_to_linear(5 + 10 * u(rng));
  inst.params.downlink_snr = mmimo::db_to_linear(5 + 10 * u(rng));
  for (int k = 0; k < K; ++k) {
    const double r = 40 + 360 * u(rng);
    const double beta = mmimo::path_loss_beta(r, inst.params);
    const double mu = mmimo::db_to_linear(-2 + 14 * u(rng));
    inst.devices.push_back(mmimo::make_device(k, beta, 1 + static_cast<int>(4 * u(rng)),
                                              1 + static_cast<int>(4 * u(rng)), mu, inst.params, r));
  }
  return inst;
}

// Like random_instance, but devices are drawn from `groups` positions with a
// shared threshold per group, so several devices are physically identical.
inline mmimo::Instance grouped_instance(std::mt19937& rng, int K, int P, int groups) {
  mmimo::Instance inst = random_instance(rng, groups, P);
  const std::vector<mmimo::Device> proto = inst.devices;
  inst.devices.clear();
  for (int k = 0; k < K; ++k) {
    const mmimo::Device& g = proto[static_cast<std::size_t>(k % groups)];
    inst.devices.push_back(mmimo::make_device(k, g.beta, g.up_demand, g.down_demand,
                                              g.sinr_threshold, inst.params, g.dist_m));
  }
  return inst;
}

inline mmimo::DualPrices random_duals(std::mt19937& rng, int K) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  mmimo::DualPrices d = mmimo::DualPrices::zeros(K);
  for (int k = 0; k < K; ++k) {
    d.up[k] = u(rng) < 0.2 ? 0.0 : u(rng);
    d.down[k] = u(rng) < 0.2 ? 0.0 : u(rng);
  }
  return d;
}

}  // namespace oracle
