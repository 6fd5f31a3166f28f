#include "mmimo/scenarios.hpp"

#include <string>

#include "mmimo/errors.hpp"

namespace mmimo {

ExperimentConfig experiment(int id) {
  ExperimentConfig e;
  e.id = id;
  switch (id) {
    case 1: e.near_dist_m = 50; e.far_dist_m = 200; break;
    case 2: e.near_dist_m = 200; e.far_dist_m = 400; break;
    case 3:
    case 4:
    case 5: e.near_dist_m = 50; e.far_dist_m = 100; break;
    case 6:
      e.near_dist_m = 50;
      e.far_dist_m = 500;
      e.num_near = 8;
      break;
    default: throw DomainError("unknown experiment " + std::to_string(id));
  }
  if (id == 4) {
    e.num_devices = 20;
    e.num_near = 10;
  }
  return e;
}

ExperimentConfig experiment4(double mu) {
  if (!(mu > 0.0)) throw DomainError("threshold must be positive");
  ExperimentConfig e = experiment(4);
  e.mu = mu;
  return e;
}

ExperimentConfig experiment5(int num_devices) {
  if (num_devices < 2 || num_devices % 2 != 0) throw DomainError("K must be even and >= 2");
  ExperimentConfig e = experiment(5);
  e.num_devices = num_devices;
  e.num_near = num_devices / 2;
  return e;
}

std::vector<double> experiment4_thresholds() {
  std::vector<double> mu{1.0};
  for (int m = 5; m <= 50; m += 5) mu.push_back(m);
  return mu;
}

std::vector<int> experiment5_sizes() {
  std::vector<int> k;
  for (int n = 4; n <= 40; n += 4) k.push_back(n);
  return k;
}

ScenarioSpec scenario(int id) {
  switch (id) {
    case 1: return {1, 10, 10, 2, 2};
    case 2: return {2, 2, 2, 10, 10};
    case 3: return {3, 2, 10, 10, 2};
    case 4: return {4, 10, 2, 2, 10};
    case 5: return {5, 10, 2, 10, 2};
    case 6: return {6, 2, 10, 2, 10};
    default: throw DomainError("unknown scenario " + std::to_string(id));
  }
}

Instance build_instance(const ExperimentConfig& exp, const ScenarioSpec& sc) {
  if (exp.num_near < 0 || exp.num_near > exp.num_devices)
    throw DomainError("bad near group size");
  Instance inst;
  const double beta_near = path_loss_beta(exp.near_dist_m, inst.params);
  const double beta_far = path_loss_beta(exp.far_dist_m, inst.params);
  for (int k = 0; k < exp.num_devices; ++k) {
    const bool near = k < exp.num_near;
    inst.devices.push_back(make_device(k, near ? beta_near : beta_far, near ? sc.near_up : sc.far_up,
                                       near ? sc.near_down : sc.far_down, exp.mu, inst.params,
                                       near ? exp.near_dist_m : exp.far_dist_m));
  }
  inst.validate();
  return inst;
}

Instance build_instance(int experiment_id, int scenario_id) {
  return build_instance(experiment(experiment_id), scenario(scenario_id));
}

}  // namespace mmimo
