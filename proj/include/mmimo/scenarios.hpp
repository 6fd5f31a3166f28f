#pragma once

// The experiment instances of the numerical study: six experiment
// configurations (distances, device counts, thresholds) crossed with six
// demand scenarios.

#include <vector>

#include "mmimo/model.hpp"

namespace mmimo {

struct ExperimentConfig {
  int id = 1;
  double near_dist_m = 50.0;
  double far_dist_m = 200.0;
  int num_devices = 40;
  int num_near = 20;
  double mu = 1.0;  // linear
};

struct ScenarioSpec {
  int id = 1;
  int near_up = 10;
  int near_down = 10;
  int far_up = 2;
  int far_down = 2;
};

/// Default configuration of experiment 1..6. Throws DomainError otherwise.
ExperimentConfig experiment(int id);

/// Experiment 4 with threshold mu (linear).
ExperimentConfig experiment4(double mu);

/// Experiment 5 with K devices (K even).
ExperimentConfig experiment5(int num_devices);

/// Thresholds swept in experiment 4: 1, 5, 10, ..., 50.
std::vector<double> experiment4_thresholds();

/// Device counts swept in experiment 5: 4, 8, ..., 40.
std::vector<int> experiment5_sizes();

ScenarioSpec scenario(int id);

/// Near devices first, then far devices, ids 0..K-1.
Instance build_instance(const ExperimentConfig& exp, const ScenarioSpec& sc);

Instance build_instance(int experiment_id, int scenario_id);

}  // namespace mmimo
