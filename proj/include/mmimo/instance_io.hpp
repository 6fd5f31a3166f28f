#pragma once

// JSON instance documents:
//
//   {"params": {"M": 100, "ul_snr_db": 10, "dl_snr_db": 10, "S": 1, "P": 12,
//               "alpha": 3.7, "ref_dist_m": 200,
//               "perfect_csi": false,                         (optional)
//               "block": {"T_s":..,"B_hz":..,"tau":..,"tau_pilot":..,
//                         "tau_up":..,"tau_down":..}},         (optional)
//    "devices": [{"id": 0, "dist_m": 50 | "beta": 168.9,
//                 "h_up": 10, "h_down": 10, "mu_db": 0 | "mu": 1.0}, ...]}

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mmimo/model.hpp"

namespace mmimo {

Instance instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const Instance& inst);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

}  // namespace mmimo
