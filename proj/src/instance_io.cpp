#include "mmimo/instance_io.hpp"

#include <algorithm>
#include <fstream>

#include "mmimo/errors.hpp"

namespace mmimo {

using nlohmann::json;

namespace {

template <typename T>
T required(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) throw FormatError(std::string(where) + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string(where) + ": field '" + key + "': " + e.what());
  }
}

}  // namespace

Instance instance_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("params") || !doc.contains("devices"))
    throw FormatError("instance: expected an object with 'params' and 'devices'");
  const json& p = doc.at("params");

  Instance inst;
  SystemParams& sp = inst.params;
  sp.num_antennas = required<int>(p, "M", "params");
  sp.uplink_snr = db_to_linear(required<double>(p, "ul_snr_db", "params"));
  sp.downlink_snr = db_to_linear(required<double>(p, "dl_snr_db", "params"));
  sp.pilot_len = required<int>(p, "S", "params");
  sp.num_pilots = required<int>(p, "P", "params");
  sp.pathloss_exp = required<double>(p, "alpha", "params");
  sp.ref_dist_m = required<double>(p, "ref_dist_m", "params");
  sp.perfect_csi = p.value("perfect_csi", false);
  if (p.contains("block")) {
    const json& b = p.at("block");
    BlockMeta meta;
    meta.duration_s = required<double>(b, "T_s", "block");
    meta.bandwidth_hz = required<double>(b, "B_hz", "block");
    meta.samples = required<int>(b, "tau", "block");
    meta.pilot_samples = required<int>(b, "tau_pilot", "block");
    meta.uplink_samples = required<int>(b, "tau_up", "block");
    meta.downlink_samples = required<int>(b, "tau_down", "block");
    sp.block_meta = meta;
  }
  sp.validate();

  const json& devs = doc.at("devices");
  if (!devs.is_array()) throw FormatError("instance: 'devices' must be an array");
  for (const json& d : devs) {
    const int id = required<int>(d, "id", "device");
    double dist = 0.0;
    double beta = 0.0;
    if (d.contains("beta")) {
      beta = required<double>(d, "beta", "device");
      dist = d.value("dist_m", 0.0);
    } else if (d.contains("dist_m")) {
      dist = required<double>(d, "dist_m", "device");
      beta = path_loss_beta(dist, sp);
    } else {
      throw FormatError("device " + std::to_string(id) + ": need 'dist_m' or 'beta'");
    }
    double mu = 1.0;
    if (d.contains("mu")) {
      mu = required<double>(d, "mu", "device");
    } else if (d.contains("mu_db")) {
      mu = db_to_linear(required<double>(d, "mu_db", "device"));
    } else {
      throw FormatError("device " + std::to_string(id) + ": need 'mu_db' or 'mu'");
    }
    inst.devices.push_back(make_device(id, beta, required<int>(d, "h_up", "device"),
                                       required<int>(d, "h_down", "device"), mu, sp, dist));
  }
  std::sort(inst.devices.begin(), inst.devices.end(),
            [](const Device& a, const Device& b) { return a.id < b.id; });
  inst.validate();
  return inst;
}

json instance_to_json(const Instance& inst) {
  const SystemParams& sp = inst.params;
  json params = {{"M", sp.num_antennas},
                 {"ul_snr_db", linear_to_db(sp.uplink_snr)},
                 {"dl_snr_db", linear_to_db(sp.downlink_snr)},
                 {"S", sp.pilot_len},
                 {"P", sp.num_pilots},
                 {"alpha", sp.pathloss_exp},
                 {"ref_dist_m", sp.ref_dist_m}};
  if (sp.perfect_csi) params["perfect_csi"] = true;
  if (sp.block_meta) {
    const BlockMeta& b = *sp.block_meta;
    params["block"] = {{"T_s", b.duration_s},        {"B_hz", b.bandwidth_hz},
                       {"tau", b.samples},           {"tau_pilot", b.pilot_samples},
                       {"tau_up", b.uplink_samples}, {"tau_down", b.downlink_samples}};
  }
  json devices = json::array();
  for (const Device& d : inst.devices) {
    json jd = {{"id", d.id}, {"beta", d.beta}, {"h_up", d.up_demand},
               {"h_down", d.down_demand}, {"mu", d.sinr_threshold}};
    if (d.dist_m > 0.0) jd["dist_m"] = d.dist_m;
    devices.push_back(std::move(jd));
  }
  return json{{"params", params}, {"devices", devices}};
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open instance file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("instance file " + path.string() + ": " + e.what());
  }
  return instance_from_json(doc);
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << instance_to_json(inst).dump(2) << '\n';
}

}  // namespace mmimo
