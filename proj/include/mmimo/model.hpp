#pragma once

// System, device and compatible-set model of a single massive MIMO cell, and
// the effective SINR expressions for maximum ratio and zero forcing
// precoding evaluated over an arbitrary set of active devices.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmimo {

enum class Precoder { MRC, ZF };
enum class Direction { Up, Down };

std::string_view to_string(Precoder p);
std::string_view to_string(Direction d);
Precoder parse_precoder(std::string_view s);

double db_to_linear(double db);
double linear_to_db(double lin);

/// Coherence-block sample budget. Reported only; never enters the
/// optimization.
struct BlockMeta {
  double duration_s = 0.0;
  double bandwidth_hz = 0.0;
  int samples = 0;
  int pilot_samples = 0;
  int uplink_samples = 0;
  int downlink_samples = 0;
};

struct SystemParams {
  int num_antennas = 100;
  double uplink_snr = 10.0;    // linear
  double downlink_snr = 10.0;  // linear
  int pilot_len = 1;
  int num_pilots = 12;
  double pathloss_exp = 3.7;
  double ref_dist_m = 200.0;
  bool perfect_csi = false;
  std::optional<BlockMeta> block_meta;

  /// Throws DomainError on violated invariants.
  void validate() const;
};

struct Device {
  int id = 0;
  double dist_m = 0.0;  // 0 when beta was supplied directly
  double beta = 0.0;
  double gamma = 0.0;
  int up_demand = 0;
  int down_demand = 0;
  double sinr_threshold = 1.0;  // linear
};

struct Instance {
  SystemParams params;
  std::vector<Device> devices;

  int size() const { return static_cast<int>(devices.size()); }
  const Device& device(int k) const { return devices.at(static_cast<std::size_t>(k)); }

  /// Checks ids are dense, gamma is consistent with beta, and every device
  /// has some demand.
  void validate() const;
};

/// Builds a device, deriving gamma from beta under the given parameters.
Device make_device(int id, double beta, int up_demand, int down_demand,
                   double sinr_threshold, const SystemParams& params,
                   double dist_m = 0.0);

/// One column of the frame problem: who transmits, who receives, and with
/// what power. Power vectors run parallel to the (sorted) id lists.
struct CompatibleSet {
  std::vector<int> tx;
  std::vector<int> rx;
  std::vector<double> eta_up;
  std::vector<double> eta_down;

  /// Union of tx and rx, sorted.
  std::vector<int> members() const;
  bool transmits(int k) const;
  bool receives(int k) const;
  double up_power(int k) const;
  double down_power(int k) const;
  bool empty() const { return tx.empty() && rx.empty(); }
};

/// Dense per-device power coefficients (index = device id).
struct PowerVector {
  std::vector<double> up;
  std::vector<double> down;

  static PowerVector zeros(int num_devices);
};

CompatibleSet make_cset(std::vector<int> tx, std::vector<int> rx, const PowerVector& powers);
PowerVector dense_powers(const CompatibleSet& c, int num_devices);

/// (r/R)^-alpha.
double path_loss_beta(double dist_m, const SystemParams& params);

/// Mean-square channel estimate S rho beta^2 / (1 + S rho beta), or beta
/// itself with perfect CSI.
double channel_gamma(double beta, const SystemParams& params);

/// Effective SINR of device k with sums restricted to the active set of
/// the given direction. For ZF the antenna term is (M - L), L being the
/// number of direction-active devices.
double effective_sinr(const Instance& inst, Precoder precoder, Direction dir,
                      std::span<const int> active_tx, std::span<const int> active_rx,
                      const PowerVector& powers, int k);

}  // namespace mmimo
