#pragma once

// Two-phase frame minimization. Phase 1 solves the linear relaxation of the
// frame problem by generating compatible sets; Phase 2 solves the integer
// problem restricted to the generated sets (price and branch).

#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "mmimo/model.hpp"
#include "mmimo/power.hpp"
#include "mmimo/pricing.hpp"

namespace mmimo {

/// Ordered set of compatible sets without duplicates.
class ColumnPool {
 public:
  /// Returns false (and leaves the pool unchanged) on a duplicate.
  bool add(CompatibleSet c);
  bool contains(const CompatibleSet& c) const;

  int size() const { return static_cast<int>(sets_.size()); }
  const CompatibleSet& operator[](int i) const { return sets_[static_cast<std::size_t>(i)]; }
  const std::vector<CompatibleSet>& sets() const { return sets_; }

  static std::string key(const CompatibleSet& c);

 private:
  std::vector<CompatibleSet> sets_;
  std::unordered_set<std::string> keys_;
};

/// One singleton set per device. Throws InstanceInfeasibleError naming the
/// first device that cannot be served alone.
ColumnPool initial_pool(const Instance& inst, Precoder precoder, PowerScheme scheme);

struct MasterSolution {
  std::vector<double> t;  // one per pooled set
  DualPrices duals;
  double objective = 0.0;
  int iterations = 0;

  int nonzeros(double tol = 1e-9) const;
};

/// Solves min sum t_c subject to demand covering over the pool.
MasterSolution solve_master(const Instance& inst, const ColumnPool& pool);

struct CgIteration {
  int iteration = 0;
  double objective = 0.0;
  double price = 0.0;  // best B of the pricing solve, 0 when nothing priced out
  int pool_size = 0;
  double master_s = 0.0;
  double pricing_s = 0.0;
  std::string pricing_status;
};

struct CgOptions {
  PricingOptions pricing;
  int iter_cap = 2000;
  /// Stop once the objective improves by less than 1e-3 over 10 iterations.
  bool early_stop = false;
  /// Starting pool; singletons when empty.
  std::optional<ColumnPool> initial;
  std::function<void(const CgIteration&)> on_iteration;
};

struct CgResult {
  ColumnPool pool;
  MasterSolution master;
  std::vector<CgIteration> log;
  /// True when the loop ended because no set prices out.
  bool proven = false;
  std::string stop_reason;  // converged, iter_cap, early_stop, stall, pricing_timeout
  double master_s = 0.0;
  double pricing_s = 0.0;
};

CgResult run_cg(const Instance& inst, Precoder precoder, PowerScheme scheme,
                const CgOptions& opts = {});

struct ScheduleEntry {
  CompatibleSet cset;
  int blocks = 0;
};

struct ScheduleMetrics {
  double total_power = 0.0;
  double max_node_power = 0.0;
};

struct Schedule {
  std::vector<ScheduleEntry> entries;
  int frame_size = 0;
  std::string status;  // optimal, timeout, rounding
  double bound = 0.0;  // best proven lower bound of the restricted problem
  double gap = 0.0;
  double seconds = 0.0;
  long long nodes = 0;
  int pool_size = 0;
};

struct FrameIpOptions {
  double time_limit_s = 60.0;
  std::function<void(const milp::NodeEvent&)> on_node;
};

/// Rounds every t_c up. Always covers demands when t covers them.
Schedule round_up(const ColumnPool& pool, const MasterSolution& master);

/// Integer frame problem over the whole pool, seeded with round_up.
Schedule solve_frame_ip(const Instance& inst, const ColumnPool& pool, const MasterSolution& master,
                        const FrameIpOptions& opts = {});

/// Integer frame problem over the sets with positive t in the final master.
Schedule heuristic_frame_ip(const Instance& inst, const ColumnPool& pool,
                            const MasterSolution& master, const FrameIpOptions& opts = {});

struct Bounds {
  int pigeonhole = 0;
  int lp_bound = 0;  // 0 without a relaxation value
};

Bounds lower_bounds(const Instance& inst, std::optional<double> lr_objective = std::nullopt);

struct ScheduleReport {
  bool ok = true;
  std::string reason;  // covering_up, covering_down, or a verify_candidate reason
  int device = -1;
  int entry = -1;
  ScheduleMetrics metrics;
};

ScheduleReport validate_schedule(const Instance& inst, Precoder precoder, PowerScheme scheme,
                                 const Schedule& s);

ScheduleMetrics schedule_metrics(const Schedule& s);

nlohmann::json schedule_to_json(const Schedule& s);

}  // namespace mmimo
