#pragma once

// Pricing: find the compatible set with the largest dual value
//   B(c) = sum_{k in tx} pi_up[k] + sum_{k in rx} pi_down[k]
// among all sets whose members meet their SINR thresholds under a given
// precoder and power scheme.
//
// Two engines solve the same problem. The MIP engine builds the big-M
// linearized formulation and hands it to branch and bound. The search
// engine exploits that uplink and downlink feasibility are independent apart
// from the shared pilot budget, and that every scheme yields a downward-closed
// feasible family; it runs an exact depth-first search over device roles.

#include <optional>
#include <string>
#include <vector>

#include "mmimo/milp/backend.hpp"
#include "mmimo/milp/mip.hpp"
#include "mmimo/model.hpp"
#include "mmimo/power.hpp"

namespace mmimo {

struct DualPrices {
  std::vector<double> up;    // per device
  std::vector<double> down;  // per device

  static DualPrices zeros(int num_devices);
  double value(const CompatibleSet& c) const;
};

/// Variable indices of a pricing MIP (-1 where absent).
struct PricingLayout {
  std::vector<int> u_up, u_down, u;
  std::vector<int> eta_up, eta_down;
  /// MRC: one product per device. ZF: K*K products, entry k*K+j = eta_k * u_j.
  std::vector<int> x_up, x_down;
  std::vector<int> z, y_up;
  std::vector<int> y_down;  // K*K, MRC fair only
  int phi = -1;
};

struct PricingModel {
  Precoder precoder = Precoder::MRC;
  PowerScheme scheme = PowerScheme::Optimal;
  double delta = 0.0;
  double max_gamma = 0.0;
  double max_mu = 0.0;
  double max_beta = 0.0;
  /// True when delta had to be enlarged beyond N (K rho B + 1).
  bool delta_enlarged = false;
  /// Devices excluded from transmitting because they fail even alone.
  std::vector<int> excluded_up;
  PricingLayout layout;
  milp::MipProblem mip;
};

enum class PricingEngine { Search, Mip };

std::string_view to_string(PricingEngine e);
PricingEngine parse_pricing_engine(std::string_view s);

struct PricingOptions {
  PricingEngine engine = PricingEngine::Search;
  double eps_rc = 1e-6;
  double time_limit_s = 60.0;
  const milp::SolverBackend* backend = nullptr;  // builtin when null
};

struct Candidate {
  CompatibleSet cset;
  double price = 0.0;
  std::string status;  // solver status of the pricing solve
  bool proven = true;  // false when returned from a timed-out solve
};

/// Builds the linearized pricing MIP. Throws PreconditionError on negative
/// or mis-sized duals.
PricingModel build_pricing(const Instance& inst, Precoder precoder, PowerScheme scheme,
                           const DualPrices& duals);

/// Solves a built pricing MIP. Returns nullopt when no set prices above
/// 1 + eps_rc. Throws PricingInconclusiveError on a timeout without a usable
/// incumbent.
std::optional<Candidate> solve_pricing(const Instance& inst, const PricingModel& model,
                                       const DualPrices& duals, const PricingOptions& opts = {});

/// Best set by the engine selected in opts, or nullopt if none prices out.
std::optional<Candidate> price(const Instance& inst, Precoder precoder, PowerScheme scheme,
                               const DualPrices& duals, const PricingOptions& opts = {});

/// Exact search engine. With a threshold of -inf it returns the overall
/// maximizer (including the empty set when nothing is positive).
std::optional<Candidate> search_pricing(const Instance& inst, Precoder precoder,
                                        PowerScheme scheme, const DualPrices& duals,
                                        double threshold, double time_limit_s = 60.0);

/// Power coefficients that make (tx, rx) compatible under the scheme, or
/// nullopt if the pair is infeasible. Optimal and Downlink return the
/// component-wise smallest coefficients.
std::optional<PowerVector> scheme_powers(const Instance& inst, Precoder precoder,
                                         PowerScheme scheme, std::span<const int> tx,
                                         std::span<const int> rx);

struct VerifyReport {
  bool ok = true;
  std::string reason;
  int device = -1;
  double margin = 0.0;  // SINR / threshold - 1 for SINR failures
};

/// Re-checks a set against the exact SINR expressions, the pilot budget, the
/// power budgets and the scheme's coefficient rules.
VerifyReport verify_candidate(const Instance& inst, Precoder precoder, PowerScheme scheme,
                              const CompatibleSet& c);

}  // namespace mmimo
