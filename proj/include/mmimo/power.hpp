#pragma once

// Power-control schemes: closed-form max-min fair and static coefficients,
// the minimal feasible coefficients for jointly optimized power, and the
// dispatch that turns a compatible-set membership into a power vector.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mmimo/model.hpp"

namespace mmimo {

enum class PowerScheme { Optimal, Fair, Static, Downlink };

std::string_view to_string(PowerScheme s);
PowerScheme parse_power_scheme(std::string_view s);

/// True for the scheme that transmits every uplink at full power.
constexpr bool uplink_fixed_full(PowerScheme s) { return s == PowerScheme::Downlink; }

/// eta_up[k] = phi / gamma(k) for every device, phi the smallest gamma among
/// the active transmitters (0 when none). Inactive devices may exceed 1.
std::vector<double> fair_uplink(const Instance& inst, std::span<const int> active_tx);

/// Max-min fair downlink split of the base-station budget over active_rx;
/// zero elsewhere. Sums to one whenever active_rx is non-empty.
std::vector<double> fair_downlink(const Instance& inst, std::span<const int> active_rx,
                                  Precoder precoder);

/// min gamma / gamma(k) over the whole device population, both directions.
PowerVector static_coeffs(const Instance& inst);

/// Component-wise smallest uplink coefficients meeting every active SINR
/// threshold with eta <= 1, or nullopt if none exist.
std::optional<std::vector<double>> minimal_uplink_power(const Instance& inst, Precoder precoder,
                                                        std::span<const int> active_tx);

/// Smallest downlink coefficients meeting every active threshold within the
/// base-station budget, or nullopt.
std::optional<std::vector<double>> minimal_downlink_power(const Instance& inst,
                                                          Precoder precoder,
                                                          std::span<const int> active_rx);

/// Power vector for a membership under a scheme. For Optimal and Downlink the
/// coefficients come from `supplied` (the pricing solve) and are range-checked
/// only; Downlink additionally pins every transmitter to full power.
/// Throws InfeasiblePowerError on a budget violation.
PowerVector resolve_power(PowerScheme scheme, const Instance& inst, std::span<const int> tx,
                          std::span<const int> rx, Precoder precoder,
                          const PowerVector* supplied = nullptr);

}  // namespace mmimo
