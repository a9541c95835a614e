#pragma once

namespace nanogrid {

/// Lumped battery with first-order self-dissipation.
///
/// Stored chemical energy x obeys dx/dt = -x/tau + u, with u the chemical
/// charging power held constant over each step. Electrical power at the
/// terminals is b = max(eta*u, u/eta).
struct BatteryParams {
  double energy_capacity_kwh = 20.0;
  double power_capacity_kw = 12.5;  // symmetric limit on electrical power
  double dissipation_time_constant_h = 1600.0;
  double efficiency = 0.95;
  double timestep_h = 1.0;

  /// Throws InvalidInput unless every field is finite and positive and efficiency <= 1.
  void validate() const;

  /// Per-step decay factor a = exp(-dt/tau).
  double decay() const;
  /// (1 - a) * tau, the gain applied to u. Computed with expm1 to keep precision for dt << tau.
  double input_gain() const;
};

struct BatteryState {
  double stored_energy_kwh = 0.0;
};

/// Values this close outside [0, capacity] are clamped; anything further is an error.
inline constexpr double kSocTolerance = 1e-9;

/// Exact solution of dx/dt = -x/tau + u over `dt` hours with no bounds checking.
double propagate(double x, double u, double dt_h, double tau_h);

/// One exact step. Throws InvalidInput for non-finite arguments and
/// ContractViolation if the result leaves [-tol, capacity + tol].
BatteryState step(BatteryState state, double chemical_power_kw, const BatteryParams& params);

/// Electrical power drawn from the bus for a chemical power u.
double electrical_power(double chemical_power_kw, const BatteryParams& params);

/// Inverse of electrical_power.
double chemical_power(double electrical_power_kw, const BatteryParams& params);

struct ChemicalPowerBounds {
  double min_kw;
  double max_kw;
};

/// Range of u for which the next state stays in [0, capacity] and |b| <= power capacity.
ChemicalPowerBounds chemical_power_bounds(BatteryState state, const BatteryParams& params);

/// Largest chemical charging power that lands exactly on capacity: (cap - a x)/((1-a) tau).
double charge_headroom_kw(BatteryState state, const BatteryParams& params);
/// Largest chemical discharging power (positive number) that lands exactly on empty: a x/((1-a) tau).
double discharge_headroom_kw(BatteryState state, const BatteryParams& params);

}  // namespace nanogrid
