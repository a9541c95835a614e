#include "nanogrid/battery.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "nanogrid/error.hpp"

namespace nanogrid {

void BatteryParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0)
      throw InvalidInput(fmt::format("battery {} must be finite and positive, got {}", name, v));
  };
  positive(energy_capacity_kwh, "energy capacity");
  positive(power_capacity_kw, "power capacity");
  positive(dissipation_time_constant_h, "time constant");
  positive(efficiency, "efficiency");
  positive(timestep_h, "timestep");
  if (efficiency > 1.0) throw InvalidInput(fmt::format("battery efficiency {} exceeds 1", efficiency));
}

double BatteryParams::decay() const { return std::exp(-timestep_h / dissipation_time_constant_h); }

double BatteryParams::input_gain() const {
  return -std::expm1(-timestep_h / dissipation_time_constant_h) * dissipation_time_constant_h;
}

double propagate(double x, double u, double dt_h, double tau_h) {
  const double a = std::exp(-dt_h / tau_h);
  return a * x + (-std::expm1(-dt_h / tau_h) * tau_h) * u;
}

BatteryState step(BatteryState state, double chemical_power_kw, const BatteryParams& params) {
  if (!std::isfinite(state.stored_energy_kwh) || !std::isfinite(chemical_power_kw))
    throw InvalidInput("battery step received a non-finite state or power");

  const double cap = params.energy_capacity_kwh;
  double next = params.decay() * state.stored_energy_kwh + params.input_gain() * chemical_power_kw;
  if (next < -kSocTolerance || next > cap + kSocTolerance)
    throw ContractViolation(fmt::format(
        "battery energy {:.12g} kWh outside [0, {}] after u = {:.12g} kW", next, cap, chemical_power_kw));
  return {std::clamp(next, 0.0, cap)};
}

double electrical_power(double chemical_power_kw, const BatteryParams& params) {
  if (!std::isfinite(chemical_power_kw)) throw InvalidInput("non-finite chemical power");
  const double eta = params.efficiency;
  return std::max(eta * chemical_power_kw, chemical_power_kw / eta);
}

double chemical_power(double electrical_power_kw, const BatteryParams& params) {
  if (!std::isfinite(electrical_power_kw)) throw InvalidInput("non-finite electrical power");
  const double eta = params.efficiency;
  return std::min(eta * electrical_power_kw, electrical_power_kw / eta);
}

double charge_headroom_kw(BatteryState state, const BatteryParams& params) {
  return (params.energy_capacity_kwh - params.decay() * state.stored_energy_kwh) / params.input_gain();
}

double discharge_headroom_kw(BatteryState state, const BatteryParams& params) {
  return params.decay() * state.stored_energy_kwh / params.input_gain();
}

ChemicalPowerBounds chemical_power_bounds(BatteryState state, const BatteryParams& params) {
  const double eta = params.efficiency;
  const double cap = params.power_capacity_kw;
  // +0.0 turns a -0.0 from an empty battery into a plain zero.
  return {std::max(-cap / eta, -discharge_headroom_kw(state, params)) + 0.0,
          std::min(eta * cap, charge_headroom_kw(state, params))};
}

}  // namespace nanogrid
