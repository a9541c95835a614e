#pragma once

#include <string_view>
#include <vector>

#include "nanogrid/battery.hpp"
#include "nanogrid/converters.hpp"
#include "nanogrid/series.hpp"
#include "nanogrid/timestamp.hpp"

namespace nanogrid {

/// How the state-of-charge headroom enters the control law.
///
/// `chemical_headroom` caps the chemical power u by the headroom directly, so
/// the next state always stays in [0, capacity]. `verbatim` applies the
/// headroom inside the electrical-domain min/max; on discharge this over-draws
/// by 1/eta and the battery step then reports a contract violation.
enum class ControlLaw { chemical_headroom, verbatim };

std::string_view to_string(ControlLaw law);
ControlLaw control_law_from_string(std::string_view name);

struct PathLosses {
  double pv_kw = 0.0;
  double battery_kw = 0.0;
  double heatpump_kw = 0.0;
  double house_kw = 0.0;
};

/// Bus power balance for one step. All powers in kW, bus side unless noted.
struct StepFlows {
  Timestamp timestamp;
  double s = 0.0;        // PV supply
  double d = 0.0;        // heat-pump demand
  double u = 0.0;        // chemical battery power
  double b = 0.0;        // battery power drawn from the bus
  double x_next = 0.0;   // stored energy at the end of the step, kWh
  double p = 0.0;        // export to the house, negative = import
  double p_house = 0.0;  // p after the house path, as seen by the house meter
  PathLosses losses;
};

/// Priority control for an identity battery path: solar serves the heat
/// pump, surplus charges the battery; deficits draw on the battery first.
double control(double s_kw, double d_kw, BatteryState state, const BatteryParams& params,
               ControlLaw law = ControlLaw::chemical_headroom);

struct BatteryDispatch {
  double u_kw;         // chemical
  double b_kw;         // bus side
  double terminal_kw;  // battery terminals
};

/// Control law generalized to a converter chain between bus and battery.
/// |b| <= power capacity holds on the bus side; with an empty path this
/// reduces to control().
BatteryDispatch dispatch_battery(double net_bus_kw, BatteryState state, const BatteryParams& params,
                                 const ConverterPath& battery_path,
                                 ControlLaw law = ControlLaw::chemical_headroom);

struct DispatchOptions {
  ControlLaw law = ControlLaw::chemical_headroom;
  BatteryState initial{};
};

/// Column names simulate() reads.
inline constexpr std::string_view kPvColumn = "pv_dc_kw";
inline constexpr std::string_view kHeatPumpColumn = "hp_power_kw";
inline constexpr std::string_view kHouseColumn = "house_power_kw";
inline constexpr std::string_view kIndoorUnitColumn = "hp_indoor_kw";

/// Folds the optional indoor-unit column into either the heat-pump or the
/// house load and drops it. Without the column the series is returned unchanged.
AlignedSeries assign_indoor_unit(AlignedSeries series, bool indoor_unit_on_nanogrid);

/// Runs the dispatch over every step of `series`.
/// Throws SchemaError for a timestep mismatch or invalid values and
/// InfeasibleDemand (naming the timestamp) when a path cannot carry the load.
std::vector<StepFlows> simulate(const AlignedSeries& series, const Topology& topology,
                                const BatteryParams& params, const DispatchOptions& options = {});

/// simulate() for several topologies, one task each.
std::vector<std::vector<StepFlows>> simulate_all(const AlignedSeries& series,
                                                 const std::vector<Topology>& topologies,
                                                 const BatteryParams& params,
                                                 const DispatchOptions& options = {});

}  // namespace nanogrid
