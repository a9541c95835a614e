#include "nanogrid/dispatch.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "nanogrid/error.hpp"

namespace nanogrid {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bus-side charging power that delivers `terminal_kw` at the battery, or inf
// when the path cannot deliver that much.
double bus_for_terminal(const ConverterPath& path, double terminal_kw) {
  if (terminal_kw > path_capacity(path)) return kInf;
  return required_input(path, terminal_kw);
}

}  // namespace

std::string_view to_string(ControlLaw law) {
  return law == ControlLaw::verbatim ? "verbatim" : "chemical_headroom";
}

ControlLaw control_law_from_string(std::string_view name) {
  if (name == "chemical_headroom") return ControlLaw::chemical_headroom;
  if (name == "verbatim") return ControlLaw::verbatim;
  throw InvalidInput(fmt::format("unknown control law '{}'", name));
}

BatteryDispatch dispatch_battery(double net_bus_kw, BatteryState state, const BatteryParams& params,
                                 const ConverterPath& battery_path, ControlLaw law) {
  const double eta = params.efficiency;
  const double cap = params.power_capacity_kw;
  const double up = charge_headroom_kw(state, params);
  const double down = discharge_headroom_kw(state, params);

  if (net_bus_kw >= 0.0) {
    double b = 0.0;
    if (law == ControlLaw::verbatim) {
      b = std::min({net_bus_kw, cap, up});
    } else {
      b = std::min({net_bus_kw, cap, bus_for_terminal(battery_path, up / eta)});
    }
    const double terminal = apply_path(battery_path, b).output_kw;
    double u = eta * terminal;
    if (law == ControlLaw::chemical_headroom) u = std::min(u, up);
    return {u, b, terminal};
  }

  const double deficit = -net_bus_kw;
  double delivered = 0.0;
  if (law == ControlLaw::verbatim) {
    delivered = std::min({deficit, cap, down});
  } else {
    delivered = std::min({deficit, cap, apply_path(battery_path, eta * down).output_kw});
  }
  delivered = std::min(delivered, path_capacity(battery_path));
  const double terminal = required_input(battery_path, delivered);
  double u = -terminal / eta;
  if (law == ControlLaw::chemical_headroom) u = std::max(u, -down);
  return {u + 0.0, -delivered + 0.0, -terminal + 0.0};
}

double control(double s_kw, double d_kw, BatteryState state, const BatteryParams& params, ControlLaw law) {
  if (!std::isfinite(s_kw) || !std::isfinite(d_kw) || s_kw < 0.0 || d_kw < 0.0)
    throw InvalidInput(fmt::format("control needs finite non-negative s and d, got {} and {}", s_kw, d_kw));
  return dispatch_battery(s_kw - d_kw, state, params, {}, law).u_kw;
}

AlignedSeries assign_indoor_unit(AlignedSeries series, bool indoor_unit_on_nanogrid) {
  if (!series.has(kIndoorUnitColumn)) return series;
  const std::string target{indoor_unit_on_nanogrid ? kHeatPumpColumn : kHouseColumn};
  Eigen::VectorXd merged = series.column(target) + series.column(kIndoorUnitColumn);
  series.set(target, std::move(merged));
  auto it = std::find(series.names.begin(), series.names.end(), kIndoorUnitColumn);
  const auto idx = it - series.names.begin();
  series.names.erase(it);
  series.columns.erase(series.columns.begin() + idx);
  return series;
}

std::vector<StepFlows> simulate(const AlignedSeries& series, const Topology& topology,
                                const BatteryParams& params, const DispatchOptions& options) {
  params.validate();
  if (std::abs(series.timestep_h - params.timestep_h) > 1e-9)
    throw SchemaError("", 0, fmt::format("series timestep {} h does not match battery timestep {} h",
                                         series.timestep_h, params.timestep_h));
  const auto& pv = series.column(kPvColumn);
  const auto& hp = series.column(kHeatPumpColumn);

  BatteryState state = options.initial;
  if (!(state.stored_energy_kwh >= 0.0 && state.stored_energy_kwh <= params.energy_capacity_kwh))
    throw InvalidInput(fmt::format("initial stored energy {} kWh outside [0, {}]", state.stored_energy_kwh,
                                   params.energy_capacity_kwh));

  std::vector<StepFlows> flows;
  flows.reserve(series.rows());
  for (std::size_t k = 0; k < series.rows(); ++k) {
    const Timestamp ts = series.timestamp(k);
    const double pv_kw = pv[static_cast<Eigen::Index>(k)];
    const double hp_kw = hp[static_cast<Eigen::Index>(k)];
    if (!std::isfinite(pv_kw) || !std::isfinite(hp_kw) || pv_kw < 0.0 || hp_kw < 0.0)
      throw SchemaError("", 0, fmt::format("{}: PV and heat-pump power must be finite and non-negative",
                                           ts.to_string()));

    StepFlows f;
    f.timestamp = ts;
    try {
      const PathFlow pv_flow = apply_path(topology.pv_to_bus, pv_kw);
      f.s = pv_flow.output_kw;
      f.losses.pv_kw = pv_flow.loss_kw;

      f.d = required_input(topology.bus_to_heatpump, hp_kw);
      f.losses.heatpump_kw = f.d - hp_kw;

      const double net = f.s - f.d;
      const BatteryDispatch bd = dispatch_battery(net, state, params, topology.battery_to_bus, options.law);
      f.u = bd.u_kw;
      f.b = bd.b_kw;
      f.losses.battery_kw = std::abs(bd.b_kw - bd.terminal_kw);
      state = step(state, f.u, params);
      f.x_next = state.stored_energy_kwh;

      // Same association as the battery saw, so a fully absorbed surplus leaves exactly 0.
      f.p = net - f.b;
      if (f.p >= 0.0) {
        const PathFlow out = apply_path(topology.bus_to_house, f.p);
        f.p_house = out.output_kw;
        f.losses.house_kw = out.loss_kw;
      } else {
        const double need = required_input(topology.bus_to_house, -f.p);
        f.p_house = -need;
        f.losses.house_kw = need + f.p;
      }
    } catch (const InfeasibleDemand& e) {
      throw InfeasibleDemand(fmt::format("{} ({}): {}", ts.to_string(), to_string(topology.name), e.what()));
    } catch (const ContractViolation& e) {
      throw ContractViolation(fmt::format("{} ({}): {}", ts.to_string(), to_string(topology.name), e.what()));
    }
    flows.push_back(f);
  }
  return flows;
}

std::vector<std::vector<StepFlows>> simulate_all(const AlignedSeries& series,
                                                 const std::vector<Topology>& topologies,
                                                 const BatteryParams& params,
                                                 const DispatchOptions& options) {
  std::vector<std::future<std::vector<StepFlows>>> tasks;
  tasks.reserve(topologies.size());
  for (const auto& topology : topologies) {
    tasks.push_back(std::async(std::launch::async, [&series, &topology, &params, &options] {
      return simulate(series, topology, params, options);
    }));
  }
  std::vector<std::vector<StepFlows>> results;
  results.reserve(tasks.size());
  for (auto& t : tasks) results.push_back(t.get());
  return results;
}

}  // namespace nanogrid
