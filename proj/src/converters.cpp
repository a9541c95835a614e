#include "nanogrid/converters.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "nanogrid/error.hpp"

namespace nanogrid {
namespace {

double shape(const PartLoadCurve& c, double l) { return l / (l + c.a0 + c.a1 * l * l); }

double load_fraction(const ConverterSpec& spec, double throughput_kw) {
  return std::clamp(throughput_kw / spec.rated_power_kw, spec.curve.min_load_fraction, 1.0);
}

// Efficiency as a function of the already-clamped load fraction.
double efficiency_at_fraction(const ConverterSpec& spec, double l) {
  if (spec.kind == ConverterKind::none) return 1.0;
  return spec.peak_efficiency * std::min(1.0, shape(spec.curve, l) / shape(spec.curve, 1.0));
}

// Load fraction above which the curve sits on its peak plateau.
double plateau_start(const PartLoadCurve& c) {
  if (c.a1 <= 0.0) return 1.0;
  return std::min(1.0, c.a0 / c.a1);
}

double stage_input(const ConverterSpec& spec, double out) {
  if (out == 0.0 || spec.kind == ConverterKind::none) return out;

  const double rated = spec.rated_power_kw;
  const double capacity = rated * spec.peak_efficiency;
  if (out > capacity * (1.0 + 1e-12))
    throw InfeasibleDemand(fmt::format("{} rated {} kW cannot deliver {:.6g} kW (capacity {:.6g} kW)",
                                       to_string(spec.kind), rated, out, capacity));

  const double l_min = spec.curve.min_load_fraction;
  const double eta_min = efficiency_at_fraction(spec, l_min);
  if (out <= rated * l_min * eta_min) return out / eta_min;

  const double l_plateau = std::max(plateau_start(spec.curve), l_min);
  if (out >= rated * l_plateau * spec.peak_efficiency) return out / spec.peak_efficiency;

  // Rising part: out = K R l^2 / (l + a0 + a1 l^2) with K = peak / g(1).
  const double a0 = spec.curve.a0;
  const double a1 = spec.curve.a1;
  const double k = spec.peak_efficiency / shape(spec.curve, 1.0);
  const double qa = k * rated - out * a1;
  double l = (out + std::sqrt(out * out + 4.0 * qa * out * a0)) / (2.0 * qa);

  // One Newton polish on f(l) = R l eta(l) - out.
  const double f = rated * l * efficiency_at_fraction(spec, l) - out;
  const double den = l + a0 + a1 * l * l;
  const double df = k * rated * (l * l + 2.0 * a0 * l) / (den * den);
  if (df > 0.0) l -= f / df;
  return l * rated;
}

}  // namespace

std::string_view to_string(ConverterKind kind) {
  switch (kind) {
    case ConverterKind::inverter: return "inverter";
    case ConverterKind::rectifier: return "rectifier";
    case ConverterKind::mppt: return "mppt";
    case ConverterKind::dc_dc: return "dc_dc";
    case ConverterKind::hp_inverter: return "hp_inverter";
    case ConverterKind::none: return "none";
  }
  return "none";
}

ConverterKind converter_kind_from_string(std::string_view name) {
  for (auto kind : {ConverterKind::inverter, ConverterKind::rectifier, ConverterKind::mppt,
                    ConverterKind::dc_dc, ConverterKind::hp_inverter, ConverterKind::none}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidInput(fmt::format("unknown converter kind '{}'", name));
}

std::string_view to_string(TopologyName name) {
  switch (name) {
    case TopologyName::ac_baseline: return "ac_baseline";
    case TopologyName::dc_retrofit: return "dc_retrofit";
    case TopologyName::dc_ideal: return "dc_ideal";
  }
  return "ac_baseline";
}

TopologyName topology_name_from_string(std::string_view name) {
  for (auto t : {TopologyName::ac_baseline, TopologyName::dc_retrofit, TopologyName::dc_ideal}) {
    if (to_string(t) == name) return t;
  }
  throw InvalidInput(fmt::format("unknown topology '{}'", name));
}

void ConverterSpec::validate() const {
  if (!(peak_efficiency > 0.0 && peak_efficiency <= 1.0))
    throw InvalidInput(fmt::format("{} peak efficiency {} not in (0, 1]", to_string(kind), peak_efficiency));
  if (!(rated_power_kw > 0.0) || !std::isfinite(rated_power_kw))
    throw InvalidInput(fmt::format("{} rated power must be positive", to_string(kind)));
  if (!(curve.a0 >= 0.0) || !(curve.a1 >= 0.0) || !std::isfinite(curve.a0) || !std::isfinite(curve.a1))
    throw InvalidInput(fmt::format("{} curve constants must be non-negative", to_string(kind)));
  if (!(curve.min_load_fraction > 0.0 && curve.min_load_fraction <= 1.0))
    throw InvalidInput(fmt::format("{} minimum load fraction must be in (0, 1]", to_string(kind)));
}

double efficiency_at(const ConverterSpec& spec, double throughput_kw) {
  if (!std::isfinite(throughput_kw) || throughput_kw < 0.0)
    throw InvalidInput(fmt::format("converter throughput must be non-negative, got {}", throughput_kw));
  return efficiency_at_fraction(spec, load_fraction(spec, throughput_kw));
}

PathFlow apply_path(const ConverterPath& path, double input_kw) {
  if (!std::isfinite(input_kw) || input_kw < 0.0)
    throw InvalidInput(fmt::format("path input must be non-negative, got {}", input_kw));
  double power = input_kw;
  for (const auto& stage : path) power *= efficiency_at(stage, power);
  return {power, input_kw - power};
}

double required_input(const ConverterPath& path, double output_kw) {
  if (!std::isfinite(output_kw) || output_kw < 0.0)
    throw InvalidInput(fmt::format("path output must be non-negative, got {}", output_kw));
  double power = output_kw;
  for (auto it = path.rbegin(); it != path.rend(); ++it) power = stage_input(*it, power);
  return power;
}

double path_capacity(const ConverterPath& path) {
  // Walk backwards, tightening the admissible stage output by each stage's
  // own capacity and mapping it to that stage's input.
  double limit = std::numeric_limits<double>::infinity();
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    if (it->kind == ConverterKind::none) continue;
    limit = stage_input(*it, std::min(limit, it->rated_power_kw * it->peak_efficiency));
  }
  if (std::isinf(limit)) return limit;
  return apply_path(path, limit).output_kw;
}

TopologyOptions TopologyOptions::defaults() {
  TopologyOptions o;
  auto add = [&o](ConverterKind kind, double peak) {
    ConverterSpec s;
    s.kind = kind;
    s.peak_efficiency = peak;
    o.converters[kind] = s;
  };
  add(ConverterKind::inverter, 0.95);
  add(ConverterKind::rectifier, 0.95);
  add(ConverterKind::mppt, 0.98);
  add(ConverterKind::dc_dc, 0.98);
  add(ConverterKind::hp_inverter, 0.97);
  return o;
}

std::vector<Topology> builtin_topologies(const TopologyOptions& options) {
  auto make = [&options](ConverterKind kind, double rated) {
    auto it = options.converters.find(kind);
    if (it == options.converters.end())
      throw InvalidInput(fmt::format("no converter definition for '{}'", to_string(kind)));
    ConverterSpec s = it->second;
    s.kind = kind;
    s.rated_power_kw = rated;
    s.validate();
    return s;
  };
  using K = ConverterKind;

  Topology ac;
  ac.name = TopologyName::ac_baseline;
  ac.pv_to_bus = {make(K::mppt, options.pv_rated_kw), make(K::inverter, options.pv_rated_kw)};
  ac.battery_to_bus = {make(K::inverter, options.battery_rated_kw)};
  ac.bus_to_heatpump = {make(K::rectifier, options.heatpump_rated_kw),
                        make(K::hp_inverter, options.heatpump_rated_kw)};

  Topology retrofit;
  retrofit.name = TopologyName::dc_retrofit;
  retrofit.pv_to_bus = {make(K::mppt, options.pv_rated_kw), make(K::dc_dc, options.pv_rated_kw)};
  retrofit.battery_to_bus = {make(K::dc_dc, options.battery_rated_kw)};
  retrofit.bus_to_heatpump = {make(K::hp_inverter, options.heatpump_rated_kw)};
  retrofit.bus_to_house = {make(K::inverter, options.house_rated_kw)};

  Topology ideal = retrofit;
  ideal.name = TopologyName::dc_ideal;
  ideal.bus_to_heatpump.clear();

  return {ac, retrofit, ideal};
}

}  // namespace nanogrid
