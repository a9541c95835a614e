#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nanogrid {

enum class ConverterKind { inverter, rectifier, mppt, dc_dc, hp_inverter, none };

std::string_view to_string(ConverterKind kind);
/// Throws InvalidInput on an unknown name.
ConverterKind converter_kind_from_string(std::string_view name);

/// Coefficients of the part-load shape g(l) = l / (l + a0 + a1 l^2).
struct PartLoadCurve {
  double a0 = 0.01;
  double a1 = 0.05;
  double min_load_fraction = 0.01;
};

struct ConverterSpec {
  ConverterKind kind = ConverterKind::none;
  double peak_efficiency = 1.0;
  double rated_power_kw = 1.0;
  PartLoadCurve curve{};

  void validate() const;
};

/// Ordered conversion stages; an empty path passes power through unchanged.
using ConverterPath = std::vector<ConverterSpec>;

enum class TopologyName { ac_baseline, dc_retrofit, dc_ideal };

std::string_view to_string(TopologyName name);
TopologyName topology_name_from_string(std::string_view name);

struct Topology {
  TopologyName name = TopologyName::ac_baseline;
  ConverterPath pv_to_bus;
  ConverterPath battery_to_bus;  // used in both directions
  ConverterPath bus_to_heatpump;
  ConverterPath bus_to_house;    // used in both directions
};

struct PathFlow {
  double output_kw;
  double loss_kw;
};

/// Efficiency at a given throughput. The load fraction is clamped to
/// [min_load_fraction, 1]; the result never exceeds peak_efficiency.
/// Throws InvalidInput for negative or non-finite throughput.
double efficiency_at(const ConverterSpec& spec, double throughput_kw);

/// Pushes `input_kw` through each stage in order, each stage seeing the
/// previous stage's output as its throughput.
PathFlow apply_path(const ConverterPath& path, double input_kw);

/// Input power whose apply_path output equals `output_kw`.
/// Throws InfeasibleDemand if any stage would need more than its rated
/// output (rated_power_kw * peak_efficiency).
double required_input(const ConverterPath& path, double output_kw);

/// Largest output a path can deliver without exceeding any stage rating.
double path_capacity(const ConverterPath& path);

/// Peak efficiencies, curve constants, and path ratings used to build the
/// built-in topologies. Defaults are the nameplate values of the modelled house.
struct TopologyOptions {
  std::map<ConverterKind, ConverterSpec> converters;
  double pv_rated_kw = 14.3;
  double battery_rated_kw = 12.5;
  double heatpump_rated_kw = 5.0;
  double house_rated_kw = 10.0;

  static TopologyOptions defaults();
};

/// ac_baseline, dc_retrofit and dc_ideal, in that order.
std::vector<Topology> builtin_topologies(const TopologyOptions& options = TopologyOptions::defaults());

}  // namespace nanogrid
