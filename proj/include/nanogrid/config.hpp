#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nanogrid/battery.hpp"
#include "nanogrid/billing.hpp"
#include "nanogrid/converters.hpp"
#include "nanogrid/dispatch.hpp"
#include "nanogrid/io.hpp"
#include "nanogrid/pvsolar.hpp"

namespace nanogrid {

struct AnalysisOptions {
  double setpoint_c = 20.5;
  double zero_demand_delta_t_c = 8.0;
  double energy_balance_tolerance = 0.06;
  double band_z = 1.645;
  double min_day_coverage = 20.0 / 24.0;
};

/// Everything one CLI invocation needs. Defaults are the reference-house values.
///
/// The on-disk form is a flat JSON object with dotted keys, e.g.
/// `{"battery.energy_capacity_kwh": 20, "converter.mppt.peak_efficiency": 0.98}`.
/// Relative paths resolve against the config file's directory.
struct ScenarioConfig {
  std::optional<std::filesystem::path> loads_csv;
  std::optional<std::filesystem::path> pv_csv;
  std::optional<std::filesystem::path> irradiance_csv;
  std::optional<std::filesystem::path> lab_csv;
  std::optional<std::filesystem::path> field_csv;
  std::filesystem::path out_dir = "out";

  std::string topology = "all";
  bool synth = false;
  std::uint64_t seed = 42;
  int days = 365;

  BatteryParams battery{};
  double initial_energy_kwh = 0.0;
  ControlLaw control_law = ControlLaw::chemical_headroom;
  bool indoor_unit_on_nanogrid = true;

  Tariff tariff{};
  TopologyOptions converters = TopologyOptions::defaults();
  PvModelOptions pv{};
  double module_power_w = 14300.0 / 42.0;
  io::GapPolicy gap{};
  AnalysisOptions analysis{};

  /// Reads and applies a config file. Throws InvalidInput for unknown keys,
  /// wrong value types, or out-of-range values; SchemaError if unreadable.
  static ScenarioConfig load(const std::filesystem::path& path);

  /// Applies the keys of a JSON document (as text) on top of the current values.
  void apply_json(const std::string& text, const std::filesystem::path& base_dir);

  /// Topologies selected by `topology` ("all" or one name).
  std::vector<Topology> selected_topologies() const;

  void validate() const;
};

/// The shipped default configuration as a JSON document, every key present.
std::string default_config_json();

}  // namespace nanogrid
