#include "nanogrid/config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>

#include "nanogrid/error.hpp"

namespace nanogrid {
namespace {

using json = nlohmann::json;
using Setter = std::function<void(ScenarioConfig&, const json&, const std::filesystem::path&)>;

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw InvalidInput(fmt::format("config key '{}' must be a number", key));
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw InvalidInput(fmt::format("config key '{}' must be a string", key));
  return v.get<std::string>();
}

std::filesystem::path as_path(const json& v, const std::string& key, const std::filesystem::path& base) {
  std::filesystem::path p = as_string(v, key);
  return p.is_absolute() || base.empty() ? p : base / p;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto path_key = [&t](const std::string& key, std::optional<std::filesystem::path> ScenarioConfig::*field) {
      t[key] = [key, field](ScenarioConfig& c, const json& v, const std::filesystem::path& base) {
        c.*field = as_path(v, key, base);
      };
    };
    auto num_key = [&t](const std::string& key, std::function<double&(ScenarioConfig&)> ref) {
      t[key] = [key, ref](ScenarioConfig& c, const json& v, const std::filesystem::path&) {
        ref(c) = as_number(v, key);
      };
    };

    path_key("loads_csv", &ScenarioConfig::loads_csv);
    path_key("pv_csv", &ScenarioConfig::pv_csv);
    path_key("irradiance_csv", &ScenarioConfig::irradiance_csv);
    path_key("lab_csv", &ScenarioConfig::lab_csv);
    path_key("field_csv", &ScenarioConfig::field_csv);
    t["out_dir"] = [](ScenarioConfig& c, const json& v, const std::filesystem::path& base) {
      c.out_dir = as_path(v, "out_dir", base);
    };
    t["topology"] = [](ScenarioConfig& c, const json& v, const std::filesystem::path&) {
      c.topology = as_string(v, "topology");
    };
    t["synth"] = [](ScenarioConfig& c, const json& v, const std::filesystem::path&) {
      if (!v.is_boolean()) throw InvalidInput("config key 'synth' must be true or false");
      c.synth = v.get<bool>();
    };
    t["seed"] = [](ScenarioConfig& c, const json& v, const std::filesystem::path&) {
      if (!v.is_number_unsigned()) throw InvalidInput("config key 'seed' must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    };
    t["days"] = [](ScenarioConfig& c, const json& v, const std::filesystem::path&) {
      if (!v.is_number_integer()) throw InvalidInput("config key 'days' must be an integer");
      c.days = v.get<int>();
    };

    num_key("battery.energy_capacity_kwh", [](ScenarioConfig& c) -> double& { return c.battery.energy_capacity_kwh; });
    num_key("battery.power_capacity_kw", [](ScenarioConfig& c) -> double& { return c.battery.power_capacity_kw; });
    num_key("battery.time_constant_h",
            [](ScenarioConfig& c) -> double& { return c.battery.dissipation_time_constant_h; });
    num_key("battery.efficiency", [](ScenarioConfig& c) -> double& { return c.battery.efficiency; });
    num_key("battery.timestep_h", [](ScenarioConfig& c) -> double& { return c.battery.timestep_h; });
    num_key("battery.initial_energy_kwh", [](ScenarioConfig& c) -> double& { return c.initial_energy_kwh; });

    t["dispatch.control_law"] = [](ScenarioConfig& c, const json& v, const std::filesystem::path&) {
      c.control_law = control_law_from_string(as_string(v, "dispatch.control_law"));
    };
    t["dispatch.indoor_unit_on_nanogrid"] = [](ScenarioConfig& c, const json& v, const std::filesystem::path&) {
      if (!v.is_boolean()) throw InvalidInput("config key 'dispatch.indoor_unit_on_nanogrid' must be true or false");
      c.indoor_unit_on_nanogrid = v.get<bool>();
    };

    num_key("tariff.price_usd_per_kwh",
            [](ScenarioConfig& c) -> double& { return c.tariff.volumetric_price_usd_per_kwh; });
    num_key("tariff.export_credit_usd_per_kwh",
            [](ScenarioConfig& c) -> double& { return c.tariff.export_credit_usd_per_kwh; });

    for (auto kind : {ConverterKind::inverter, ConverterKind::rectifier, ConverterKind::mppt, ConverterKind::dc_dc,
                      ConverterKind::hp_inverter}) {
      const std::string prefix = fmt::format("converter.{}.", to_string(kind));
      num_key(prefix + "peak_efficiency",
              [kind](ScenarioConfig& c) -> double& { return c.converters.converters[kind].peak_efficiency; });
      num_key(prefix + "a0", [kind](ScenarioConfig& c) -> double& { return c.converters.converters[kind].curve.a0; });
      num_key(prefix + "a1", [kind](ScenarioConfig& c) -> double& { return c.converters.converters[kind].curve.a1; });
      num_key(prefix + "min_load_fraction", [kind](ScenarioConfig& c) -> double& {
        return c.converters.converters[kind].curve.min_load_fraction;
      });
    }
    num_key("rated.pv_kw", [](ScenarioConfig& c) -> double& { return c.converters.pv_rated_kw; });
    num_key("rated.battery_kw", [](ScenarioConfig& c) -> double& { return c.converters.battery_rated_kw; });
    num_key("rated.heatpump_kw", [](ScenarioConfig& c) -> double& { return c.converters.heatpump_rated_kw; });
    num_key("rated.house_kw", [](ScenarioConfig& c) -> double& { return c.converters.house_rated_kw; });

    num_key("pv.derate", [](ScenarioConfig& c) -> double& { return c.pv.derate; });
    num_key("pv.albedo", [](ScenarioConfig& c) -> double& { return c.pv.albedo; });
    num_key("pv.module_power_w", [](ScenarioConfig& c) -> double& { return c.module_power_w; });

    t["gap.max_interpolated_steps"] = [](ScenarioConfig& c, const json& v, const std::filesystem::path&) {
      if (!v.is_number_integer() || v.get<int>() < 0)
        throw InvalidInput("config key 'gap.max_interpolated_steps' must be a non-negative integer");
      c.gap.max_interpolated_steps = v.get<int>();
    };

    num_key("analysis.setpoint_c", [](ScenarioConfig& c) -> double& { return c.analysis.setpoint_c; });
    num_key("analysis.zero_demand_delta_t_c",
            [](ScenarioConfig& c) -> double& { return c.analysis.zero_demand_delta_t_c; });
    num_key("analysis.energy_balance_tolerance",
            [](ScenarioConfig& c) -> double& { return c.analysis.energy_balance_tolerance; });
    num_key("analysis.band_z", [](ScenarioConfig& c) -> double& { return c.analysis.band_z; });
    num_key("analysis.min_day_coverage", [](ScenarioConfig& c) -> double& { return c.analysis.min_day_coverage; });
    return t;
  }();
  return table;
}

}  // namespace

void ScenarioConfig::apply_json(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    auto it = table.find(key);
    if (it == table.end()) throw InvalidInput(fmt::format("unknown config key '{}'", key));
    it->second(*this, value, base_dir);
  }
  validate();
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path.string(), 0, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  ScenarioConfig c;
  c.apply_json(buf.str(), path.parent_path());
  return c;
}

void ScenarioConfig::validate() const {
  battery.validate();
  tariff.validate();
  if (!(initial_energy_kwh >= 0.0 && initial_energy_kwh <= battery.energy_capacity_kwh))
    throw InvalidInput("battery.initial_energy_kwh must lie in [0, energy capacity]");
  if (days < 1) throw InvalidInput("days must be at least 1");
  if (topology != "all") topology_name_from_string(topology);
  for (const auto& [kind, spec] : converters.converters) {
    ConverterSpec s = spec;
    s.kind = kind;
    s.validate();
  }
  for (double r : {converters.pv_rated_kw, converters.battery_rated_kw, converters.heatpump_rated_kw,
                   converters.house_rated_kw}) {
    if (!(r > 0.0)) throw InvalidInput("rated path powers must be positive");
  }
  if (!(pv.derate > 0.0 && pv.derate <= 1.0)) throw InvalidInput("pv.derate must be in (0, 1]");
  if (!(pv.albedo >= 0.0 && pv.albedo <= 1.0)) throw InvalidInput("pv.albedo must be in [0, 1]");
  if (!(module_power_w > 0.0)) throw InvalidInput("pv.module_power_w must be positive");
  if (!(analysis.energy_balance_tolerance >= 0.0)) throw InvalidInput("energy balance tolerance must be >= 0");
  if (!(analysis.band_z > 0.0)) throw InvalidInput("analysis.band_z must be positive");
  if (!(analysis.min_day_coverage > 0.0 && analysis.min_day_coverage <= 1.0))
    throw InvalidInput("analysis.min_day_coverage must be in (0, 1]");
}

std::vector<Topology> ScenarioConfig::selected_topologies() const {
  auto all = builtin_topologies(converters);
  if (topology == "all") return all;
  const TopologyName wanted = topology_name_from_string(topology);
  std::vector<Topology> one;
  for (auto& t : all) {
    if (t.name == wanted) one.push_back(std::move(t));
  }
  return one;
}

std::string default_config_json() {
  const ScenarioConfig c;
  json doc = json::object();
  doc["topology"] = c.topology;
  doc["out_dir"] = c.out_dir.string();
  doc["seed"] = c.seed;
  doc["days"] = c.days;
  doc["battery.energy_capacity_kwh"] = c.battery.energy_capacity_kwh;
  doc["battery.power_capacity_kw"] = c.battery.power_capacity_kw;
  doc["battery.time_constant_h"] = c.battery.dissipation_time_constant_h;
  doc["battery.efficiency"] = c.battery.efficiency;
  doc["battery.timestep_h"] = c.battery.timestep_h;
  doc["battery.initial_energy_kwh"] = c.initial_energy_kwh;
  doc["dispatch.control_law"] = std::string(to_string(c.control_law));
  doc["dispatch.indoor_unit_on_nanogrid"] = c.indoor_unit_on_nanogrid;
  doc["tariff.price_usd_per_kwh"] = c.tariff.volumetric_price_usd_per_kwh;
  doc["tariff.export_credit_usd_per_kwh"] = c.tariff.export_credit_usd_per_kwh;
  for (const auto& [kind, spec] : c.converters.converters) {
    const std::string prefix = fmt::format("converter.{}.", to_string(kind));
    doc[prefix + "peak_efficiency"] = spec.peak_efficiency;
    doc[prefix + "a0"] = spec.curve.a0;
    doc[prefix + "a1"] = spec.curve.a1;
    doc[prefix + "min_load_fraction"] = spec.curve.min_load_fraction;
  }
  doc["rated.pv_kw"] = c.converters.pv_rated_kw;
  doc["rated.battery_kw"] = c.converters.battery_rated_kw;
  doc["rated.heatpump_kw"] = c.converters.heatpump_rated_kw;
  doc["rated.house_kw"] = c.converters.house_rated_kw;
  doc["pv.derate"] = c.pv.derate;
  doc["pv.albedo"] = c.pv.albedo;
  doc["pv.module_power_w"] = c.module_power_w;
  doc["gap.max_interpolated_steps"] = c.gap.max_interpolated_steps;
  doc["analysis.setpoint_c"] = c.analysis.setpoint_c;
  doc["analysis.zero_demand_delta_t_c"] = c.analysis.zero_demand_delta_t_c;
  doc["analysis.energy_balance_tolerance"] = c.analysis.energy_balance_tolerance;
  doc["analysis.band_z"] = c.analysis.band_z;
  doc["analysis.min_day_coverage"] = c.analysis.min_day_coverage;
  return doc.dump(2) + "\n";
}

}  // namespace nanogrid
