#include "nanogrid/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "nanogrid/analysis.hpp"
#include "nanogrid/error.hpp"
#include "nanogrid/io.hpp"
#include "nanogrid/pvsolar.hpp"

namespace nanogrid::cli {
namespace {

namespace fs = std::filesystem;

class MissingInput : public Error {
 public:
  explicit MissingInput(const fs::path& p) : Error("input file not found: " + p.string()) {}
};

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw MissingInput(p);
}

// Tracks files written by one command so a failure can remove them.
class OutputSet {
 public:
  fs::path prepare(const fs::path& file) {
    const fs::path dir = file.parent_path();
    if (!dir.empty() && !fs::exists(dir)) {
      fs::create_directories(dir);
      dirs_.push_back(dir);
    }
    files_.push_back(file);
    return file;
  }

  void commit() { committed_ = true; }

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    for (auto it = dirs_.rbegin(); it != dirs_.rend(); ++it) {
      if (fs::is_empty(*it, ec)) fs::remove(*it, ec);
    }
  }

 private:
  std::vector<fs::path> files_;
  std::vector<fs::path> dirs_;
  bool committed_ = false;
};

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const MissingInput& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const InvalidInput& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kFailure;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kFailure;
  }
}

void check_aligned(const AlignedSeries& a, const AlignedSeries& b, const std::string& what) {
  if (a.start != b.start || a.timestep_seconds() != b.timestep_seconds() || a.rows() != b.rows())
    throw SchemaError(what, 0,
                      fmt::format("series misaligned with loads (start {} vs {}, step {} s vs {} s, {} vs {} rows)",
                                  b.start.to_string(), a.start.to_string(), b.timestep_seconds(),
                                  a.timestep_seconds(), b.rows(), a.rows()));
}

void configure_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = std::make_shared<spdlog::logger>("nanogrid", std::make_shared<spdlog::sinks::stderr_sink_mt>());
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::warn);
  if (const char* level = std::getenv("NANOGRID_LOG")) logger->set_level(spdlog::level::from_str(level));
  spdlog::set_default_logger(logger);
}

void write_report_row(std::ostream& out, std::string_view section, std::string_view label, std::string_view supply,
                      std::string_view metric, double value) {
  out << section << ',' << label << ',' << supply << ',' << metric << ',' << io::format_number(value) << '\n';
}

void report_fit(std::ostream& report, std::ostream& out, std::string_view section, Supply supply,
                const std::vector<double>& x, const std::vector<double>& y, int degree, double band_z) {
  if (x.size() < static_cast<std::size_t>(degree) + 2) {
    spdlog::warn("{} {}: {} points, too few for a degree-{} fit", section, to_string(supply), x.size(), degree);
    return;
  }
  PolyFit fit;
  try {
    fit = fit_poly(x, y, degree, band_z);
  } catch (const SingularFit& e) {
    spdlog::warn("{} {}: {}", section, to_string(supply), e.what());
    return;
  }
  for (Eigen::Index i = 0; i < fit.coefficients.size(); ++i)
    write_report_row(report, section, "", to_string(supply), fmt::format("coef_x{}", fit.degree - i),
                     fit.coefficients[i]);
  write_report_row(report, section, "", to_string(supply), "r_squared", fit.r_squared);
  write_report_row(report, section, "", to_string(supply), "residual_sigma", fit.residual_sigma);

  const double hi = std::ceil(*std::max_element(x.begin(), x.end()));
  const double lo = std::floor(*std::min_element(x.begin(), x.end()));
  const std::string band_section = std::string(section) + "_band";
  for (double xv = lo; xv <= hi + 1e-9; xv += 1.0) {
    const auto [lower, upper] = fit.band(xv);
    const std::string label = io::format_number(xv);
    write_report_row(report, band_section, label, to_string(supply), "lower", lower);
    write_report_row(report, band_section, label, to_string(supply), "prediction", fit.predict(xv));
    write_report_row(report, band_section, label, to_string(supply), "upper", upper);
  }
  fmt::print(out, "{:<11} {}  degree {}  R^2 = {:.3f}\n", section, to_string(supply), degree, fit.r_squared);
}

}  // namespace

AlignedSeries load_inputs(const ScenarioConfig& config) {
  if (config.synth) {
    AlignedSeries s = io::synth_scenario(config.seed, config.days);
    AlignedSeries inputs;
    inputs.start = s.start;
    inputs.timestep_h = s.timestep_h;
    for (auto name : {kPvColumn, kHeatPumpColumn, kHouseColumn}) inputs.set(std::string(name), s.column(name));
    return inputs;
  }

  if (!config.loads_csv) throw InvalidInput("no loads_csv configured (or use --synth)");
  if (!config.pv_csv && !config.irradiance_csv) throw InvalidInput("configure pv_csv or irradiance_csv");
  require_file(*config.loads_csv);
  if (config.pv_csv) require_file(*config.pv_csv);
  if (config.irradiance_csv) require_file(*config.irradiance_csv);

  AlignedSeries loads = io::read_series(*config.loads_csv, io::loads_schema(), config.gap);
  loads = assign_indoor_unit(std::move(loads), config.indoor_unit_on_nanogrid);

  Eigen::VectorXd pv;
  if (config.pv_csv) {
    const AlignedSeries pv_series = io::read_series(*config.pv_csv, io::pv_schema(), config.gap);
    check_aligned(loads, pv_series, config.pv_csv->string());
    pv = pv_series.column(kPvColumn);
  } else {
    const AlignedSeries irr = io::read_series(*config.irradiance_csv, io::irradiance_schema(), config.gap);
    check_aligned(loads, irr, config.irradiance_csv->string());
    const auto records = io::irradiance_records(irr);
    const auto arrays = reference_house_arrays(config.module_power_w);
    pv = pv_power(records, arrays, config.pv);
  }
  loads.set(std::string(kPvColumn), std::move(pv));
  return loads;
}

std::vector<TopologyResult> run_scenario(const ScenarioConfig& config, const AlignedSeries& inputs) {
  config.validate();
  const auto topologies = config.selected_topologies();
  DispatchOptions options;
  options.law = config.control_law;
  options.initial = {config.initial_energy_kwh};

  auto flows = simulate_all(inputs, topologies, config.battery, options);
  std::vector<TopologyResult> results;
  for (std::size_t i = 0; i < topologies.size(); ++i) {
    TopologyResult r{topologies[i].name, std::move(flows[i]), {}, 0.0};
    r.bills = monthly_bills(r.flows, inputs.column(kHouseColumn), config.tariff, inputs.timestep_h);
    r.annual_usd = annual_summary(r.bills).annual_usd;
    results.push_back(std::move(r));
  }
  return results;
}

int cmd_simulate(const ScenarioConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const AlignedSeries inputs = load_inputs(config);
    const auto results = run_scenario(config, inputs);
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    OutputSet outputs;
    for (const auto& r : results) {
      const fs::path dir = config.out_dir / std::string(to_string(r.name));
      io::write_flows(outputs.prepare(dir / "flows.csv"), r.flows);
      io::write_bills(outputs.prepare(dir / "bills.csv"), r.bills);
    }

    const TopologyResult* baseline = nullptr;
    for (const auto& r : results) {
      if (r.name == TopologyName::ac_baseline) baseline = &r;
    }
    std::ofstream summary(outputs.prepare(config.out_dir / "summary.csv"), std::ios::binary);
    summary << "topology,annual_usd,savings_vs_ac_baseline_pct\n";
    fmt::print(out, "{:<12} {:>12}  {}\n", "topology", "annual USD", "savings vs ac_baseline");
    for (const auto& r : results) {
      std::string pct = "";
      std::string shown = "-";
      if (baseline != nullptr) {
        try {
          const double s = savings_percent(baseline->annual_usd, r.annual_usd);
          pct = io::format_number(s);
          shown = fmt::format("{:.4f}% ({:.1f}%)", s, s);
        } catch (const UndefinedBaseline&) {
          shown = "undefined (zero baseline)";
        }
      }
      summary << to_string(r.name) << ',' << fmt::format("{:.2f}", r.annual_usd) << ',' << pct << '\n';
      fmt::print(out, "{:<12} {:>12.2f}  {}\n", to_string(r.name), r.annual_usd, shown);
    }
    summary.flush();
    if (!summary) throw Error("error writing summary.csv");
    outputs.commit();
    fmt::print(out, "simulated {} steps x {} topologies in {:.1f} ms\n", inputs.rows(), results.size(), elapsed);
    spdlog::info("outputs written to {}", config.out_dir.string());
    return kOk;
  });
}

int cmd_analyze(const ScenarioConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!config.lab_csv && !config.field_csv) throw InvalidInput("analyze needs lab_csv and/or field_csv");
    if (config.lab_csv) require_file(*config.lab_csv);
    if (config.field_csv) require_file(*config.field_csv);

    std::ostringstream report;
    report << "section,label,supply,metric,value\n";

    if (config.lab_csv) {
      const auto records = io::read_lab_records(*config.lab_csv);
      fmt::print(out, "{:<6} {:<3} {:>7}\n", "test", "", "COP");
      for (const auto& r : records) {
        const double c = cop(r);
        write_report_row(report, "cop", r.test_label, to_string(r.supply), "cop", c);
        fmt::print(out, "{:<6} {:<3} {:>7.3f}\n", r.test_label, to_string(r.supply), c);
        if (r.air_side_kw && r.refrigerant_side_kw) {
          const auto eb = energy_balance_check(*r.air_side_kw, *r.refrigerant_side_kw,
                                               config.analysis.energy_balance_tolerance);
          write_report_row(report, "energy_balance", r.test_label, to_string(r.supply), "relative_error",
                           eb.relative_error);
          write_report_row(report, "energy_balance", r.test_label, to_string(r.supply), "pass", eb.pass ? 1 : 0);
        }
      }
    }

    if (config.field_csv) {
      const auto samples = io::read_field_samples(*config.field_csv);
      const auto& opt = config.analysis;

      std::vector<double> hx[2], hy[2];
      for (const auto& s : samples) {
        const int i = s.supply == Supply::dc ? 1 : 0;
        hx[i].push_back(std::max(0.0, opt.setpoint_c - s.t_out_c));
        hy[i].push_back(s.power_kw);
      }

      const auto days = daily_aggregates(samples, opt.setpoint_c, opt.min_day_coverage);
      std::vector<double> normalized[2], dx[2], dy[2];
      int excluded = 0;
      for (const auto& d : days) {
        const int i = d.supply == Supply::dc ? 1 : 0;
        const auto sup = to_string(d.supply);
        write_report_row(report, "field_day", d.day, sup, "samples", d.samples);
        write_report_row(report, "field_day", d.day, sup, "mean_power_kw", d.mean_power_kw);
        write_report_row(report, "field_day", d.day, sup, "delta_t_c", d.delta_t_c);
        dx[i].push_back(d.delta_t_c);
        dy[i].push_back(d.mean_power_kw);
        if (const auto x = normalize(d.mean_power_kw, d.delta_t_c, opt.zero_demand_delta_t_c)) {
          write_report_row(report, "field_day", d.day, sup, "normalized_kw_per_c", *x);
          normalized[i].push_back(*x);
        } else {
          write_report_row(report, "field_day", d.day, sup, "excluded", 1);
          ++excluded;
        }
      }
      fmt::print(out, "field days kept: {} ac, {} dc ({} excluded from normalization)\n", dx[0].size(),
                 dx[1].size(), excluded);

      if (normalized[0].size() >= 2 && normalized[1].size() >= 2) {
        try {
          const WelchResult w = welch_t_test(normalized[0], normalized[1]);
          write_report_row(report, "welch", "", "", "mean_a", w.mean_a);
          write_report_row(report, "welch", "", "", "mean_d", w.mean_d);
          write_report_row(report, "welch", "", "", "var_a", w.var_a);
          write_report_row(report, "welch", "", "", "var_d", w.var_d);
          write_report_row(report, "welch", "", "", "n_a", static_cast<double>(w.n_a));
          write_report_row(report, "welch", "", "", "n_d", static_cast<double>(w.n_d));
          write_report_row(report, "welch", "", "", "t_statistic", w.t_statistic);
          write_report_row(report, "welch", "", "", "degrees_of_freedom", w.degrees_of_freedom);
          write_report_row(report, "welch", "", "", "p_value", w.p_value);
          fmt::print(out, "welch: t = {:.4f}, df = {:.2f}, p = {:.4f}\n", w.t_statistic, w.degrees_of_freedom,
                     w.p_value);
        } catch (const InvalidInput& e) {
          spdlog::warn("welch test skipped: {}", e.what());
        }
      } else {
        spdlog::warn("welch test skipped: need two normalized days per supply");
      }

      for (int i = 0; i < 2; ++i) {
        const Supply sup = i == 0 ? Supply::ac : Supply::dc;
        report_fit(report, out, "fit_hourly", sup, hx[i], hy[i], 2, opt.band_z);
        report_fit(report, out, "fit_daily", sup, dx[i], dy[i], 1, opt.band_z);
      }
    }

    OutputSet outputs;
    const fs::path path = outputs.prepare(config.out_dir / "report.csv");
    std::ofstream file(path, std::ios::binary);
    file << report.str();
    file.flush();
    if (!file) throw Error("error writing " + path.string());
    outputs.commit();
    return kOk;
  });
}

int cmd_compare(const fs::path& bills_a, const fs::path& bills_b, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(bills_a);
    require_file(bills_b);
    const auto a = io::read_bills(bills_a);
    const auto b = io::read_bills(bills_b);
    auto periods = [](const std::vector<BillStatement>& v) {
      std::vector<std::string> p;
      for (const auto& x : v) p.push_back(x.period);
      return p;
    };
    if (periods(a) != periods(b)) throw InvalidInput("bill files cover different periods");

    const double total_a = annual_summary(a).annual_usd;
    const double total_b = annual_summary(b).annual_usd;
    const double pct = savings_percent(total_a, total_b);
    fmt::print(out, "baseline {:>10.2f} USD  ({})\n", total_a, bills_a.string());
    fmt::print(out, "variant  {:>10.2f} USD  ({})\n", total_b, bills_b.string());
    fmt::print(out, "saved    {:>10.1f} USD\n", total_a - total_b);
    fmt::print(out, "savings  {:.4f}% ({:.1f}%)\n", pct, pct);
    return kOk;
  });
}

int cmd_synth(const ScenarioConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const AlignedSeries s = io::synth_scenario(config.seed, config.days);
    AlignedSeries loads, pv;
    loads.start = pv.start = s.start;
    loads.timestep_h = pv.timestep_h = s.timestep_h;
    loads.set(std::string(kHeatPumpColumn), s.column(kHeatPumpColumn));
    loads.set(std::string(kHouseColumn), s.column(kHouseColumn));
    pv.set(std::string(kPvColumn), s.column(kPvColumn));
    const auto field = io::synth_field_samples(config.seed);

    OutputSet outputs;
    io::write_series(outputs.prepare(config.out_dir / "loads.csv"), loads);
    io::write_series(outputs.prepare(config.out_dir / "pv.csv"), pv);
    io::write_field_samples(outputs.prepare(config.out_dir / "field.csv"), field);
    outputs.commit();
    fmt::print(out, "wrote {} hourly rows and {} field samples to {}\n", s.rows(), field.size(),
               config.out_dir.string());
    return kOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_logging();

  CLI::App app{"Residential nanogrid simulator and heat-pump test-data analysis"};
  app.require_subcommand(1);

  std::string config_path;
  std::string topology;
  std::string out_dir;
  std::uint64_t seed = 0;
  int days = 0;
  bool synth = false;
  std::string lab, field;
  std::string bills_a, bills_b;

  auto* simulate = app.add_subcommand("simulate", "simulate every selected topology and bill it");
  simulate->add_option("--config", config_path, "scenario config (JSON)");
  simulate->add_option("--topology", topology, "ac_baseline, dc_retrofit, dc_ideal or all");
  simulate->add_flag("--synth", synth, "use the synthetic scenario generator");
  simulate->add_option("--seed", seed, "synthetic scenario seed");
  simulate->add_option("--days", days, "synthetic scenario length in days");
  simulate->add_option("--out", out_dir, "output directory");

  auto* analyze = app.add_subcommand("analyze", "reduce lab and field heat-pump data");
  analyze->add_option("--config", config_path, "scenario config (JSON)");
  analyze->add_option("--lab", lab, "lab.csv");
  analyze->add_option("--field", field, "field.csv");
  analyze->add_option("--out", out_dir, "output directory");

  auto* compare = app.add_subcommand("compare", "annual totals and savings between two bills.csv files");
  compare->add_option("baseline", bills_a, "baseline bills.csv")->required();
  compare->add_option("variant", bills_b, "variant bills.csv")->required();

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic loads.csv, pv.csv and field.csv");
  synth_cmd->add_option("--config", config_path, "scenario config (JSON)");
  synth_cmd->add_option("--seed", seed, "seed");
  synth_cmd->add_option("--days", days, "length in days");
  synth_cmd->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  if (compare->parsed()) return cmd_compare(bills_a, bills_b, out, err);

  ScenarioConfig config;
  try {
    if (!config_path.empty()) {
      if (!fs::is_regular_file(config_path)) {
        fmt::print(err, "error: config file not found: {}\n", config_path);
        return kUsage;
      }
      config = ScenarioConfig::load(config_path);
    }
    if (!topology.empty()) config.topology = topology;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed != 0 || (simulate->parsed() && simulate->count("--seed") > 0) ||
        (synth_cmd->parsed() && synth_cmd->count("--seed") > 0))
      config.seed = seed;
    if (days != 0) config.days = days;
    if (synth) config.synth = true;
    if (!lab.empty()) config.lab_csv = lab;
    if (!field.empty()) config.field_csv = field;
    config.validate();
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  }

  if (simulate->parsed()) return cmd_simulate(config, out, err);
  if (analyze->parsed()) return cmd_analyze(config, out, err);
  return cmd_synth(config, out, err);
}

}  // namespace nanogrid::cli
