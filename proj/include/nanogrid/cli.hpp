#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "nanogrid/billing.hpp"
#include "nanogrid/config.hpp"
#include "nanogrid/dispatch.hpp"
#include "nanogrid/series.hpp"

namespace nanogrid::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // a module rejected the data
inline constexpr int kUsage = 2;    // bad arguments, bad config, or a missing input file

struct TopologyResult {
  TopologyName name;
  std::vector<StepFlows> flows;
  std::vector<BillStatement> bills;
  double annual_usd = 0.0;
};

/// Builds the simulation input (pv_dc_kw, hp_power_kw, house_power_kw) from
/// the configured files, or from the synthetic generator when `synth` is set.
AlignedSeries load_inputs(const ScenarioConfig& config);

/// Simulates and bills every selected topology.
std::vector<TopologyResult> run_scenario(const ScenarioConfig& config, const AlignedSeries& inputs);

/// Subcommands. Each returns an exit code and writes diagnostics to `err`;
/// on failure no output files are left behind.
int cmd_simulate(const ScenarioConfig& config, std::ostream& out, std::ostream& err);
int cmd_analyze(const ScenarioConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& bills_a, const std::filesystem::path& bills_b, std::ostream& out,
                std::ostream& err);
int cmd_synth(const ScenarioConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nanogrid::cli
