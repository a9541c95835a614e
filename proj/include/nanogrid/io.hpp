#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nanogrid/analysis.hpp"
#include "nanogrid/billing.hpp"
#include "nanogrid/dispatch.hpp"
#include "nanogrid/pvsolar.hpp"
#include "nanogrid/series.hpp"

namespace nanogrid::io {

/// Accepted header columns for one file kind.
struct CsvSchema {
  std::string name;
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const CsvSchema& loads_schema();
const CsvSchema& pv_schema();
const CsvSchema& irradiance_schema();
const CsvSchema& lab_schema();
const CsvSchema& field_schema();
const CsvSchema& bills_schema();

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  /// Index of a header column, or -1.
  int index_of(std::string_view name) const;
};

/// Splits a comma-separated file. Blank lines are skipped. Throws SchemaError
/// for an unreadable file, a ragged row, or a header that does not match `schema`.
CsvTable read_table(const std::filesystem::path& path, const CsvSchema& schema);

struct GapPolicy {
  /// Runs of up to this many missing steps are filled linearly; longer runs fail.
  int max_interpolated_steps = 3;
};

/// Reads a time-series file onto a uniform grid. The step is the smallest
/// spacing between consecutive rows. Missing rows and empty cells count as
/// missing steps. Throws SchemaError naming the line on duplicated,
/// decreasing or off-grid timestamps, unparsable values and over-long gaps.
AlignedSeries read_series(const std::filesystem::path& path, const CsvSchema& schema,
                          const GapPolicy& policy = {});

std::vector<IrradianceRecord> irradiance_records(const AlignedSeries& series);

std::vector<SteadyStateTestRecord> read_lab_records(const std::filesystem::path& path);
/// Timestamps must strictly increase within each supply.
std::vector<FieldSample> read_field_samples(const std::filesystem::path& path);
std::vector<BillStatement> read_bills(const std::filesystem::path& path);

/// `%.9g` with negative zero printed as 0.
std::string format_number(double value);

void write_series(const std::filesystem::path& path, const AlignedSeries& series);
void write_flows(const std::filesystem::path& path, std::span<const StepFlows> flows);
void write_bills(const std::filesystem::path& path, std::span<const BillStatement> bills);
void write_field_samples(const std::filesystem::path& path, std::span<const FieldSample> samples);

/// Deterministic synthetic year (or part of one) on an hourly grid starting
/// 2024-01-01T00:00-05:00: columns pv_dc_kw, hp_power_kw, house_power_kw, t_out_c.
AlignedSeries synth_scenario(std::uint64_t seed, int days);

/// Deterministic hourly field-test records for an AC and a DC heating month.
std::vector<FieldSample> synth_field_samples(std::uint64_t seed, int days = 30);

}  // namespace nanogrid::io
