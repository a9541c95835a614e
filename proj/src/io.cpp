#include "nanogrid/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "nanogrid/error.hpp"

namespace nanogrid::io {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

// Empty cells read as NaN (missing); anything else must parse fully.
double parse_number(const CsvTable& t, const CsvRow& row, int col) {
  const std::string& cell = row.cells[static_cast<std::size_t>(col)];
  if (cell.empty()) return kNaN;
  double v = 0.0;
  const char* first = cell.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
    throw SchemaError(t.source, row.line,
                      fmt::format("cannot parse '{}' in column '{}'", cell, t.header[static_cast<std::size_t>(col)]));
  return v;
}

double require_number(const CsvTable& t, const CsvRow& row, int col) {
  const double v = parse_number(t, row, col);
  if (std::isnan(v))
    throw SchemaError(t.source, row.line,
                      fmt::format("missing value in column '{}'", t.header[static_cast<std::size_t>(col)]));
  return v;
}

Timestamp parse_time(const CsvTable& t, const CsvRow& row, int col) {
  try {
    return Timestamp::parse(row.cells[static_cast<std::size_t>(col)]);
  } catch (const InvalidInput& e) {
    throw SchemaError(t.source, row.line, e.what());
  }
}

int require_column(const CsvTable& t, std::string_view name) {
  const int i = t.index_of(name);
  if (i < 0) throw SchemaError(t.source, 1, fmt::format("missing column '{}'", name));
  return i;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(fmt::format("error writing {}", path.string()));
}

}  // namespace

const CsvSchema& loads_schema() {
  static const CsvSchema s{"loads", {"timestamp", "hp_power_kw", "house_power_kw"}, {"hp_indoor_kw"}};
  return s;
}
const CsvSchema& pv_schema() {
  static const CsvSchema s{"pv", {"timestamp", "pv_dc_kw"}, {}};
  return s;
}
const CsvSchema& irradiance_schema() {
  static const CsvSchema s{
      "irradiance", {"timestamp", "ghi_w_m2", "dni_w_m2", "dhi_w_m2", "zenith_deg", "azimuth_deg"}, {}};
  return s;
}
const CsvSchema& lab_schema() {
  static const CsvSchema s{"lab",
                           {"test_label", "supply", "thermal_capacity_kw", "indoor_power_kw", "outdoor_power_kw",
                            "total_power_kw"},
                           {"air_side_kw", "refrigerant_side_kw"}};
  return s;
}
const CsvSchema& field_schema() {
  static const CsvSchema s{"field", {"timestamp", "supply", "power_kw", "t_out_c"}, {}};
  return s;
}
const CsvSchema& bills_schema() {
  static const CsvSchema s{"bills", {"period", "import_kwh", "export_kwh", "amount_usd"}, {}};
  return s;
}

int CsvTable::index_of(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable read_table(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path.string(), 0, "cannot open file");

  CsvTable table;
  table.source = path.string();
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (!have_header) {
      if (!cells.empty() && cells[0].rfind("\xEF\xBB\xBF", 0) == 0) cells[0].erase(0, 3);
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      throw SchemaError(table.source, line_no,
                        fmt::format("expected {} fields, found {}", table.header.size(), cells.size()));
    table.rows.push_back({line_no, std::move(cells)});
  }
  if (!have_header) throw SchemaError(table.source, 0, "empty file");

  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const auto& h = table.header[i];
    const bool known = std::find(schema.required.begin(), schema.required.end(), h) != schema.required.end() ||
                       std::find(schema.optional.begin(), schema.optional.end(), h) != schema.optional.end();
    if (!known) throw SchemaError(table.source, 1, fmt::format("unknown column '{}' for {} file", h, schema.name));
    if (std::find(table.header.begin(), table.header.begin() + static_cast<std::ptrdiff_t>(i), h) !=
        table.header.begin() + static_cast<std::ptrdiff_t>(i))
      throw SchemaError(table.source, 1, fmt::format("duplicated column '{}'", h));
  }
  for (const auto& r : schema.required) require_column(table, r);
  return table;
}

AlignedSeries read_series(const std::filesystem::path& path, const CsvSchema& schema, const GapPolicy& policy) {
  const CsvTable t = read_table(path, schema);
  if (t.rows.empty()) throw SchemaError(t.source, 0, "no data rows");
  const int ts_col = require_column(t, "timestamp");

  std::vector<Timestamp> stamps;
  stamps.reserve(t.rows.size());
  for (const auto& row : t.rows) stamps.push_back(parse_time(t, row, ts_col));

  std::int64_t step = 3600;
  if (stamps.size() > 1) {
    step = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 1; i < stamps.size(); ++i) {
      const auto diff = stamps[i].utc_seconds - stamps[i - 1].utc_seconds;
      if (diff == 0) throw SchemaError(t.source, t.rows[i].line, "duplicated timestamp " + stamps[i].to_string());
      if (diff < 0) throw SchemaError(t.source, t.rows[i].line, "timestamps not increasing at " + stamps[i].to_string());
      step = std::min(step, diff);
    }
  }

  // Grid position of every row; rows must land on the grid.
  std::vector<std::size_t> slot(stamps.size());
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    const auto diff = stamps[i].utc_seconds - stamps[0].utc_seconds;
    if (diff % step != 0)
      throw SchemaError(t.source, t.rows[i].line,
                        fmt::format("timestamp {} is off the {} s grid", stamps[i].to_string(), step));
    slot[i] = static_cast<std::size_t>(diff / step);
  }
  const std::size_t n = slot.back() + 1;

  AlignedSeries series;
  series.start = stamps.front();
  series.timestep_h = static_cast<double>(step) / 3600.0;

  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (static_cast<int>(c) == ts_col) continue;
    Eigen::VectorXd values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), kNaN);
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      values[static_cast<Eigen::Index>(slot[i])] = parse_number(t, t.rows[i], static_cast<int>(c));

    // Fill interior runs of missing values.
    Eigen::Index k = 0;
    const auto len = static_cast<Eigen::Index>(n);
    while (k < len) {
      if (!std::isnan(values[k])) {
        ++k;
        continue;
      }
      Eigen::Index end = k;
      while (end < len && std::isnan(values[end])) ++end;
      const auto run = end - k;
      const auto where = series.timestamp(static_cast<std::size_t>(k)).to_string();
      // Line of the first row after the gap, for the diagnostic.
      const auto after = std::lower_bound(slot.begin(), slot.end(), static_cast<std::size_t>(end));
      const std::size_t line = after == slot.end() ? t.rows.back().line : t.rows[after - slot.begin()].line;
      if (k == 0 || end == len)
        throw SchemaError(t.source, line, fmt::format("column '{}' is missing values at the edge of the series ({})",
                                                      t.header[c], where));
      if (run > policy.max_interpolated_steps)
        throw SchemaError(t.source, line, fmt::format("column '{}' has a gap of {} steps starting {} (limit {})",
                                                      t.header[c], run, where, policy.max_interpolated_steps));
      const double lo = values[k - 1];
      const double hi = values[end];
      for (Eigen::Index j = k; j < end; ++j)
        values[j] = lo + (hi - lo) * static_cast<double>(j - k + 1) / static_cast<double>(run + 1);
      k = end;
    }
    series.set(t.header[c], std::move(values));
  }
  return series;
}

std::vector<IrradianceRecord> irradiance_records(const AlignedSeries& series) {
  const auto& ghi = series.column("ghi_w_m2");
  const auto& dni = series.column("dni_w_m2");
  const auto& dhi = series.column("dhi_w_m2");
  const auto& zen = series.column("zenith_deg");
  const auto& azi = series.column("azimuth_deg");
  std::vector<IrradianceRecord> out(series.rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[i] = {series.timestamp(i), ghi[k], dni[k], dhi[k], zen[k], azi[k]};
  }
  return out;
}

std::vector<SteadyStateTestRecord> read_lab_records(const std::filesystem::path& path) {
  const CsvTable t = read_table(path, lab_schema());
  const int label = t.index_of("test_label");
  const int supply = t.index_of("supply");
  const int cap = t.index_of("thermal_capacity_kw");
  const int in = t.index_of("indoor_power_kw");
  const int outp = t.index_of("outdoor_power_kw");
  const int total = t.index_of("total_power_kw");
  const int air = t.index_of("air_side_kw");
  const int ref = t.index_of("refrigerant_side_kw");

  std::vector<SteadyStateTestRecord> out;
  for (const auto& row : t.rows) {
    SteadyStateTestRecord r;
    r.test_label = row.cells[static_cast<std::size_t>(label)];
    try {
      r.supply = supply_from_string(row.cells[static_cast<std::size_t>(supply)]);
    } catch (const InvalidInput& e) {
      throw SchemaError(t.source, row.line, e.what());
    }
    r.thermal_capacity_kw = require_number(t, row, cap);
    r.indoor_power_kw = require_number(t, row, in);
    r.outdoor_power_kw = require_number(t, row, outp);
    r.total_power_kw = require_number(t, row, total);
    for (double v : {r.thermal_capacity_kw, r.indoor_power_kw, r.outdoor_power_kw, r.total_power_kw}) {
      if (v < 0.0) throw SchemaError(t.source, row.line, "lab powers and capacities must be non-negative");
    }
    if (air >= 0) {
      const double v = parse_number(t, row, air);
      if (!std::isnan(v)) r.air_side_kw = v;
    }
    if (ref >= 0) {
      const double v = parse_number(t, row, ref);
      if (!std::isnan(v)) r.refrigerant_side_kw = v;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<FieldSample> read_field_samples(const std::filesystem::path& path) {
  const CsvTable t = read_table(path, field_schema());
  const int ts = t.index_of("timestamp");
  const int supply = t.index_of("supply");
  const int power = t.index_of("power_kw");
  const int temp = t.index_of("t_out_c");

  std::vector<FieldSample> out;
  std::optional<Timestamp> last[2];
  for (const auto& row : t.rows) {
    FieldSample s;
    s.timestamp = parse_time(t, row, ts);
    try {
      s.supply = supply_from_string(row.cells[static_cast<std::size_t>(supply)]);
    } catch (const InvalidInput& e) {
      throw SchemaError(t.source, row.line, e.what());
    }
    s.power_kw = require_number(t, row, power);
    s.t_out_c = require_number(t, row, temp);
    auto& prev = last[s.supply == Supply::dc ? 1 : 0];
    if (prev && !(*prev < s.timestamp))
      throw SchemaError(t.source, row.line,
                        fmt::format("{} timestamp {} is duplicated or out of order", to_string(s.supply),
                                    s.timestamp.to_string()));
    prev = s.timestamp;
    out.push_back(s);
  }
  return out;
}

std::vector<BillStatement> read_bills(const std::filesystem::path& path) {
  const CsvTable t = read_table(path, bills_schema());
  const int period = t.index_of("period");
  const int imp = t.index_of("import_kwh");
  const int exp = t.index_of("export_kwh");
  const int amt = t.index_of("amount_usd");
  std::vector<BillStatement> out;
  for (const auto& row : t.rows) {
    out.push_back({row.cells[static_cast<std::size_t>(period)], require_number(t, row, imp),
                   require_number(t, row, exp), require_number(t, row, amt)});
  }
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  return fmt::format("{:.9g}", value);
}

void write_series(const std::filesystem::path& path, const AlignedSeries& series) {
  auto out = open_out(path);
  out << "timestamp";
  for (const auto& n : series.names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < series.rows(); ++i) {
    out << series.timestamp(i).to_string();
    for (const auto& c : series.columns) out << ',' << format_number(c[static_cast<Eigen::Index>(i)]);
    out << '\n';
  }
  finish(out, path);
}

void write_flows(const std::filesystem::path& path, std::span<const StepFlows> flows) {
  auto out = open_out(path);
  out << "timestamp,s,d,u,b,x,p,loss_pv,loss_batt,loss_hp,loss_house\n";
  for (const auto& f : flows) {
    out << f.timestamp.to_string();
    for (double v : {f.s, f.d, f.u, f.b, f.x_next, f.p, f.losses.pv_kw, f.losses.battery_kw, f.losses.heatpump_kw,
                     f.losses.house_kw})
      out << ',' << format_number(v);
    out << '\n';
  }
  finish(out, path);
}

void write_bills(const std::filesystem::path& path, std::span<const BillStatement> bills) {
  auto out = open_out(path);
  out << "period,import_kwh,export_kwh,amount_usd\n";
  for (const auto& b : bills) {
    const double amount = std::round(b.amount_usd * 100.0) / 100.0;
    out << b.period << ',' << format_number(b.import_kwh) << ',' << format_number(b.export_kwh) << ','
        << fmt::format("{:.2f}", amount == 0.0 ? 0.0 : amount) << '\n';
  }
  finish(out, path);
}

void write_field_samples(const std::filesystem::path& path, std::span<const FieldSample> samples) {
  auto out = open_out(path);
  out << "timestamp,supply,power_kw,t_out_c\n";
  for (const auto& s : samples) {
    out << s.timestamp.to_string() << ',' << to_string(s.supply) << ',' << format_number(s.power_kw) << ','
        << format_number(s.t_out_c) << '\n';
  }
  finish(out, path);
}

}  // namespace nanogrid::io
