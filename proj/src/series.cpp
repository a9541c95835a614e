#include "nanogrid/series.hpp"

#include <algorithm>
#include <cmath>

#include "nanogrid/error.hpp"

namespace nanogrid {

bool AlignedSeries::has(std::string_view name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const Eigen::VectorXd& AlignedSeries::column(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw SchemaError("", 0, "missing column '" + std::string(name) + "'");
  return columns[static_cast<std::size_t>(it - names.begin())];
}

void AlignedSeries::set(const std::string& name, Eigen::VectorXd values) {
  if (!columns.empty() && static_cast<std::size_t>(values.size()) != rows())
    throw SchemaError("", 0, "column '" + name + "' length differs from the series");
  auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) {
    columns[static_cast<std::size_t>(it - names.begin())] = std::move(values);
  } else {
    names.push_back(name);
    columns.push_back(std::move(values));
  }
}

std::int64_t AlignedSeries::timestep_seconds() const {
  return static_cast<std::int64_t>(std::llround(timestep_h * 3600.0));
}

Timestamp AlignedSeries::timestamp(std::size_t row) const {
  return start.plus_seconds(static_cast<std::int64_t>(row) * timestep_seconds());
}

}  // namespace nanogrid
