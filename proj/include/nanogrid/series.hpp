#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nanogrid/timestamp.hpp"

namespace nanogrid {

/// Named columns on a uniform time grid starting at `start`.
struct AlignedSeries {
  Timestamp start;
  double timestep_h = 1.0;
  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> columns;

  std::size_t rows() const { return columns.empty() ? 0 : static_cast<std::size_t>(columns.front().size()); }
  bool has(std::string_view name) const;
  /// Throws SchemaError when the column is absent.
  const Eigen::VectorXd& column(std::string_view name) const;
  /// Appends or replaces a column. Throws SchemaError on a length mismatch.
  void set(const std::string& name, Eigen::VectorXd values);
  Timestamp timestamp(std::size_t row) const;
  std::int64_t timestep_seconds() const;
};

}  // namespace nanogrid
