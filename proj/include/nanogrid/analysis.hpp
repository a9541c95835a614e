#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nanogrid/timestamp.hpp"

namespace nanogrid {

enum class Supply { ac, dc };

std::string_view to_string(Supply supply);
Supply supply_from_string(std::string_view name);

/// One steady-state lab test row. thermal_capacity_kw already holds
/// |Q_indoor + Q_in,fan| with the indoor fan heat taken equal to its power.
struct SteadyStateTestRecord {
  std::string test_label;
  Supply supply = Supply::ac;
  double thermal_capacity_kw = 0.0;
  double indoor_power_kw = 0.0;
  double outdoor_power_kw = 0.0;
  double total_power_kw = 0.0;
  // Present only when the lab file carries both capacity measurements.
  std::optional<double> air_side_kw;
  std::optional<double> refrigerant_side_kw;
};

/// Coefficient of performance: thermal capacity over total electrical input.
double cop(const SteadyStateTestRecord& record);

struct EnergyBalance {
  bool pass;
  double relative_error;
};

inline constexpr double kEnergyBalanceTolerance = 0.06;

EnergyBalance energy_balance_check(double air_side_kw, double refrigerant_side_kw,
                                   double tolerance = kEnergyBalanceTolerance);

inline constexpr double kDefaultSetpointC = 20.5;
inline constexpr double kZeroDemandDeltaTC = 8.0;

/// Mean of max(0, setpoint - T_out) over the samples.
double indoor_outdoor_difference(std::span<const double> t_out_c, double setpoint_c = kDefaultSetpointC);

struct FieldSample {
  Timestamp timestamp;
  Supply supply = Supply::ac;
  double power_kw = 0.0;
  double t_out_c = 0.0;
};

struct DailyAggregate {
  std::string day;  // local calendar day
  Supply supply = Supply::ac;
  int samples = 0;
  double mean_power_kw = 0.0;
  double delta_t_c = 0.0;  // daily mean of max(0, setpoint - T_out)
};

/// Groups samples by supply and local calendar day. A day is kept when it
/// has at least `min_coverage` of the samples its sampling interval implies
/// (20 of 24 for hourly data).
std::vector<DailyAggregate> daily_aggregates(std::span<const FieldSample> samples,
                                             double setpoint_c = kDefaultSetpointC,
                                             double min_coverage = 20.0 / 24.0);

/// P / (delta_t - c), or nullopt when delta_t <= c and the sample must be excluded.
std::optional<double> normalize(double power_kw, double delta_t_c, double c = kZeroDemandDeltaTC);

struct WelchResult {
  double mean_a = 0.0;
  double mean_d = 0.0;
  double var_a = 0.0;
  double var_d = 0.0;
  std::size_t n_a = 0;
  std::size_t n_d = 0;
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
};

/// Two-sided Welch unequal-variance t-test with Welch-Satterthwaite degrees
/// of freedom. Throws InvalidInput for fewer than two samples on either side
/// or when both sample variances are zero.
WelchResult welch_t_test(std::span<const double> sample_a, std::span<const double> sample_d);

inline constexpr double kGaussian90 = 1.645;

struct PolyFit {
  int degree = 1;
  Eigen::VectorXd coefficients;  // highest power first
  double r_squared = 0.0;
  double residual_sigma = 0.0;   // sqrt(SS_res / (n - degree - 1))
  double band_z = kGaussian90;

  double predict(double x) const;
  /// Pointwise band prediction -/+ z * residual_sigma.
  std::pair<double, double> band(double x) const;
};

/// Least-squares polynomial of degree 1 or 2. Needs n >= degree + 2 points.
/// Throws SingularFit when the abscissae cannot determine the coefficients.
PolyFit fit_poly(std::span<const double> x, std::span<const double> y, int degree, double band_z = kGaussian90);

}  // namespace nanogrid
