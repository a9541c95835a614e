#include "nanogrid/analysis.hpp"

#include <fmt/format.h>

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "nanogrid/error.hpp"
#include "nanogrid/special_functions.hpp"

namespace nanogrid {

std::string_view to_string(Supply supply) { return supply == Supply::dc ? "dc" : "ac"; }

Supply supply_from_string(std::string_view name) {
  if (name == "ac" || name == "AC") return Supply::ac;
  if (name == "dc" || name == "DC") return Supply::dc;
  throw InvalidInput(fmt::format("unknown supply '{}' (expected ac or dc)", name));
}

double cop(const SteadyStateTestRecord& record) {
  if (!(record.total_power_kw > 0.0) || !std::isfinite(record.total_power_kw))
    throw InvalidInput(fmt::format("test {}: total power must be positive", record.test_label));
  if (!std::isfinite(record.thermal_capacity_kw))
    throw InvalidInput(fmt::format("test {}: non-finite thermal capacity", record.test_label));
  return std::abs(record.thermal_capacity_kw) / record.total_power_kw;
}

EnergyBalance energy_balance_check(double air_side_kw, double refrigerant_side_kw, double tolerance) {
  if (!(refrigerant_side_kw > 0.0) || !std::isfinite(air_side_kw))
    throw InvalidInput("energy balance needs a positive refrigerant-side capacity");
  const double rel = std::abs(air_side_kw - refrigerant_side_kw) / refrigerant_side_kw;
  return {rel <= tolerance, rel};
}

double indoor_outdoor_difference(std::span<const double> t_out_c, double setpoint_c) {
  if (t_out_c.empty()) throw InvalidInput("need at least one temperature sample");
  double sum = 0.0;
  for (double t : t_out_c) sum += std::max(0.0, setpoint_c - t);
  return sum / static_cast<double>(t_out_c.size());
}

std::vector<DailyAggregate> daily_aggregates(std::span<const FieldSample> samples, double setpoint_c,
                                             double min_coverage) {
  std::vector<DailyAggregate> out;
  for (Supply supply : {Supply::ac, Supply::dc}) {
    std::vector<const FieldSample*> group;
    for (const auto& s : samples) {
      if (s.supply == supply) group.push_back(&s);
    }
    if (group.empty()) continue;
    std::stable_sort(group.begin(), group.end(),
                     [](const FieldSample* a, const FieldSample* b) { return a->timestamp < b->timestamp; });

    // Median spacing sets the expected number of samples per day.
    std::vector<std::int64_t> gaps;
    for (std::size_t i = 1; i < group.size(); ++i) {
      const auto g = group[i]->timestamp.utc_seconds - group[i - 1]->timestamp.utc_seconds;
      if (g > 0) gaps.push_back(g);
    }
    std::int64_t spacing = 3600;
    if (!gaps.empty()) {
      std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
      spacing = gaps[gaps.size() / 2];
    }
    const double expected = std::round(86400.0 / static_cast<double>(spacing));
    const int required = static_cast<int>(std::ceil(expected * min_coverage - 1e-9));

    std::map<std::int64_t, std::tuple<std::string, int, double, double>> days;
    for (const FieldSample* s : group) {
      auto& [label, count, power, dt] = days[s->timestamp.local_day()];
      if (label.empty()) label = s->timestamp.day_label();
      ++count;
      power += s->power_kw;
      dt += std::max(0.0, setpoint_c - s->t_out_c);
    }
    for (const auto& [key, v] : days) {
      const auto& [label, count, power, dt] = v;
      if (count < required) continue;
      out.push_back({label, supply, count, power / count, dt / count});
    }
  }
  return out;
}

std::optional<double> normalize(double power_kw, double delta_t_c, double c) {
  if (!(delta_t_c > c)) return std::nullopt;
  return power_kw / (delta_t_c - c);
}

namespace {

std::pair<double, double> mean_and_variance(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(v.size() - 1)};
}

}  // namespace

WelchResult welch_t_test(std::span<const double> sample_a, std::span<const double> sample_d) {
  if (sample_a.size() < 2 || sample_d.size() < 2)
    throw InvalidInput("Welch's test needs at least two samples on each side");
  for (auto span : {sample_a, sample_d}) {
    for (double x : span) {
      if (!std::isfinite(x)) throw InvalidInput("Welch's test received a non-finite sample");
    }
  }

  WelchResult r;
  r.n_a = sample_a.size();
  r.n_d = sample_d.size();
  std::tie(r.mean_a, r.var_a) = mean_and_variance(sample_a);
  std::tie(r.mean_d, r.var_d) = mean_and_variance(sample_d);

  const double va = r.var_a / static_cast<double>(r.n_a);
  const double vd = r.var_d / static_cast<double>(r.n_d);
  const double se2 = va + vd;
  if (!(se2 > 0.0)) throw InvalidInput("Welch's test is undefined when both samples have zero variance");

  r.t_statistic = (r.mean_a - r.mean_d) / std::sqrt(se2);
  r.degrees_of_freedom =
      se2 * se2 / (va * va / static_cast<double>(r.n_a - 1) + vd * vd / static_cast<double>(r.n_d - 1));
  r.p_value = student_t_two_sided_p(r.t_statistic, r.degrees_of_freedom);
  return r;
}

double PolyFit::predict(double x) const {
  double y = 0.0;
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) y = y * x + coefficients[i];
  return y;
}

std::pair<double, double> PolyFit::band(double x) const {
  const double y = predict(x);
  return {y - band_z * residual_sigma, y + band_z * residual_sigma};
}

PolyFit fit_poly(std::span<const double> x, std::span<const double> y, int degree, double band_z) {
  if (degree != 1 && degree != 2) throw InvalidInput(fmt::format("fit degree must be 1 or 2, got {}", degree));
  if (x.size() != y.size()) throw InvalidInput("fit abscissae and ordinates differ in length");
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index p = degree + 1;
  if (n < p + 1) throw InvalidInput(fmt::format("degree-{} fit needs at least {} points", degree, p + 1));

  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    if (!std::isfinite(xi) || !std::isfinite(y[static_cast<std::size_t>(i)]))
      throw InvalidInput("fit received a non-finite point");
    for (Eigen::Index j = 0; j < p; ++j) design(i, j) = std::pow(xi, static_cast<double>(p - 1 - j));
    rhs[i] = y[static_cast<std::size_t>(i)];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p) throw SingularFit(fmt::format("degree-{} design is rank deficient", degree));

  PolyFit fit;
  fit.degree = degree;
  fit.band_z = band_z;
  fit.coefficients = qr.solve(rhs);

  const Eigen::VectorXd residual = rhs - design * fit.coefficients;
  const double ss_res = residual.squaredNorm();
  const double ss_tot = (rhs.array() - rhs.mean()).matrix().squaredNorm();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  fit.residual_sigma = std::sqrt(ss_res / static_cast<double>(n - p));
  return fit;
}

}  // namespace nanogrid
