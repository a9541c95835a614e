#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nanogrid/error.hpp"
#include "nanogrid/io.hpp"

namespace nanogrid::io {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLatitudeDeg = 40.42;
constexpr double kSolarNoonShiftH = 0.8;  // clock noon to solar noon at the site, standard time
constexpr double kArrayKw = 14.3;

double deg(double d) { return d * kPi / 180.0; }

// Sine of the solar elevation at the middle of a local clock hour.
double sun_height(int day_of_year, double clock_hour) {
  const double decl = deg(23.44) * std::sin(2.0 * kPi * (284.0 + day_of_year) / 365.0);
  const double hour_angle = deg(15.0 * (clock_hour - 12.0 - kSolarNoonShiftH));
  const double lat = deg(kLatitudeDeg);
  return std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
}

// Outdoor-unit heating draw, quadratic in the indoor-outdoor difference.
double heating_kw(double delta_t) { return delta_t < 2.0 ? 0.05 : 0.08 + 0.03 * delta_t + 0.002 * delta_t * delta_t; }

}  // namespace

AlignedSeries synth_scenario(std::uint64_t seed, int days) {
  if (days < 1) throw InvalidInput("synthetic scenario needs at least one day");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const auto n = static_cast<Eigen::Index>(days) * 24;
  Eigen::VectorXd pv(n), hp(n), house(n), temp(n);

  AlignedSeries series;
  series.start = Timestamp::from_local(2024, 1, 1, 0, 0, 0, -5 * 60);
  series.timestep_h = 1.0;

  double anomaly = 0.0;
  for (int day = 0; day < days; ++day) {
    const int doy = series.timestamp(static_cast<std::size_t>(day) * 24).local_day_of_year();
    anomaly = 0.7 * anomaly + 3.0 * unit(rng);
    const double cloud = uniform(rng);
    for (int h = 0; h < 24; ++h) {
      const Eigen::Index k = static_cast<Eigen::Index>(day) * 24 + h;
      const double hour = h + 0.5;

      const double t_out = 11.0 - 13.0 * std::cos(2.0 * kPi * (doy - 20) / 365.25) + anomaly +
                           5.0 * std::cos(2.0 * kPi * (hour - 15.0) / 24.0) + 0.8 * unit(rng);
      temp[k] = t_out;

      const double height = sun_height(doy, hour);
      double pv_kw = 0.0;
      if (height > 0.0) {
        const double clearness = std::clamp(1.0 - 0.8 * cloud * (0.8 + 0.4 * uniform(rng)), 0.05, 1.0);
        pv_kw = std::min(kArrayKw * 0.86, kArrayKw * 0.8 * std::pow(height, 1.15) * clearness);
      }
      pv[k] = pv_kw;

      const double delta_t = std::max(0.0, 20.5 - t_out);
      double hp_kw = heating_kw(delta_t);
      if (t_out > 24.0) hp_kw += 0.25 * (t_out - 22.0);
      hp_kw *= std::exp(0.15 * unit(rng) - 0.01125);
      hp[k] = std::clamp(hp_kw, 0.0, 4.3);

      double house_kw = 0.6;
      if (h >= 6 && h < 9) house_kw += 0.3;
      if (h >= 17 && h < 22) house_kw += 0.5;
      if (t_out < -8.0) house_kw += 0.15 * (-8.0 - t_out);  // auxiliary resistance heat
      house_kw *= std::exp(0.25 * unit(rng) - 0.03125);
      if (uniform(rng) < 0.08) house_kw += 1.0 + 2.0 * uniform(rng);
      house[k] = house_kw;
    }
  }

  series.set("pv_dc_kw", std::move(pv));
  series.set("hp_power_kw", std::move(hp));
  series.set("house_power_kw", std::move(house));
  series.set("t_out_c", std::move(temp));
  return series;
}

std::vector<FieldSample> synth_field_samples(std::uint64_t seed, int days) {
  if (days < 1) throw InvalidInput("synthetic field data needs at least one day");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<FieldSample> out;
  for (Supply supply : {Supply::ac, Supply::dc}) {
    const int year = supply == Supply::ac ? 2023 : 2024;
    const double mean_temp = supply == Supply::ac ? 1.8 : -0.6;
    const Timestamp start = Timestamp::from_local(year, 12, 18, 0, 0, 0, -5 * 60);
    double anomaly = 0.0;
    for (int day = 0; day < days; ++day) {
      anomaly = 0.6 * anomaly + 3.5 * unit(rng);
      for (int h = 0; h < 24; ++h) {
        const double t_out = mean_temp + anomaly + 4.0 * std::cos(2.0 * kPi * (h + 0.5 - 15.0) / 24.0) + 0.7 * unit(rng);
        const double delta_t = std::max(0.0, 20.5 - t_out);
        const double power = std::max(0.0, heating_kw(delta_t) * (1.0 + 0.12 * unit(rng)));
        out.push_back({start.plus_seconds((static_cast<std::int64_t>(day) * 24 + h) * 3600), supply, power, t_out});
      }
    }
  }
  return out;
}

}  // namespace nanogrid::io
