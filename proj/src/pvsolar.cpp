#include "nanogrid/pvsolar.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nanogrid/error.hpp"

namespace nanogrid {
namespace {

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

void SubArray::validate() const {
  if (!(tilt_deg >= 0.0 && tilt_deg <= 90.0)) throw InvalidInput(fmt::format("tilt {} not in [0, 90]", tilt_deg));
  if (!(azimuth_deg >= 0.0 && azimuth_deg < 360.0))
    throw InvalidInput(fmt::format("azimuth {} not in [0, 360)", azimuth_deg));
  if (module_count < 1) throw InvalidInput("sub-array needs at least one module");
  if (!(module_power_w > 0.0) || !std::isfinite(module_power_w))
    throw InvalidInput("module power must be positive");
}

void IrradianceRecord::validate() const {
  for (double v : {ghi_w_m2, dni_w_m2, dhi_w_m2}) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InvalidInput(fmt::format("{}: irradiance must be finite and non-negative", timestamp.to_string()));
  }
  if (!(solar_zenith_deg >= 0.0 && solar_zenith_deg <= 180.0))
    throw InvalidInput(fmt::format("{}: zenith {} not in [0, 180]", timestamp.to_string(), solar_zenith_deg));
  if (!std::isfinite(solar_azimuth_deg))
    throw InvalidInput(fmt::format("{}: non-finite solar azimuth", timestamp.to_string()));
}

std::vector<SubArray> reference_house_arrays(double module_power_w) {
  return {
      {32.0, 90.0, 3, module_power_w},
      {50.0, 180.0, 3, module_power_w},
      {32.0, 90.0, 6, module_power_w},
      {30.0, 270.0, 30, module_power_w},
  };
}

double poa_irradiance(const IrradianceRecord& rec, const SubArray& sub, double albedo) {
  const double tilt = radians(sub.tilt_deg);
  const double zenith = radians(rec.solar_zenith_deg);
  const double cos_tilt = std::cos(tilt);

  double beam = 0.0;
  if (rec.solar_zenith_deg < 90.0) {
    const double cos_incidence = std::cos(zenith) * cos_tilt +
                                 std::sin(zenith) * std::sin(tilt) *
                                     std::cos(radians(rec.solar_azimuth_deg - sub.azimuth_deg));
    beam = rec.dni_w_m2 * std::max(0.0, cos_incidence);
  }
  const double diffuse = rec.dhi_w_m2 * (1.0 + cos_tilt) / 2.0;
  const double ground = rec.ghi_w_m2 * albedo * (1.0 - cos_tilt) / 2.0;
  return std::max(0.0, beam + diffuse + ground);
}

Eigen::VectorXd pv_power(std::span<const IrradianceRecord> records, std::span<const SubArray> arrays,
                         const PvModelOptions& options) {
  double nameplate = 0.0;
  for (const auto& a : arrays) {
    a.validate();
    nameplate += a.nameplate_kw();
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].validate();
    double kw = 0.0;
    for (const auto& a : arrays) {
      kw += a.nameplate_kw() * (poa_irradiance(records[i], a, options.albedo) / 1000.0) * options.derate;
    }
    out[static_cast<Eigen::Index>(i)] = std::clamp(kw, 0.0, nameplate);
  }
  return out;
}

}  // namespace nanogrid
