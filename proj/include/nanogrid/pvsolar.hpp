#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "nanogrid/timestamp.hpp"

namespace nanogrid {

/// One planar group of identical modules. Azimuth is measured clockwise from
/// north: 90 = east, 180 = south, 270 = west.
struct SubArray {
  double tilt_deg = 0.0;
  double azimuth_deg = 180.0;
  int module_count = 1;
  double module_power_w = 14300.0 / 42.0;

  void validate() const;
  double nameplate_kw() const { return module_count * module_power_w / 1000.0; }
};

struct IrradianceRecord {
  Timestamp timestamp;
  double ghi_w_m2 = 0.0;
  double dni_w_m2 = 0.0;
  double dhi_w_m2 = 0.0;
  double solar_zenith_deg = 90.0;
  double solar_azimuth_deg = 180.0;

  void validate() const;
};

struct PvModelOptions {
  double albedo = 0.2;
  double derate = 0.86;
};

/// The four roof sub-arrays of the reference house (42 modules, 14.3 kW).
std::vector<SubArray> reference_house_arrays(double module_power_w = 14300.0 / 42.0);

/// Plane-of-array irradiance from an isotropic-sky transposition.
double poa_irradiance(const IrradianceRecord& rec, const SubArray& sub, double albedo = 0.2);

/// DC output in kW per record, summed over sub-arrays and clipped at the total nameplate.
Eigen::VectorXd pv_power(std::span<const IrradianceRecord> records, std::span<const SubArray> arrays,
                         const PvModelOptions& options = {});

}  // namespace nanogrid
