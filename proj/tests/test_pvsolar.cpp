#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "nanogrid/error.hpp"
#include "nanogrid/pvsolar.hpp"

using namespace nanogrid;
using doctest::Approx;

namespace {
IrradianceRecord rec(double ghi, double dni, double dhi, double zenith, double azimuth) {
  IrradianceRecord r;
  r.timestamp = Timestamp::from_local(2024, 6, 21, 12, 0, 0, -300);
  r.ghi_w_m2 = ghi;
  r.dni_w_m2 = dni;
  r.dhi_w_m2 = dhi;
  r.solar_zenith_deg = zenith;
  r.solar_azimuth_deg = azimuth;
  return r;
}
}  // namespace

TEST_CASE("poa_irradiance: geometry identities") {
  SubArray flat{0.0, 180.0, 1};
  CHECK(poa_irradiance(rec(900, 800, 100, 0.0, 180.0), flat) == Approx(900.0).epsilon(1e-14));
  CHECK(poa_irradiance(rec(0, 0, 0, 100.0, 0.0), flat) == 0.0);
  SubArray tilted{30.0, 200.0, 1};
  CHECK(poa_irradiance(rec(600, 800, 100, 30.0, 200.0), tilted) == Approx(901.339745962156).epsilon(1e-13));
  // Sun below the horizon: no beam even with a stray DNI value.
  CHECK(poa_irradiance(rec(0, 50, 0, 95.0, 200.0), tilted) == 0.0);
}

TEST_CASE("poa_irradiance: monotone and continuous") {
  SubArray sub{25.0, 150.0, 1};
  const double base = poa_irradiance(rec(500, 600, 100, 40.0, 170.0), sub);
  CHECK(poa_irradiance(rec(510, 600, 100, 40.0, 170.0), sub) >= base);
  CHECK(poa_irradiance(rec(500, 610, 100, 40.0, 170.0), sub) >= base);
  CHECK(poa_irradiance(rec(500, 600, 110, 40.0, 170.0), sub) >= base);
  CHECK(poa_irradiance(rec(500, 600, 100, 40.0 + 1e-7, 170.0), sub) == Approx(base).epsilon(1e-8));
  CHECK(poa_irradiance(rec(500, 600, 100, 40.0, 170.0 + 1e-7), sub) == Approx(base).epsilon(1e-8));
}

TEST_CASE("pv_power: nameplate, dark, and a single array") {
  auto arrays = reference_house_arrays();
  int modules = 0;
  double nameplate = 0.0;
  for (const auto& a : arrays) {
    modules += a.module_count;
    nameplate += a.nameplate_kw();
  }
  CHECK(modules == 42);
  CHECK(nameplate == Approx(14.3).epsilon(1e-12));

  std::vector<SubArray> flat = arrays;
  for (auto& a : flat) a.tilt_deg = 0.0;
  std::vector<IrradianceRecord> stc{rec(1000, 0, 1000, 60.0, 180.0)};
  CHECK(pv_power(stc, flat, {0.2, 1.0})[0] == Approx(14.3).epsilon(1e-12));

  std::vector<IrradianceRecord> dark(24, rec(0, 0, 0, 120.0, 0.0));
  CHECK(pv_power(dark, arrays).isZero(0.0));

  std::vector<SubArray> one{{0.0, 180.0, 30, 340.0}};
  std::vector<IrradianceRecord> half{rec(500, 0, 500, 60.0, 180.0)};
  CHECK(pv_power(half, one, {0.2, 0.86})[0] == Approx(4.386).epsilon(1e-13));
}

TEST_CASE("pv_power: bounded and order-invariant") {
  auto arrays = reference_house_arrays();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> irr(0.0, 1400.0), zen(0.0, 120.0), az(0.0, 360.0);
  std::vector<IrradianceRecord> recs;
  for (int i = 0; i < 500; ++i) recs.push_back(rec(irr(rng), irr(rng), irr(rng) / 3, zen(rng), az(rng)));
  auto out = pv_power(recs, arrays);
  CHECK(out.minCoeff() >= 0.0);
  CHECK(out.maxCoeff() <= 14.3 + 1e-12);
  auto shuffled = recs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(pv_power(shuffled, arrays).sum() == Approx(out.sum()).epsilon(1e-12));
}

TEST_CASE("validation") {
  SubArray bad{95.0, 180.0, 1};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  IrradianceRecord r = rec(-5, 0, 0, 10, 10);
  CHECK_THROWS_AS(r.validate(), InvalidInput);
}
