#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "nanogrid/battery.hpp"
#include "nanogrid/error.hpp"
#include "test_support.hpp"

using namespace nanogrid;
using doctest::Approx;

namespace {
// Reference values evaluated at 50-digit precision.
constexpr double kDecayTen = 9.99375195271816;          // 10 exp(-1/1600)
constexpr double kGainUnit = 0.999687565093995;         // (1 - exp(-1/1600)) 1600
constexpr double kDischargeHeadroomFull = 19.9937506510417;
constexpr double kChargeHeadroomEmpty = 20.0062506510417;
}  // namespace

TEST_CASE("step: closed-form examples") {
  BatteryParams p;
  CHECK(step({0.0}, 0.0, p).stored_energy_kwh == 0.0);
  CHECK(step({10.0}, 0.0, p).stored_energy_kwh == Approx(kDecayTen).epsilon(1e-14));
  CHECK(step({0.0}, 1.0, p).stored_energy_kwh == Approx(kGainUnit).epsilon(1e-14));
  CHECK(p.input_gain() == Approx(kGainUnit).epsilon(1e-14));
}

TEST_CASE("step: matches RK4 integration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 20.0), uu(-15.0, 15.0), udt(0.05, 4.0), utau(1.0, 5000.0);
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng), u = uu(rng), dt = udt(rng), tau = utau(rng);
    const double ref = testing::integrate_battery_rk4(x, u, dt, tau, 10000);
    CHECK(std::abs(propagate(x, u, dt, tau) - ref) < 1e-6);
  }
}

TEST_CASE("step: fixed point and monotonicity") {
  BatteryParams p;
  p.energy_capacity_kwh = 1e6;
  for (double u : {0.001, 0.0125, 0.2}) {
    const double xs = p.dissipation_time_constant_h * u;
    CHECK(std::abs(step({xs}, u, p).stored_energy_kwh - xs) < 1e-12 * std::max(1.0, xs));
  }
  BatteryParams q;
  double prev = -1.0;
  for (double x = 0.0; x <= 10.0; x += 0.5) {
    const double next = step({x}, 1.0, q).stored_energy_kwh;
    CHECK(next > prev);
    prev = next;
  }
  prev = -1.0;
  for (double u = 0.0; u <= 5.0; u += 0.25) {
    const double next = step({5.0}, u, q).stored_energy_kwh;
    CHECK(next > prev);
    prev = next;
  }
}

TEST_CASE("step: bounds are enforced with a small tolerance") {
  BatteryParams p;
  const double h = charge_headroom_kw({19.0}, p);
  CHECK(step({19.0}, h, p).stored_energy_kwh == Approx(20.0).epsilon(1e-14));
  CHECK(step({19.0}, h * (1 + 1e-13), p).stored_energy_kwh <= 20.0);
  CHECK_THROWS_AS(step({19.0}, h + 0.01, p), ContractViolation);
  CHECK_THROWS_AS(step({0.5}, -5.0, p), ContractViolation);
  CHECK_THROWS_AS(step({1.0}, std::numeric_limits<double>::quiet_NaN(), p), InvalidInput);
  CHECK(step({0.0}, -0.0, p).stored_energy_kwh == 0.0);
}

TEST_CASE("electrical_power: examples and properties") {
  BatteryParams p;
  CHECK(electrical_power(0.0, p) == 0.0);
  CHECK(electrical_power(1.0, p) == Approx(1.0 / 0.95).epsilon(1e-15));
  CHECK(electrical_power(-1.0, p) == Approx(-0.95).epsilon(1e-15));
  double prev = -1e9;
  for (double u = -10.0; u <= 10.0; u += 0.125) {
    const double b = electrical_power(u, p);
    CHECK(b * u >= 0.0);
    CHECK(b > prev);
    CHECK(chemical_power(b, p) == Approx(u).epsilon(1e-14));
    prev = b;
  }
  CHECK(std::abs(electrical_power(1e-12, p) - electrical_power(-1e-12, p)) < 1e-11);
}

TEST_CASE("chemical_power_bounds: headroom cases") {
  BatteryParams p;
  auto full = chemical_power_bounds({20.0}, p);
  CHECK(full.max_kw == Approx(20.0 / 1600.0).epsilon(1e-12));
  CHECK(discharge_headroom_kw({20.0}, p) == Approx(kDischargeHeadroomFull).epsilon(1e-13));
  CHECK(full.min_kw == Approx(-12.5 / 0.95).epsilon(1e-14));  // power cap binds first
  auto empty = chemical_power_bounds({0.0}, p);
  CHECK(empty.min_kw == 0.0);
  CHECK_FALSE(std::signbit(empty.min_kw));
  CHECK(charge_headroom_kw({0.0}, p) == Approx(kChargeHeadroomEmpty).epsilon(1e-13));
  CHECK(empty.max_kw == Approx(0.95 * 12.5).epsilon(1e-14));
}

TEST_CASE("round trip loses eta^2 plus bounded dissipation") {
  BatteryParams p;
  const double power = 4.0;
  const double u_in = chemical_power(power, p);
  const double x1 = step({0.0}, u_in, p).stored_energy_kwh;
  const double u_out = -discharge_headroom_kw({x1}, p);
  const double x2 = step({x1}, u_out, p).stored_energy_kwh;
  CHECK(std::abs(x2) < 1e-12);
  const double returned = -electrical_power(u_out, p) * p.timestep_h;
  const double ideal = p.efficiency * p.efficiency * power * p.timestep_h;
  CHECK(returned <= ideal + 1e-12);
  CHECK(ideal - returned <= p.energy_capacity_kwh * p.timestep_h / p.dissipation_time_constant_h);
}

TEST_CASE("params validation") {
  BatteryParams p;
  p.efficiency = 1.2;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = {};
  p.dissipation_time_constant_h = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = {};
  p.timestep_h = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  CHECK_NOTHROW(BatteryParams{}.validate());
}
