#include <doctest.h>

#include <cmath>

#include "nanogrid/converters.hpp"
#include "nanogrid/error.hpp"

using namespace nanogrid;
using doctest::Approx;

namespace {
ConverterSpec spec(ConverterKind kind, double peak, double rated) {
  ConverterSpec s;
  s.kind = kind;
  s.peak_efficiency = peak;
  s.rated_power_kw = rated;
  return s;
}

// Constant efficiency: a curve with no part-load penalty.
ConverterSpec flat(double peak, double rated) {
  ConverterSpec s = spec(ConverterKind::inverter, peak, rated);
  s.curve.a0 = 0.0;
  s.curve.a1 = 0.0;
  return s;
}

const Topology& find(const std::vector<Topology>& all, TopologyName name) {
  for (const auto& t : all)
    if (t.name == name) return t;
  throw std::logic_error("missing topology");
}
}  // namespace

TEST_CASE("efficiency_at: normalization and part load") {
  auto inv = spec(ConverterKind::inverter, 0.95, 10.0);
  CHECK(efficiency_at(inv, 10.0) == Approx(0.95).epsilon(1e-15));
  CHECK(efficiency_at(inv, 0.0) == Approx(efficiency_at(inv, 0.1)));  // clamped at l_min
  auto mppt = spec(ConverterKind::mppt, 0.98, 10.0);
  CHECK(efficiency_at(mppt, 1.0) == Approx(0.940090497737557).epsilon(1e-14));
  CHECK(efficiency_at(mppt, 25.0) <= 0.98);
  CHECK_THROWS_AS(efficiency_at(mppt, -1.0), InvalidInput);
  CHECK_THROWS_AS(efficiency_at(mppt, std::nan("")), InvalidInput);
}

TEST_CASE("apply_path: identity, zero, and peak chain") {
  auto id = apply_path({}, 5.0);
  CHECK(id.output_kw == 5.0);
  CHECK(id.loss_kw == 0.0);
  ConverterPath chain{flat(0.98, 20.0), flat(0.95, 20.0)};
  auto out = apply_path(chain, 10.0);
  CHECK(out.output_kw == Approx(9.31).epsilon(1e-14));
  CHECK(out.loss_kw == Approx(0.69).epsilon(1e-13));
  auto zero = apply_path({spec(ConverterKind::mppt, 0.98, 14.3)}, 0.0);
  CHECK(zero.output_kw == 0.0);
  CHECK(zero.loss_kw == 0.0);
}

TEST_CASE("apply_path: losses non-negative and output increasing") {
  for (const auto& topo : builtin_topologies()) {
    for (const auto* path : {&topo.pv_to_bus, &topo.battery_to_bus, &topo.bus_to_heatpump, &topo.bus_to_house}) {
      double prev = -1.0;
      for (double in = 0.0; in <= 4.9; in += 0.01) {
        auto f = apply_path(*path, in);
        CHECK(f.output_kw <= in + 1e-15);
        CHECK(f.loss_kw >= -1e-15);
        CHECK(f.output_kw + f.loss_kw == Approx(in).epsilon(1e-12));
        if (in > 0.0 && !path->empty()) CHECK(f.output_kw > prev);
        prev = f.output_kw;
      }
    }
  }
}

TEST_CASE("required_input: inverse of apply_path") {
  CHECK(required_input({}, 5.0) == 5.0);
  CHECK(required_input({flat(0.95, 20.0)}, 9.5) == Approx(10.0).epsilon(1e-14));
  ConverterPath one{spec(ConverterKind::inverter, 0.95, 10.0)};
  CHECK(apply_path(one, required_input(one, 3.0)).output_kw == Approx(3.0).epsilon(1e-9));
  for (const auto& topo : builtin_topologies()) {
    for (const auto* path : {&topo.pv_to_bus, &topo.battery_to_bus, &topo.bus_to_heatpump, &topo.bus_to_house}) {
      if (path->empty()) continue;
      const double cap = path_capacity(*path);
      for (double frac : {1e-4, 0.003, 0.01, 0.05, 0.2, 0.5, 0.9, 1.0}) {
        const double in = frac * cap;
        const double round = required_input(*path, apply_path(*path, in).output_kw);
        CHECK(std::abs(round - in) <= 1e-9 * in);
        const double out = frac * cap;
        CHECK(std::abs(apply_path(*path, required_input(*path, out)).output_kw - out) <= 1e-9 * out);
      }
    }
  }
  CHECK(required_input(one, 0.0) == 0.0);
}

TEST_CASE("required_input: infeasible demand") {
  ConverterPath one{spec(ConverterKind::inverter, 0.95, 10.0)};
  CHECK(path_capacity(one) == Approx(9.5));
  CHECK_NOTHROW(required_input(one, 9.5));
  CHECK_THROWS_AS(required_input(one, 9.6), InfeasibleDemand);
  CHECK_THROWS_AS(required_input(one, -1.0), InvalidInput);
}

TEST_CASE("builtin topologies: chain definitions") {
  auto all = builtin_topologies();
  REQUIRE(all.size() == 3);
  const auto& ac = find(all, TopologyName::ac_baseline);
  REQUIRE(ac.bus_to_heatpump.size() == 2);
  CHECK(ac.bus_to_heatpump[0].kind == ConverterKind::rectifier);
  CHECK(ac.bus_to_heatpump[0].peak_efficiency == 0.95);
  CHECK(ac.bus_to_heatpump[1].kind == ConverterKind::hp_inverter);
  CHECK(ac.bus_to_heatpump[1].peak_efficiency == 0.97);
  CHECK(ac.bus_to_house.empty());
  REQUIRE(ac.pv_to_bus.size() == 2);
  CHECK(ac.pv_to_bus[0].kind == ConverterKind::mppt);
  CHECK(ac.pv_to_bus[1].kind == ConverterKind::inverter);

  const auto& retro = find(all, TopologyName::dc_retrofit);
  REQUIRE(retro.bus_to_heatpump.size() == 1);
  CHECK(retro.bus_to_heatpump[0].kind == ConverterKind::hp_inverter);
  REQUIRE(retro.battery_to_bus.size() == 1);
  CHECK(retro.battery_to_bus[0].kind == ConverterKind::dc_dc);
  REQUIRE(retro.bus_to_house.size() == 1);
  CHECK(retro.bus_to_house[0].kind == ConverterKind::inverter);

  const auto& ideal = find(all, TopologyName::dc_ideal);
  CHECK(ideal.bus_to_heatpump.empty());
}

TEST_CASE("heat-pump path ordering across topologies") {
  auto all = builtin_topologies();
  const auto& ac = find(all, TopologyName::ac_baseline).bus_to_heatpump;
  const auto& retro = find(all, TopologyName::dc_retrofit).bus_to_heatpump;
  const auto& ideal = find(all, TopologyName::dc_ideal).bus_to_heatpump;
  for (double in = 0.05; in <= 4.0; in += 0.05) {
    const double a = apply_path(ac, in).output_kw;
    const double r = apply_path(retro, in).output_kw;
    const double i = apply_path(ideal, in).output_kw;
    CHECK(i >= r);
    CHECK(r >= a);
  }
}

TEST_CASE("names round trip") {
  for (auto k : {ConverterKind::inverter, ConverterKind::rectifier, ConverterKind::mppt, ConverterKind::dc_dc,
                 ConverterKind::hp_inverter})
    CHECK(converter_kind_from_string(to_string(k)) == k);
  for (auto t : {TopologyName::ac_baseline, TopologyName::dc_retrofit, TopologyName::dc_ideal})
    CHECK(topology_name_from_string(to_string(t)) == t);
  CHECK_THROWS_AS(topology_name_from_string("dc_magic"), InvalidInput);
  ConverterSpec bad = spec(ConverterKind::inverter, 1.5, 1.0);
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}
