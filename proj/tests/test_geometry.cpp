#include "doctest.h"
#include "solarzoning/errors.hpp"
#include "solarzoning/geometry.hpp"
#include "solarzoning/planar.hpp"
#include "support.hpp"

using namespace solarzoning;
using namespace solarzoning::geometry;
using parcels::EdgeClass;
using parcels::Parcel;
using sztest::rect;

namespace {

zoning::EffectiveRule setbacks(double road, double ppl, double nppl) {
  zoning::RuleLimits l;
  l.road_setback_m = road;
  l.ppl_setback_m = ppl;
  l.nppl_setback_m = nppl;
  return zoning::EffectiveRule::permitted(l);
}

// Fraction of `points` random interior points of `inner` lying inside `outer`.
double containment(Rng& rng, const std::vector<Polygon>& inner, const std::vector<Polygon>& outer, int points) {
  int tested = 0, inside = 0;
  for (const auto& part : inner) {
    const Box b = planar::bounds(part);
    const int quota = static_cast<int>(points * planar::area(part) / std::max(planar::total_area(inner), 1e-12)) + 1;
    for (int n = 0, guard = 0; n < quota && guard < 100 * quota; ++guard) {
      const Point p{sztest::uniform(rng, b.min.x, b.max.x), sztest::uniform(rng, b.min.y, b.max.y)};
      if (!planar::contains(part, p)) continue;
      ++n;
      ++tested;
      bool in = false;
      for (const auto& o : outer) in |= planar::contains(o, p);
      inside += in;
    }
  }
  return tested == 0 ? 1.0 : static_cast<double>(inside) / tested;
}

}  // namespace

TEST_CASE("polygon_area examples") {
  const Ring unit = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(planar::polygon_area(unit) == 1.0);
  const Ring tri = {{0, 0}, {4, 0}, {0, 3}};
  CHECK(planar::polygon_area(tri) == 6.0);
  const Ring collinear = {{0, 0}, {1, 0}, {2, 0}};
  CHECK(planar::polygon_area(collinear) == 0.0);
  const Ring bowtie = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(planar::polygon_area(bowtie), ValidationError);
  const Ring cw = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  CHECK(planar::polygon_area(cw) == -1.0);
}

TEST_CASE("erode: zero setbacks are the identity") {
  const auto p = Parcel::make("P", "S", rect(0, 0, 300, 200));
  const auto d = erode_by_setbacks(p, zoning::EffectiveRule::unrestricted());
  CHECK(d.area_m2 == 60000.0);
  CHECK(d.limiting_rule == LimitingRule::None);
  REQUIRE(d.polygon_parts.size() == 1);
  CHECK(d.polygon_parts[0] == p.polygon);
}

TEST_CASE("erode: 200 m square with 50 m NPPL leaves the inner 100 m square") {
  const auto p = Parcel::make("P", "S", rect(0, 0, 200, 200));
  const auto d = erode_by_setbacks(p, setbacks(0, 0, 50));
  CHECK(d.area_m2 == doctest::Approx(10000.0).epsilon(1e-6));
  CHECK(d.limiting_rule == LimitingRule::NPPLSetback);
  const Box b = planar::bounds(d.polygon_parts.at(0));
  CHECK(b.min.x == doctest::Approx(50.0));
  CHECK(b.max.y == doctest::Approx(150.0));
}

TEST_CASE("erode: setback beyond the inradius empties the parcel") {
  for (EdgeClass c : {EdgeClass::Road, EdgeClass::ParticipatingLine, EdgeClass::NonParticipatingLine}) {
    const auto p = Parcel::make("P", "S", rect(0, 0, 100, 100), c);
    const auto d = erode_by_setbacks(p, setbacks(50, 50, 50));
    CHECK(d.area_m2 == doctest::Approx(0.0));
    CHECK(d.polygon_parts.empty());
    zoning::RuleLimits l;
    l.road_setback_m = l.ppl_setback_m = l.nppl_setback_m = 50.0;
    CHECK(sztest::monte_carlo_area(p, l, 100000, 1) == 0.0);
  }
}

TEST_CASE("erode: contract and validation errors") {
  const auto p = Parcel::make("P", "S", rect(0, 0, 100, 100));
  CHECK_THROWS_AS(erode_by_setbacks(p, zoning::EffectiveRule::banned()), ContractViolation);
  CHECK_THROWS_AS(setbacks(-1, 0, 0), ValidationError);
}

TEST_CASE("erode: only the classed edges erode") {
  // Road on the south edge only; 30 m road setback removes a 30 m strip.
  auto p = Parcel::make("P", "S", rect(0, 0, 200, 100));
  for (std::size_t i = 0; i < p.polygon.outer.size(); ++i) {
    const Point a = p.polygon.outer[i], b = p.polygon.outer[(i + 1) % 4];
    if (a.y == 0.0 && b.y == 0.0) p.edge_classes[0][i] = EdgeClass::Road;
  }
  const auto d = erode_by_setbacks(p, setbacks(30, 0, 0));
  CHECK(d.area_m2 == doctest::Approx(200.0 * 70.0).epsilon(1e-6));
  CHECK(d.limiting_rule == LimitingRule::RoadSetback);
}

TEST_CASE("lot size examples") {
  DevelopableArea d;
  d.area_m2 = 150000.0;
  const auto small = apply_lot_size(161874.0, d, 202343.0, 1e18);
  CHECK(small.area_m2 == 0.0);
  CHECK(small.limiting_rule == LimitingRule::MinLotSize);

  const auto none = apply_lot_size(161874.0, d, 0.0, std::numeric_limits<double>::infinity());
  CHECK(none.area_m2 == d.area_m2);
  CHECK(none.limiting_rule == LimitingRule::None);

  d.area_m2 = 500000.0;
  const auto capped = apply_lot_size(600000.0, d, 0.0, 400000.0);
  CHECK(capped.area_m2 == 400000.0);
  CHECK(capped.limiting_rule == LimitingRule::MaxLotSize);

  CHECK_THROWS_AS(apply_lot_size(1.0, d, 10.0, 5.0), ValidationError);
}

TEST_CASE("banned parcels contribute nothing") {
  const auto p = Parcel::make("P", "S", rect(0, 0, 100, 100));
  const auto d = developable_area(p, zoning::EffectiveRule::banned());
  CHECK(d.area_m2 == 0.0);
  CHECK(d.limiting_rule == LimitingRule::Banned);
}

TEST_CASE("property: monotone and nested in each setback") {
  Rng rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const auto p = sztest::random_parcel(rng, "P", 4 + static_cast<int>(uniform_index(rng, 9)), 300.0);
    double s[3] = {sztest::uniform(rng, 0, 40), sztest::uniform(rng, 0, 40), sztest::uniform(rng, 0, 40)};
    const auto base = erode_by_setbacks(p, setbacks(s[0], s[1], s[2]));
    CHECK(base.area_m2 <= p.area_m2() * (1 + 1e-9));
    const int k = static_cast<int>(uniform_index(rng, 3));
    s[k] += sztest::uniform(rng, 1, 30);
    const auto bigger = erode_by_setbacks(p, setbacks(s[0], s[1], s[2]));
    CHECK(bigger.area_m2 <= base.area_m2 * (1 + 1e-9) + 1e-6);
    CHECK(containment(rng, bigger.polygon_parts, base.polygon_parts, 2000) == 1.0);
  }
}

TEST_CASE("property: erosion matches the Monte-Carlo distance oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = sztest::random_parcel(rng, "P", 4 + static_cast<int>(uniform_index(rng, 9)), 250.0);
    zoning::RuleLimits l;
    l.road_setback_m = sztest::uniform(rng, 0, 35);
    l.ppl_setback_m = sztest::uniform(rng, 0, 35);
    l.nppl_setback_m = sztest::uniform(rng, 0, 35);
    const auto d = erode_by_setbacks(p, zoning::EffectiveRule::permitted(l));
    const double oracle = sztest::monte_carlo_area(p, l, 200000, static_cast<std::uint64_t>(trial));
    // Near-empty results are compared on an absolute scale.
    CHECK(std::abs(d.area_m2 - oracle) <= std::max(0.02 * oracle, 0.002 * p.area_m2()));
    double rings = 0.0;
    for (const auto& part : d.polygon_parts) rings += planar::area(part);
    CHECK(rings == doctest::Approx(d.area_m2).epsilon(1e-3));
  }
}
