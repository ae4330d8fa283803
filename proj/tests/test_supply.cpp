#include <set>
#include <sstream>

#include "doctest.h"
#include "solarzoning/errors.hpp"
#include "solarzoning/supply.hpp"
#include "support.hpp"

using namespace solarzoning;
using namespace solarzoning::supply;
using parcels::EdgeClass;
using parcels::Parcel;
using sztest::rect;

namespace {

SupplySite priced(const std::string& id, double mw, double lcoe, double tx = 0.0) {
  SupplySite s;
  s.subdivision_id = id;
  s.region_id = "R";
  s.capacity_mw = mw;
  s.lcoe_usd_per_mwh = lcoe;
  s.transmission_cost_usd_per_mwh = tx;
  return s;
}

// Assigns a class to each side of an axis-aligned rectangle parcel.
void set_sides(Parcel& p, EdgeClass south, EdgeClass east, EdgeClass north, EdgeClass west) {
  const Box b = planar::bounds(p.polygon);
  const auto& r = p.polygon.outer;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Point a = r[i], c = r[(i + 1) % r.size()];
    if (a.y == b.min.y && c.y == b.min.y) p.edge_classes[0][i] = south;
    else if (a.x == b.max.x && c.x == b.max.x) p.edge_classes[0][i] = east;
    else if (a.y == b.max.y && c.y == b.max.y) p.edge_classes[0][i] = north;
    else p.edge_classes[0][i] = west;
  }
}

zoning::OrdinanceRecord record(const std::string& id, bool zoned, bool silent, bool allows) {
  zoning::OrdinanceRecord r;
  r.jurisdiction_id = id;
  r.zoned = zoned;
  r.silent = silent;
  r.allows_ses_in_ag = allows;
  return r;
}

std::map<std::string, SiteEconomics> economics_for(const std::vector<std::string>& ids) {
  std::map<std::string, SiteEconomics> e;
  for (std::size_t i = 0; i < ids.size(); ++i) e[ids[i]] = {"R", 30.0 + static_cast<double>(i), 0.0, 0.0, nullptr};
  return e;
}

double reduction(const Waterfall& w, ReductionLayer layer) {
  for (const auto& l : w.layers) {
    if (l.layer == layer) return l.reduction_mw;
  }
  return -1.0;
}

// Breakpoints of both curves up to the shorter one's total.
std::vector<double> common_abscissae(const SupplyCurve& a, const SupplyCurve& b) {
  const double limit = std::min(a.total_mw(), b.total_mw());
  std::set<double> q;
  for (const auto* c : {&a, &b}) {
    for (const auto& p : c->points) {
      if (p.cumulative_mw <= limit) q.insert(p.cumulative_mw);
    }
  }
  if (limit > 0.0) q.insert(limit);
  return {q.begin(), q.end()};
}

}  // namespace

TEST_CASE("site capacity at the solar and wind power densities") {
  CHECK(site_capacity(1e6, kSolarPowerDensity_w_m2) == doctest::Approx(7.1));
  CHECK(site_capacity(1e6, kWindPowerDensity_w_m2) == doctest::Approx(0.8));
  CHECK(site_capacity(0.0, 7.1) == 0.0);
  CHECK_THROWS_AS(site_capacity(-1.0, 7.1), ValidationError);
}

TEST_CASE("supply curve examples") {
  CHECK(build_supply_curve({}, "empty").points.empty());
  const std::vector<SupplySite> two = {priced("A", 2.0, 50.0), priced("B", 3.0, 40.0), priced("Z", 0.0, 1.0)};
  const auto c = build_supply_curve(two, "two");
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].cumulative_mw == 3.0);
  CHECK(c.points[0].lcoe_usd_per_mwh == 40.0);
  CHECK(c.points[1].cumulative_mw == 5.0);
  CHECK(c.points[1].lcoe_usd_per_mwh == 50.0);
  CHECK(c.lcoe_at(3.0) == 40.0);
  CHECK(c.lcoe_at(3.5) == 50.0);

  const std::vector<SupplySite> tie = {priced("B", 1.0, 40.0), priced("A", 1.0, 40.0)};
  CHECK(build_supply_curve(tie, "t").points[0].subdivision_id == "A");
}

TEST_CASE("property: curve totals, ordering and site removal") {
  Rng rng(13);
  std::vector<SupplySite> sites;
  double sum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    sites.push_back(priced("S" + std::to_string(i), sztest::uniform(rng, 0.0, 50.0), sztest::uniform(rng, 20, 90)));
    sum += sites.back().capacity_mw;
  }
  const auto c = build_supply_curve(sites, "all");
  CHECK(std::abs(c.total_mw() - sum) <= 1e-9 * sum);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    CHECK(c.points[i].cumulative_mw >= c.points[i - 1].cumulative_mw);
    CHECK(c.points[i].lcoe_usd_per_mwh >= c.points[i - 1].lcoe_usd_per_mwh);
  }
  std::map<std::string, double> cumulative;
  for (const auto& p : c.points) cumulative[p.subdivision_id] = p.cumulative_mw;
  for (int trial = 0; trial < 20; ++trial) {
    auto fewer = sites;
    fewer.erase(fewer.begin() + static_cast<long>(uniform_index(rng, fewer.size())));
    for (const auto& p : build_supply_curve(fewer, "fewer").points) {
      CHECK(p.cumulative_mw <= cumulative.at(p.subdivision_id) + 1e-9);
    }
  }
}

TEST_CASE("top fraction examples") {
  std::vector<SupplySite> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(priced("S" + std::to_string(i), 1.0, 50.0, 10.0 - i));
  const auto all = top_fraction(ten, 1.0);
  CHECK(all.size() == 10);
  const auto two = top_fraction(ten, 0.2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].subdivision_id == "S9");
  CHECK(two[1].subdivision_id == "S8");
  CHECK(top_fraction(ten, 0.11).size() == 2);

  const std::vector<SupplySite> tied = {priced("C", 1, 50, 1.0), priced("B", 1, 50, 2.0), priced("A", 1, 50, 2.0)};
  const auto kept = top_fraction(tied, 0.6);
  REQUIRE(kept.size() == 2);
  CHECK(kept[1].subdivision_id == "A");
  CHECK_THROWS_AS(top_fraction(ten, 0.0), ValidationError);
}

TEST_CASE("waterfall: permissive ordinances without rules reduce nothing") {
  std::vector<Parcel> ps;
  std::vector<zoning::OrdinanceRecord> db;
  for (int i = 0; i < 4; ++i) {
    const std::string id = "S" + std::to_string(i);
    ps.push_back(Parcel::make(id + "-P", id, rect(i * 2000.0, 0, i * 2000.0 + 1000, 1000)));
    db.push_back(record(id, true, false, true));
  }
  const auto w = waterfall(ps, db, economics_for({"S0", "S1", "S2", "S3"}), zoning::default_unzoned_limits(), 7.1);
  CHECK(w.unregulated_mw == doctest::Approx(4 * 7.1));
  for (const auto& l : w.layers) CHECK(l.reduction_mw == 0.0);
}

TEST_CASE("waterfall: all silent puts everything in de facto bans") {
  std::vector<Parcel> ps;
  std::vector<zoning::OrdinanceRecord> db;
  for (int i = 0; i < 3; ++i) {
    const std::string id = "S" + std::to_string(i);
    ps.push_back(Parcel::make(id + "-P", id, rect(i * 2000.0, 0, i * 2000.0 + 1000, 1000)));
    db.push_back(record(id, true, true, false));
  }
  const auto w = waterfall(ps, db, economics_for({"S0", "S1", "S2"}), zoning::default_unzoned_limits(), 7.1);
  CHECK(reduction(w, ReductionLayer::DeFactoBans) == doctest::Approx(w.unregulated_mw));
  for (const auto& l : w.layers) {
    if (l.layer != ReductionLayer::DeFactoBans) CHECK(l.reduction_mw == 0.0);
  }
  CHECK(w.baseline_mw == 0.0);
}

TEST_CASE("waterfall: hand-built rectangles match analytic layer reductions") {
  const auto nppl = EdgeClass::NonParticipatingLine;
  std::vector<Parcel> ps;
  std::vector<zoning::OrdinanceRecord> db;
  const auto add = [&](const std::string& id, Polygon poly, zoning::OrdinanceRecord r) {
    ps.push_back(Parcel::make(id + "-P", id, std::move(poly)));
    r.jurisdiction_id = id;
    db.push_back(r);
  };
  add("S1", rect(0, 0, 1000, 1000), record("", true, false, false));
  add("S2", rect(2000, 0, 3000, 500), record("", true, true, false));
  auto road = record("", true, false, true);
  road.road_setback_m = 50.0;
  add("S3", rect(4000, 0, 5000, 1000), road);
  set_sides(ps.back(), EdgeClass::Road, nppl, nppl, nppl);
  auto lines = record("", true, false, true);
  lines.ppl_setback_m = 20.0;
  lines.nppl_setback_m = 30.0;
  add("S4", rect(6000, 0, 6400, 400), lines);
  set_sides(ps.back(), nppl, nppl, nppl, EdgeClass::ParticipatingLine);
  auto min_lot = record("", true, false, true);
  min_lot.min_lot_size_m2 = 2e6;
  add("S5", rect(8000, 0, 9000, 1000), min_lot);
  auto max_lot = record("", true, false, true);
  max_lot.max_lot_size_m2 = 250000.0;
  add("S6", rect(10000, 0, 11000, 1000), max_lot);

  const auto w = waterfall(ps, db, economics_for({"S1", "S2", "S3", "S4", "S5", "S6"}),
                           zoning::default_unzoned_limits(), 7.1);
  const auto mw = [](double m2) { return m2 * 7.1 / 1e6; };
  const auto near = [](double got, double want) { return std::abs(got - want) <= 0.005 * want; };
  CHECK(near(reduction(w, ReductionLayer::OutrightBans), mw(1e6)));
  CHECK(near(reduction(w, ReductionLayer::DeFactoBans), mw(5e5)));
  CHECK(near(reduction(w, ReductionLayer::RoadSetback), mw(1000.0 * 50.0)));
  CHECK(near(reduction(w, ReductionLayer::PPLSetback), mw(20.0 * 400.0)));
  CHECK(near(reduction(w, ReductionLayer::NPPLSetback), mw(380.0 * 400.0 - 350.0 * 340.0)));
  CHECK(near(reduction(w, ReductionLayer::MinLS), mw(1e6)));
  CHECK(near(reduction(w, ReductionLayer::MaxLS), mw(7.5e5)));

  double sum = 0.0;
  for (const auto& l : w.layers) sum += l.reduction_mw;
  CHECK(std::abs(sum - (w.unregulated_mw - w.baseline_mw)) <= 1e-9 * w.unregulated_mw);

  std::ostringstream out;
  write_waterfall(out, w);
  CHECK(out.str().rfind("layer,capacity_after_mw,reduction_mw\nunregulated,", 0) == 0);
}

TEST_CASE("waterfall: parcel in an unknown subdivision") {
  const std::vector<Parcel> ps = {Parcel::make("X-P", "X", rect(0, 0, 10, 10))};
  CHECK_THROWS_AS(waterfall(ps, {}, economics_for({"X"}), {}, 7.1), ValidationError);
}

TEST_CASE("property: random ordinance mixes keep additivity and dominance") {
  Rng rng(404);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<Parcel> ps;
    std::vector<zoning::OrdinanceRecord> db;
    std::vector<std::string> ids;
    for (int j = 0; j < 12; ++j) {
      const std::string id = "S" + std::to_string(j);
      ids.push_back(id);
      for (int k = 0; k < 3; ++k) {
        auto p = sztest::random_parcel(rng, id + "-P" + std::to_string(k), 6, 300.0);
        p.subdivision_id = id;
        for (auto& v : p.polygon.outer) v = {v.x + j * 2000.0, v.y + k * 1000.0};
        ps.push_back(std::move(p));
      }
      const double u = unit_uniform(rng);
      auto r = record(id, u > 0.15, u > 0.15 && u < 0.5, u >= 0.5 && u < 0.9);
      if (r.is_permissive()) {
        r.road_setback_m = sztest::uniform(rng, 0, 40);
        r.nppl_setback_m = sztest::uniform(rng, 0, 60);
        if (unit_uniform(rng) < 0.3) r.min_lot_size_m2 = sztest::uniform(rng, 0, 2e5);
        if (unit_uniform(rng) < 0.3) r.max_lot_size_m2 = 2e5 + sztest::uniform(rng, 0, 1e5);
      }
      db.push_back(r);
    }
    db.push_back(record("perm", true, false, true));
    auto econ = economics_for(ids);
    for (auto& [id, e] : econ) e.lcoe_usd_per_mwh = sztest::uniform(rng, 30, 80);

    const auto defaults = zoning::default_unzoned_limits();
    const auto w = waterfall(ps, db, econ, defaults, 7.1);
    double sum = 0.0;
    for (const auto& l : w.layers) {
      CHECK(l.reduction_mw >= -1e-9);
      sum += l.reduction_mw;
    }
    CHECK(std::abs(sum - (w.unregulated_mw - w.baseline_mw)) <= 1e-9 * w.unregulated_mw);

    const auto curve_for = [&](zoning::ScenarioKind kind) {
      const auto rules = zoning::scenario_rules(db, kind, 9, defaults);
      const auto areas = evaluate_parcels(ps, rules);
      return build_supply_curve(make_sites(ps, areas, econ, 7.1), std::string(zoning::to_string(kind)));
    };
    const auto unreg = curve_for(zoning::ScenarioKind::Unregulated);
    const auto base = curve_for(zoning::ScenarioKind::Baseline);
    const auto prog = curve_for(zoning::ScenarioKind::Progressive);
    CHECK(base.total_mw() == doctest::Approx(w.baseline_mw).epsilon(1e-12));
    CHECK(base.total_mw() <= prog.total_mw() + 1e-9);
    CHECK(prog.total_mw() <= unreg.total_mw() + 1e-9);
    for (double q : common_abscissae(base, unreg)) CHECK(base.lcoe_at(q) >= unreg.lcoe_at(q));
  }
}
