#include <map>
#include <sstream>

#include "doctest.h"
#include "solarzoning/errors.hpp"
#include "solarzoning/zoning.hpp"
#include "support.hpp"

using namespace solarzoning;
using namespace solarzoning::zoning;

namespace {

constexpr const char* kHeader =
    "jurisdiction_id,zoned,silent,allows_ses_in_ag,road_setback_m,ppl_setback_m,nppl_setback_m,min_lot_size_m2,"
    "max_lot_size_m2\n";

std::vector<OrdinanceRecord> parse(const std::string& rows) {
  std::istringstream in(std::string(kHeader) + rows);
  return parse_ordinance_db(in);
}

OrdinanceRecord permissive(const std::string& id, double road) {
  OrdinanceRecord r;
  r.jurisdiction_id = id;
  r.zoned = true;
  r.allows_ses_in_ag = true;
  r.road_setback_m = road;
  return r;
}

OrdinanceRecord silent(const std::string& id) {
  OrdinanceRecord r;
  r.jurisdiction_id = id;
  r.zoned = true;
  r.silent = true;
  return r;
}

// Random record satisfying every invariant.
OrdinanceRecord random_record(Rng& rng, int i) {
  OrdinanceRecord r;
  r.jurisdiction_id = "J" + std::to_string(i);
  r.zoned = unit_uniform(rng) < 0.85;
  r.silent = r.zoned && unit_uniform(rng) < 0.4;
  if (r.zoned && !r.silent) r.allows_ses_in_ag = unit_uniform(rng) < 0.8;
  if (r.silent) return r;
  const auto maybe = [&](double hi) -> std::optional<double> {
    if (unit_uniform(rng) < 0.4) return std::nullopt;
    return std::floor(sztest::uniform(rng, 0.0, hi) * 8.0) / 8.0;
  };
  r.road_setback_m = maybe(100.0);
  r.ppl_setback_m = maybe(50.0);
  r.nppl_setback_m = maybe(150.0);
  r.min_lot_size_m2 = maybe(100000.0);
  if (unit_uniform(rng) < 0.4) r.max_lot_size_m2 = r.min_lot_size_m2.value_or(0.0) + sztest::uniform(rng, 1.0, 5e5);
  return r;
}

}  // namespace

TEST_CASE("parse: silent row has no rule fields") {
  const auto db = parse("J1,true,true,,,,,,\n");
  REQUIRE(db.size() == 1);
  CHECK(db[0].zoned);
  CHECK(db[0].silent);
  CHECK_FALSE(db[0].has_numeric_rule());
}

TEST_CASE("parse: permissive row maps fields directly") {
  const auto db = parse("J2,true,false,true,15,,30,80937,\n");
  REQUIRE(db.size() == 1);
  const auto& r = db[0];
  CHECK(r.is_permissive());
  CHECK(r.road_setback_m == 15.0);
  CHECK_FALSE(r.ppl_setback_m.has_value());
  CHECK(r.nppl_setback_m == 30.0);
  CHECK(r.min_lot_size_m2 == 80937.0);
  CHECK_FALSE(r.max_lot_size_m2.has_value());
}

TEST_CASE("parse: duplicate jurisdiction is rejected by id") {
  try {
    parse("J3,false,,,,,,,\nJ3,false,,,,,,,\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("duplicate jurisdiction 'J3'") != std::string::npos);
  }
}

TEST_CASE("parse: invariant violations") {
  CHECK_THROWS_AS(parse("J4,true,true,,15,,,,\n"), ValidationError);
  CHECK_THROWS_AS(parse("J5,true,false,true,-1,,,,\n"), ValidationError);
  CHECK_THROWS_AS(parse("J6,false,true,,,,,,\n"), ValidationError);
  CHECK_THROWS_AS(parse("J7,true,false,true,,,,5000,4000\n"), ValidationError);
  CHECK_THROWS_AS(parse("J8,maybe,,,,,,,\n"), ParseError);
}

TEST_CASE("effective_rule examples") {
  const RuleLimits defaults = default_unzoned_limits();
  CHECK(effective_rule(silent("S"), ScenarioKind::Baseline, defaults).is_banned());

  const auto r = effective_rule(permissive("P", 40.0), ScenarioKind::Unregulated, defaults);
  REQUIRE_FALSE(r.is_banned());
  CHECK(r.limits() == RuleLimits{});

  RuleLimits road15;
  road15.road_setback_m = 15.0;
  const auto sampled = EffectiveRule::permitted(road15);
  CHECK(effective_rule(silent("S"), ScenarioKind::Progressive, defaults, sampled) == sampled);
  CHECK_THROWS_AS(effective_rule(silent("S"), ScenarioKind::Progressive, defaults), ContractViolation);

  OrdinanceRecord ban = permissive("B", 10.0);
  ban.allows_ses_in_ag = false;
  CHECK(effective_rule(ban, ScenarioKind::Baseline, defaults).is_banned());
  CHECK(effective_rule(ban, ScenarioKind::Progressive, defaults).is_banned());

  OrdinanceRecord unzoned;
  unzoned.jurisdiction_id = "U";
  const auto u = effective_rule(unzoned, ScenarioKind::Baseline, defaults);
  CHECK(u.limits() == defaults);
  CHECK(defaults.road_setback_m == 15.0);
  CHECK(defaults.ppl_setback_m == 15.0);
  CHECK(defaults.nppl_setback_m == 30.0);
  CHECK(std::isinf(defaults.max_lot_size_m2));
}

TEST_CASE("progressive_fill: singleton pool and determinism") {
  std::vector<OrdinanceRecord> db = {permissive("O", 25.0)};
  for (int i = 0; i < 20; ++i) db.push_back(silent("S" + std::to_string(i)));
  const auto a = progressive_fill(db, 99);
  for (int i = 0; i < 20; ++i) CHECK(a.at("S" + std::to_string(i)) == EffectiveRule::permitted(limits_of(db[0])));
  CHECK(a == progressive_fill(db, 99));
}

TEST_CASE("progressive_fill: empty pool") {
  std::vector<OrdinanceRecord> db = {silent("S")};
  try {
    progressive_fill(db, 1);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "no permissive ordinances to sample");
  }
}

TEST_CASE("progressive_fill: uniform draws over a two-rule pool") {
  std::vector<OrdinanceRecord> db = {permissive("A", 10.0), permissive("B", 20.0)};
  for (int i = 0; i < 1000; ++i) db.push_back(silent("S" + std::to_string(i)));
  for (std::uint64_t seed : {1u, 7u, 2040u}) {
    const auto rules = progressive_fill(db, seed);
    int a = 0;
    for (int i = 0; i < 1000; ++i) a += rules.at("S" + std::to_string(i)).limits().road_setback_m == 10.0;
    CHECK(a >= 400);
    CHECK(a <= 600);
  }
}

TEST_CASE("pool holds distinct permissive rules only") {
  std::vector<OrdinanceRecord> db = {permissive("A", 10.0), permissive("B", 10.0), permissive("C", 30.0), silent("S")};
  db[2].allows_ses_in_ag = false;
  const auto pool = permissive_pool(db);
  REQUIRE(pool.size() == 1);
  CHECK(pool[0].road_setback_m == 10.0);
}

TEST_CASE("property: scenario semantics over random databases") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<OrdinanceRecord> db;
    db.push_back(permissive("seed-permissive", 12.0));
    for (int i = 0; i < 60; ++i) db.push_back(random_record(rng, i));
    const RuleLimits defaults = default_unzoned_limits();

    for (const auto& r : db) {
      const auto u = effective_rule(r, ScenarioKind::Unregulated, defaults);
      REQUIRE_FALSE(u.is_banned());
      CHECK(u.limits() == RuleLimits{});
      if (r.silent) CHECK(effective_rule(r, ScenarioKind::Baseline, defaults).is_banned());
    }
    const auto prog = progressive_fill(db, static_cast<std::uint64_t>(trial));
    for (const auto& r : db) {
      if (r.silent) CHECK_FALSE(prog.at(r.jurisdiction_id).is_banned());
      else CHECK(prog.at(r.jurisdiction_id) == effective_rule(r, ScenarioKind::Baseline, defaults));
    }

    std::ostringstream out;
    write_ordinance_db(out, db);
    std::istringstream in(out.str());
    CHECK(parse_ordinance_db(in) == db);
  }
}

TEST_CASE("scenario names") {
  CHECK(parse_scenario("Progressive") == ScenarioKind::Progressive);
  CHECK(to_string(ScenarioKind::Unregulated) == "unregulated");
  CHECK_THROWS_AS(parse_scenario("strict"), ValidationError);
}
