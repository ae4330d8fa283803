#include <cmath>

#include "doctest.h"
#include "solarzoning/errors.hpp"
#include "solarzoning/resource.hpp"
#include "support.hpp"

using namespace solarzoning;
using namespace solarzoning::resource;

namespace {

// Remaining balance after paying `payment` per year for n years on a loan
// of 1 at rate r (amortization table).
double amortized_balance(double r, int n, double payment) {
  double balance = 1.0;
  for (int y = 0; y < n; ++y) balance = balance * (1 + r) - payment;
  return balance;
}

double brute_force_distance(Point p, const std::vector<TransmissionLine>& lines, int samples_per_segment) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& l : lines) {
    for (std::size_t i = 0; i + 1 < l.polyline.size(); ++i) {
      const Point a = l.polyline[i], b = l.polyline[i + 1];
      for (int k = 0; k <= samples_per_segment; ++k) {
        const double t = static_cast<double>(k) / samples_per_segment;
        best = std::min(best, std::hypot(a.x + t * (b.x - a.x) - p.x, a.y + t * (b.y - a.y) - p.y));
      }
    }
  }
  return best;
}

CostAssumptions base_costs() {
  CostAssumptions c = sztest::cost(1000.0, 20.0, 2.0, 0.0, 0.06, 25);
  c.interconnect_usd_per_mw_km = 1500.0;
  c.interconnect_fixed_usd_per_mw = 50000.0;
  return c;
}

}  // namespace

TEST_CASE("crf examples") {
  CHECK(crf(0.05, 20) == doctest::Approx(0.080243).epsilon(1e-5));
  CHECK(amortized_balance(0.05, 20, crf(0.05, 20)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(crf(1e-12, 10) - 0.1) < 1e-6);
  CHECK(crf(0.0, 10) == doctest::Approx(0.1));
  CHECK(crf(0.1, 1) == doctest::Approx(1.1));
}

TEST_CASE("property: crf repays principal") {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const double r = sztest::uniform(rng, 0.0, 0.3);
    const int n = 1 + static_cast<int>(uniform_index(rng, 60));
    CHECK(crf(r, n) * n >= 1.0 - 1e-12);
    CHECK(std::abs(amortized_balance(r, n, crf(r, n))) < 1e-12 * std::pow(1 + r, n));
  }
}

TEST_CASE("lcoe examples") {
  // Capex scaled so that crf × capex is 100 $/kW-yr, as with crf 0.1 on 1,000 $/kW.
  CostAssumptions c = sztest::cost(1000.0, 0.0, 0.0, 0.0, 0.07, 20);
  c.capex_usd_per_kw = 100.0 / crf(c.discount_rate, c.lifetime_yr);
  const double by_hand = 100000.0 / 2190.0;
  CHECK(lcoe(0.25, c, 0.0) == doctest::Approx(by_hand));
  CHECK(by_hand == doctest::Approx(45.66).epsilon(1e-4));

  const CostAssumptions vom_only = sztest::cost(0.0, 0.0, 5.0, 0.0);
  CHECK(lcoe(1.0, vom_only, 0.0) == doctest::Approx(5.0));

  const CostAssumptions b = base_costs();
  CHECK(lcoe(0.2, b, 200000.0) > lcoe(0.2, b, 100000.0));
  CHECK_THROWS_AS(lcoe(0.0, b, 0.0), ValidationError);
}

TEST_CASE("property: lcoe monotone in cf and every cost component") {
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    CostAssumptions c = sztest::cost(sztest::uniform(rng, 100, 3000), sztest::uniform(rng, 0, 60),
                                     sztest::uniform(rng, 0, 10), 0.0, sztest::uniform(rng, 0.01, 0.15),
                                     5 + static_cast<int>(uniform_index(rng, 30)));
    const double cf = sztest::uniform(rng, 0.05, 0.5);
    const double ic = sztest::uniform(rng, 0, 3e5);
    const double base = lcoe(cf, c, ic);
    CHECK(lcoe(cf * 1.1, c, ic) < base);
    CHECK(lcoe(cf, c, ic + 1000.0) > base);
    auto more = c;
    more.capex_usd_per_kw += 10.0;
    CHECK(lcoe(cf, more, ic) > base);
    more = c;
    more.fixed_om_usd_per_kw_yr += 1.0;
    CHECK(lcoe(cf, more, ic) > base);
    more = c;
    more.variable_om_usd_per_mwh += 0.5;
    CHECK(lcoe(cf, more, ic) > base);
    more = c;
    more.discount_rate += 0.01;
    CHECK(lcoe(cf, more, ic) > base);
  }
}

TEST_CASE("interconnection examples") {
  CostAssumptions c = base_costs();
  const std::vector<TransmissionLine> line = {{"L", {{-1e6, 0}, {1e6, 0}}}};
  CHECK(interconnection_cost({50.0, 0.0}, line, c) == doctest::Approx(c.interconnect_fixed_usd_per_mw));

  c.interconnect_fixed_usd_per_mw = 0.0;
  c.interconnect_usd_per_mw_km = 1000.0;
  CHECK(interconnection_cost({0.0, 5000.0}, line, c) == doctest::Approx(5000.0));
  CHECK_THROWS_AS(interconnection_cost({0, 0}, {}, c), ValidationError);
}

TEST_CASE("property: distance matches dense sampling and is translation invariant") {
  Rng rng(19);
  const CostAssumptions c = base_costs();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TransmissionLine> lines;
    for (int i = 0; i < 50; ++i) {
      lines.push_back({"L" + std::to_string(i),
                       {{sztest::uniform(rng, -5e4, 5e4), sztest::uniform(rng, -5e4, 5e4)},
                        {sztest::uniform(rng, -5e4, 5e4), sztest::uniform(rng, -5e4, 5e4)}}});
    }
    const Point site{sztest::uniform(rng, -6e4, 6e4), sztest::uniform(rng, -6e4, 6e4)};
    const double exact = distance_to_grid_m(site, lines);
    const double sampled = brute_force_distance(site, lines, 20000);
    CHECK(exact <= sampled + 1e-9);
    // Sample spacing is at most 7 m on these segments.
    CHECK(sampled - exact <= std::max(1e-3 * exact, 7.1));

    const Point shift{sztest::uniform(rng, -1e5, 1e5), sztest::uniform(rng, -1e5, 1e5)};
    auto moved = lines;
    for (auto& l : moved) {
      for (auto& p : l.polyline) p = {p.x + shift.x, p.y + shift.y};
    }
    CHECK(interconnection_cost({site.x + shift.x, site.y + shift.y}, moved, c) ==
          doctest::Approx(interconnection_cost(site, lines, c)).epsilon(1e-6));
  }
}

TEST_CASE("synthetic cf: night, determinism and plausibility band") {
  const auto a = synthetic_cf("S", {1000.0, 2000.0}, 5);
  const auto b = synthetic_cf("S", {1000.0, 2000.0}, 5);
  CHECK(a.values == b.values);
  for (int h = 0; h < kHoursPerYear; ++h) {
    if (is_night_hour(h)) CHECK(a.values[h] == 0.0);
  }
  Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    const auto s = synthetic_cf("S" + std::to_string(i),
                                {sztest::uniform(rng, -1e5, 1e5), sztest::uniform(rng, -1e5, 1e5)},
                                static_cast<std::uint64_t>(i));
    CHECK(s.mean_cf >= 0.10);
    CHECK(s.mean_cf <= 0.25);
    double sum = 0.0;
    for (double v : s.values) {
      CHECK((v >= 0.0 && v <= 1.0));
      sum += v;
    }
    CHECK(std::abs(sum / kHoursPerYear - s.mean_cf) < 1e-9);
  }
}

TEST_CASE("capacity factor series validation") {
  CHECK_THROWS_AS(CapacityFactorSeries::from_values("S", std::vector<double>(10, 0.2)), ValidationError);
  auto v = std::vector<double>(kHoursPerYear, 0.2);
  v[7] = 1.5;
  CHECK_THROWS_AS(CapacityFactorSeries::from_values("S", v), ValidationError);
}

TEST_CASE("cost table lookup and round trip") {
  CostTable t;
  t.set("solar", 2020, base_costs());
  auto later = base_costs();
  later.capex_usd_per_kw = 800.0;
  t.set("solar", 2030, later);
  CHECK(t.get("solar", 2025).capex_usd_per_kw == 1000.0);
  CHECK(t.get("solar", 2040).capex_usd_per_kw == 800.0);
  CHECK_THROWS_AS(t.get("solar", 2010), ValidationError);
  CHECK_THROWS_AS(t.get("wind", 2020), ValidationError);

  const auto path = sztest::scratch_dir("costs") / "costs.csv";
  write_cost_table(path.string(), t);
  const auto back = read_cost_table(path.string());
  CHECK(back.get("solar", 2030).capex_usd_per_kw == 800.0);
  CHECK(back.get("solar", 2020).interconnect_fixed_usd_per_mw == 50000.0);
}

TEST_CASE("levelized transmission cost definition") {
  const CostAssumptions c = base_costs();
  const double ic = 120000.0;
  CHECK(levelized_transmission_cost(0.2, c, ic) ==
        doctest::Approx(ic * crf(c.discount_rate, c.lifetime_yr) / (0.2 * 8760.0)));
}
