#include <set>
#include <sstream>

#include "doctest.h"
#include "solarzoning/errors.hpp"
#include "solarzoning/geojson.hpp"
#include "solarzoning/parcels.hpp"
#include "solarzoning/planar.hpp"
#include "support.hpp"

using namespace solarzoning;
using namespace solarzoning::parcels;
using sztest::rect;

namespace {

double total_area(const std::vector<Parcel>& ps) {
  double s = 0.0;
  for (const auto& p : ps) s += p.area_m2();
  return s;
}

std::vector<Parcel> grid(int n, double side) {
  std::vector<Parcel> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.push_back(Parcel::make("G" + std::to_string(i) + "-" + std::to_string(j), "S",
                                 rect(i * side, j * side, (i + 1) * side, (j + 1) * side)));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("generate: quarter sections tile a square kilometre") {
  const double sizes[] = {250000.0};
  const auto ps = generate_parcels(rect(0, 0, 1000, 1000), "S1", sizes, {}, 5);
  REQUIRE(ps.size() == 4);
  for (const auto& p : ps) {
    CHECK(p.area_m2() == doctest::Approx(250000.0));
    const Box b = planar::bounds(p.polygon);
    CHECK(b.max.x - b.min.x == doctest::Approx(500.0));
    CHECK(b.max.y - b.min.y == doctest::Approx(500.0));
  }
}

TEST_CASE("generate: preconditions and degenerate inputs") {
  CHECK_THROWS_AS(generate_parcels(rect(0, 0, 1000, 1000), "S", {}, {}, 1), ContractViolation);
  const double big[] = {5e6};
  CHECK(generate_parcels(rect(0, 0, 1000, 1000), "S", big, {}, 1).empty());
}

TEST_CASE("generate: deterministic under a fixed seed") {
  const double sizes[] = {160000.0, 320000.0, 650000.0};
  const std::vector<Polyline> roads = {{{1500, -10}, {1500, 3010}}};
  const auto a = generate_parcels(rect(0, 0, 3000, 3000), "S", sizes, roads, 42);
  const auto b = generate_parcels(rect(0, 0, 3000, 3000), "S", sizes, roads, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].parcel_id == b[i].parcel_id);
    CHECK(a[i].polygon == b[i].polygon);
  }
}

TEST_CASE("property: generated parcels are disjoint and sized within tolerance") {
  Rng rng(11);
  const std::vector<double> sizes = {160000.0, 320000.0, 650000.0};
  for (int trial = 0; trial < 12; ++trial) {
    const Polygon sub = sztest::random_star_polygon(rng, 7, 2500.0, {5000.0, 5000.0});
    const auto ps = generate_parcels(sub, "S", sizes, {}, static_cast<std::uint64_t>(trial));
    double sum = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      validate(ps[i]);
      const double a = ps[i].area_m2();
      sum += a;
      bool near_some = false;
      for (double s : sizes) near_some |= std::abs(a - s) <= kParcelAreaTolerance * s + 1e-6;
      CHECK(near_some);
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        CHECK(planar::total_area(planar::intersection(ps[i].polygon, ps[j].polygon, 0.0)) < 1.0);
      }
    }
    CHECK(sum <= planar::area(sub) * (1 + 1e-9));
  }
}

TEST_CASE("classify: zero participation gives no participating edges") {
  auto ps = classify_all(grid(6, 100.0), {}, 0.0, 3);
  for (const auto& p : ps) {
    for (auto c : p.edge_classes[0]) CHECK(c == EdgeClass::NonParticipatingLine);
  }
}

TEST_CASE("classify: parcel enclosed by roads is all road") {
  const std::vector<Polyline> roads = {{{-5, 0}, {105, 0}}, {{100, -5}, {100, 105}}, {{105, 100}, {-5, 100}},
                                       {{0, 105}, {0, -5}}};
  const std::vector<Parcel> one = {Parcel::make("P", "S", rect(0, 0, 100, 100))};
  const auto ps = classify_all(one, roads, 1.0, 3);
  for (auto c : ps[0].edge_classes[0]) CHECK(c == EdgeClass::Road);
}

TEST_CASE("classify: isolated parcel without roads is all non-participating") {
  const std::vector<Parcel> one = {Parcel::make("P", "S", rect(0, 0, 100, 100), EdgeClass::Road)};
  const auto ps = classify_all(one, {}, 1.0, 3);
  for (auto c : ps[0].edge_classes[0]) CHECK(c == EdgeClass::NonParticipatingLine);
}

TEST_CASE("classify: participating share over ten thousand shared edges") {
  // 72 × 72 grid: 2·72·71 = 10,224 shared edges, each classified from both sides.
  const auto input = grid(72, 50.0);
  const auto ps = classify_all(input, {}, 0.3, 2040);
  std::size_t shared = 0, participating = 0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const auto& ring = ps[k].polygon.outer;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point a = ring[i], c = ring[(i + 1) % ring.size()];
      const bool boundary = (a.x == c.x && (a.x == 0.0 || a.x == 3600.0)) || (a.y == c.y && (a.y == 0.0 || a.y == 3600.0));
      if (boundary) {
        CHECK(ps[k].edge_classes[0][i] == EdgeClass::NonParticipatingLine);
        continue;
      }
      ++shared;
      participating += ps[k].edge_classes[0][i] == EdgeClass::ParticipatingLine;
    }
  }
  CHECK(shared == 2 * 10224);
  const double share = static_cast<double>(participating) / static_cast<double>(shared);
  CHECK(share >= 0.27);
  CHECK(share <= 0.33);
}

TEST_CASE("property: classification never changes geometry") {
  Rng rng(5);
  const double sizes[] = {40000.0, 90000.0};
  for (int trial = 0; trial < 5; ++trial) {
    const Polygon sub = sztest::random_star_polygon(rng, 9, 800.0);
    const std::vector<Polyline> roads = {{{-1000, 0}, {1000, 0}}};
    const auto raw = generate_parcels(sub, "S", sizes, roads, static_cast<std::uint64_t>(trial));
    const auto classified = classify_all(raw, roads, sztest::uniform(rng, 0.0, 1.0), 17);
    REQUIRE(raw.size() == classified.size());
    for (std::size_t i = 0; i < raw.size(); ++i) CHECK(raw[i].polygon == classified[i].polygon);
  }
}

TEST_CASE("exclusions: empty mask and full cover") {
  const std::vector<Parcel> ps = {Parcel::make("P", "S", rect(0, 0, 1000, 1000), EdgeClass::Road)};
  const auto same = apply_exclusions(ps, {});
  REQUIRE(same.size() == 1);
  CHECK(same[0].polygon == ps[0].polygon);
  CHECK(same[0].edge_classes == ps[0].edge_classes);
  CHECK(apply_exclusions(ps, {{rect(-10, -10, 1010, 1010)}}).empty());
}

TEST_CASE("exclusions: western half removed, cut edge non-participating") {
  const std::vector<Parcel> ps = {Parcel::make("P", "S", rect(0, 0, 1000, 1000), EdgeClass::Road)};
  const auto out = apply_exclusions(ps, {{rect(-100, -100, 500, 1100)}});
  REQUIRE(out.size() == 1);
  CHECK(out[0].area_m2() == doctest::Approx(500000.0));
  int cut = 0;
  for (const auto& e : out[0].edges()) {
    const bool on_cut = e.segment.a.x == doctest::Approx(500.0) && e.segment.b.x == doctest::Approx(500.0);
    if (on_cut) {
      ++cut;
      CHECK(e.edge_class == EdgeClass::NonParticipatingLine);
    } else {
      CHECK(e.edge_class == EdgeClass::Road);
    }
  }
  CHECK(cut == 1);
}

TEST_CASE("exclusions: split parcel gets suffixed parts") {
  const std::vector<Parcel> ps = {Parcel::make("P", "S", rect(0, 0, 1000, 1000))};
  const auto out = apply_exclusions(ps, {{rect(400, -10, 600, 1010)}});
  REQUIRE(out.size() == 2);
  CHECK(out[0].parcel_id == "P-1");
  CHECK(out[1].parcel_id == "P-2");
  CHECK(out[0].area_m2() + out[1].area_m2() == doctest::Approx(800000.0));
}

TEST_CASE("property: exclusions never add area") {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Parcel> ps;
    for (int i = 0; i < 5; ++i) {
      ps.push_back(Parcel::make("P" + std::to_string(i), "S",
                                sztest::random_star_polygon(rng, 6, 200.0, {i * 500.0, 0.0})));
    }
    ExclusionMask mask;
    const int masks = static_cast<int>(uniform_index(rng, 3));
    for (int m = 0; m < masks; ++m) {
      mask.polygons.push_back(sztest::random_star_polygon(rng, 5, 150.0, {sztest::uniform(rng, -200, 2200), 0.0}));
    }
    const auto out = apply_exclusions(ps, mask);
    const double before = total_area(ps), after = total_area(out);
    CHECK(after <= before * (1 + 1e-9));
    bool touches = false;
    for (const auto& p : ps) {
      for (const auto& m : mask.polygons) touches |= planar::total_area(planar::intersection(p.polygon, m, 0.0)) > 1e-6;
    }
    if (!touches) CHECK(after == doctest::Approx(before).epsilon(1e-12));
    else CHECK(after < before);
  }
}

TEST_CASE("geojson round trip keeps edge classes") {
  const std::vector<Polyline> roads = {{{-5, 0}, {305, 0}}};
  auto ps = classify_all(grid(3, 100.0), roads, 0.5, 9);
  std::ostringstream out;
  geojson::write_parcels(out, ps);
  const auto dir = sztest::scratch_dir("parcels-geojson");
  const auto path = dir / "parcels.geojson";
  {
    std::ofstream f(path);
    f << out.str();
  }
  const auto back = geojson::read_parcels(path.string());
  REQUIRE(back.size() == ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(back[i].polygon == ps[i].polygon);
    CHECK(back[i].edge_classes == ps[i].edge_classes);
  }
}
