#include "solarzoning/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "solarzoning/errors.hpp"
#include "solarzoning/pipeline.hpp"
#include "solarzoning/random.hpp"

namespace solarzoning::synthetic {
namespace {

enum class Category { Unzoned, Silent, Ban, Permissive };

std::string two_digits(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

template <class T>
const T& pick(const std::vector<T>& options, Rng& rng) {
  return options[uniform_index(rng, options.size())];
}

zoning::OrdinanceRecord make_record(const std::string& id, Category c, Rng& rng) {
  zoning::OrdinanceRecord r;
  r.jurisdiction_id = id;
  switch (c) {
    case Category::Unzoned:
      break;
    case Category::Silent:
      r.zoned = r.silent = true;
      break;
    case Category::Ban:
      r.zoned = true;
      break;
    case Category::Permissive: {
      r.zoned = r.allows_ses_in_ag = true;
      const auto opt = [&](const std::vector<double>& values) -> std::optional<double> {
        const double v = pick(values, rng);
        return v > 0.0 ? std::optional<double>(v) : std::nullopt;
      };
      r.road_setback_m = opt({0.0, 15.0, 30.0, 45.0, 60.0, 90.0});
      r.ppl_setback_m = opt({0.0, 0.0, 10.0, 15.0, 30.0});
      r.nppl_setback_m = opt({30.0, 45.0, 60.0, 90.0, 150.0});
      r.min_lot_size_m2 = opt({0.0, 0.0, 20'000.0, 40'000.0, 80'000.0, 160'000.0});
      r.max_lot_size_m2 = opt({0.0, 0.0, 0.0, 200'000.0, 400'000.0});
      if (!r.has_numeric_rule()) r.nppl_setback_m = 30.0;
      break;
    }
  }
  return r;
}

Polygon octagon(Point c, double radius) {
  Polygon p;
  for (int k = 0; k < 8; ++k) {
    const double a = std::numbers::pi * (2.0 * k + 1.0) / 8.0;
    p.outer.push_back({c.x + radius * std::cos(a), c.y + radius * std::sin(a)});
  }
  return p;
}

// Winter-evening peak with a secondary summer peak, hourly MW around 1.
std::vector<double> demand_shape(Rng& rng) {
  std::vector<double> d(resource::kHoursPerYear);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int day = 0; day < 365; ++day) {
    const double seasonal = 1.0 + 0.10 * std::cos(two_pi * (day - 20) / 365.0) +
                            0.06 * std::cos(2.0 * two_pi * (day - 20) / 365.0);
    double noise = 1.0 + 0.06 * (unit_uniform(rng) - 0.5);
    if (day == 20) noise *= 1.2;  // cold snap
    for (int h = 0; h < 24; ++h) {
      const auto bump = [&](double centre, double width) {
        return std::exp(-std::pow((h - centre) / width, 2.0));
      };
      const double diurnal = 0.85 + 0.28 * bump(18.5, 2.5) + 0.10 * bump(8.0, 2.0) - 0.12 * bump(3.5, 3.0);
      d[day * 24 + h] = seasonal * noise * diurnal;
    }
  }
  return d;
}

resource::CostAssumptions interp(const resource::CostAssumptions& a, const resource::CostAssumptions& b, double t) {
  const auto mix = [t](double x, double y) { return x + (y - x) * t; };
  resource::CostAssumptions c = a;
  c.capex_usd_per_kw = mix(a.capex_usd_per_kw, b.capex_usd_per_kw);
  c.fixed_om_usd_per_kw_yr = mix(a.fixed_om_usd_per_kw_yr, b.fixed_om_usd_per_kw_yr);
  c.variable_om_usd_per_mwh = mix(a.variable_om_usd_per_mwh, b.variable_om_usd_per_mwh);
  c.fuel_usd_per_mwh = mix(a.fuel_usd_per_mwh, b.fuel_usd_per_mwh);
  return c;
}

resource::CostTable cost_table(int first_year, int last_year) {
  struct Row {
    std::string tech;
    resource::CostAssumptions first, last;
  };
  const auto tech = [](double capex, double fom, double vom, double fuel, int life, double per_km = 0.0,
                       double fixed = 0.0) {
    resource::CostAssumptions c;
    c.capex_usd_per_kw = capex;
    c.fixed_om_usd_per_kw_yr = fom;
    c.variable_om_usd_per_mwh = vom;
    c.fuel_usd_per_mwh = fuel;
    c.discount_rate = 0.07;
    c.lifetime_yr = life;
    c.interconnect_usd_per_mw_km = per_km;
    c.interconnect_fixed_usd_per_mw = fixed;
    return c;
  };
  const std::vector<Row> rows = {
      {"solar", tech(1400, 22, 0, 0, 30, 1500, 60'000), tech(850, 16, 0, 0, 30, 1500, 60'000)},
      {"wind", tech(1600, 45, 0, 0, 25, 1500, 60'000), tech(1150, 38, 0, 0, 25, 1500, 60'000)},
      {"ngcc", tech(1050, 13, 2.5, 24, 30), tech(980, 13, 2.5, 28, 30)},
      {"ngcc_ccs", tech(2300, 30, 6, 28, 30), tech(1900, 28, 6, 32, 30)},
      {"coal_ccs", tech(5000, 70, 9, 15, 30), tech(4500, 65, 9, 15, 30)},
      {"nuclear", tech(6500, 120, 2.5, 7, 40), tech(5500, 115, 2.5, 7, 40)},
      {"battery", tech(1300, 25, 0.5, 0, 15), tech(700, 18, 0.5, 0, 15)},
  };
  resource::CostTable table;
  for (const auto& r : rows) {
    for (int y = first_year; y <= last_year; y += 5) {
      const double t = last_year > first_year ? double(y - first_year) / (last_year - first_year) : 0.0;
      table.set(r.tech, y, interp(r.first, r.last, t));
    }
  }
  return table;
}

// Swaps the highest-cf subdivision among the top-ranked sites into the
// silent category, trading places with a silent one outside that set.
void ban_best_site(dataset::Dataset& d, const Spec& spec) {
  const auto econ = pipeline::solar_economics(d, spec.seed, spec.first_year);
  std::vector<supply::SupplySite> sites;
  for (const auto& [id, e] : econ) {
    sites.push_back({id, e.region_id, 1.0, e.lcoe_usd_per_mwh, e.interconnect_usd_per_mw,
                     e.transmission_cost_usd_per_mwh, e.cf});
  }
  const auto top = supply::top_fraction(sites, spec.top_site_fraction);
  if (top.empty()) return;
  const auto best = std::max_element(top.begin(), top.end(), [](const auto& a, const auto& b) {
    return a.cf->mean_cf < b.cf->mean_cf || (a.cf->mean_cf == b.cf->mean_cf && a.subdivision_id > b.subdivision_id);
  });
  std::set<std::string> top_ids;
  for (const auto& s : top) top_ids.insert(s.subdivision_id);

  auto& records = d.ordinances;
  const auto find = [&](const std::string& id) {
    return std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.jurisdiction_id == id; });
  };
  const auto target = find(best->subdivision_id);
  if (target->zoned && target->silent) return;
  const auto donor = std::find_if(records.begin(), records.end(), [&](const auto& r) {
    return r.zoned && r.silent && !top_ids.count(r.jurisdiction_id);
  });
  if (donor == records.end()) return;
  std::swap(target->jurisdiction_id, donor->jurisdiction_id);
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.jurisdiction_id < b.jurisdiction_id; });
}

}  // namespace

dataset::Dataset generate(const Spec& spec) {
  if (spec.regions < 1 || spec.columns < 1 || spec.rows < 1 || !(spec.subdivision_size_m > 0.0)) {
    throw ValidationError("synthetic study area needs at least one region and subdivision");
  }
  for (double f : {spec.unzoned_fraction, spec.silent_fraction, spec.ban_fraction, spec.top_site_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("synthetic fractions must lie in [0, 1]");
  }
  if (spec.silent_fraction + spec.ban_fraction > 1.0) throw ValidationError("silent + ban fractions exceed 1");
  if (spec.last_year < spec.first_year) throw ValidationError("last_year precedes first_year");

  dataset::Dataset d;
  const double s = spec.subdivision_size_m;
  const double width = spec.columns * s;
  const double height = spec.rows * s;
  Rng layout(derive_seed(spec.seed, "synthetic:layout"));
  int road_count = 0;
  const auto add_road = [&](Point a, Point b) { d.roads.push_back({"road-" + std::to_string(++road_count), {a, b}}); };

  for (int r = 0; r < spec.regions; ++r) {
    const std::string rid = "R" + std::to_string(r + 1);
    const double x0 = r * width;
    for (int row = 0; row < spec.rows; ++row) {
      for (int col = 0; col < spec.columns; ++col) {
        const double x = x0 + col * s;
        const double y = row * s;
        d.subdivisions.push_back({rid + "-" + two_digits(row) + two_digits(col), rid,
                                  Polygon{{{x, y}, {x + s, y}, {x + s, y + s}, {x, y + s}}, {}}});
        if ((row + col) % 2 == 0) add_road({x + s / 2, y}, {x + s / 2, y + s});
      }
    }
    for (int col = (r == 0 ? 0 : 1); col <= spec.columns; ++col) add_road({x0 + col * s, 0.0}, {x0 + col * s, height});
    for (int row = 0; row <= spec.rows; ++row) add_road({x0, row * s}, {x0 + width, row * s});

    const int towns = std::max(1, spec.columns * spec.rows / 6);
    for (int k = 0; k < towns; ++k) {
      const Point c{x0 + s / 2 + unit_uniform(layout) * (width - s), s / 2 + unit_uniform(layout) * (height - s)};
      d.exclusions.push_back(octagon(c, 250.0 + 450.0 * unit_uniform(layout)));
    }

    d.transmission.push_back({"TL-" + rid + "-A",
                              {{x0, 0.3 * height}, {x0 + 0.5 * width, 0.22 * height}, {x0 + width, 0.28 * height}}});
    d.transmission.push_back({"TL-" + rid + "-B", {{x0 + 0.1 * width, height}, {x0 + 0.55 * width, 0.55 * height}}});

    d.regions.push_back({rid, {x0 + width / 2, height / 2}, {}});
  }

  // Ordinance categories with exact counts, shuffled over subdivisions.
  const int n = static_cast<int>(d.subdivisions.size());
  const int unzoned = static_cast<int>(std::lround(spec.unzoned_fraction * n));
  const int zoned = n - unzoned;
  const int silent = static_cast<int>(std::lround(spec.silent_fraction * zoned));
  const int banned = std::min(zoned - silent, static_cast<int>(std::lround(spec.ban_fraction * zoned)));
  std::vector<Category> categories;
  categories.insert(categories.end(), unzoned, Category::Unzoned);
  categories.insert(categories.end(), silent, Category::Silent);
  categories.insert(categories.end(), banned, Category::Ban);
  categories.insert(categories.end(), zoned - silent - banned, Category::Permissive);
  Rng zoning_rng(derive_seed(spec.seed, "synthetic:zoning"));
  shuffle(categories, zoning_rng);
  for (int i = 0; i < n; ++i) {
    d.ordinances.push_back(make_record(d.subdivisions[i].subdivision_id, categories[i], zoning_rng));
  }
  std::sort(d.ordinances.begin(), d.ordinances.end(),
            [](const auto& a, const auto& b) { return a.jurisdiction_id < b.jurisdiction_id; });

  d.costs = cost_table(spec.first_year, spec.last_year);

  Rng demand_rng(derive_seed(spec.seed, "synthetic:demand"));
  for (int r = 0; r < spec.regions; ++r) {
    auto& region = d.regions[r];
    const double scale = spec.regions == 1 ? 1.0 : 1.2 - 0.4 * r / (spec.regions - 1);
    std::vector<double> shape = demand_shape(demand_rng);
    double mean = 0.0;
    for (double v : shape) mean += v;
    mean /= shape.size();
    double peak = 0.0;
    for (double& v : shape) {
      v *= spec.mean_demand_mw * scale / mean;
      peak = std::max(peak, v);
    }
    region.demand_8760 = std::move(shape);
    d.existing[region.region_id]["ngcc"] = std::round(0.85 * peak);
    if (r + 1 < spec.regions) {
      d.corridors.push_back({region.region_id, "R" + std::to_string(r + 2), 30.0, 2000.0, true});
    }
  }

  dataset::validate(d);
  if (spec.ban_best_site) ban_best_site(d, spec);
  return d;
}

}  // namespace solarzoning::synthetic
