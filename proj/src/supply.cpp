#include "solarzoning/supply.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "solarzoning/csv.hpp"
#include "solarzoning/errors.hpp"
#include "solarzoning/parallel.hpp"

namespace solarzoning::supply {
namespace {

bool cheaper(const SupplySite& a, const SupplySite& b) {
  if (a.lcoe_usd_per_mwh != b.lcoe_usd_per_mwh) return a.lcoe_usd_per_mwh < b.lcoe_usd_per_mwh;
  return a.subdivision_id < b.subdivision_id;
}

// Per-state developable area of one parcel, indexed 0 (unregulated)
// through 7 (all layers applied).
std::array<double, 8> layer_areas(const parcels::Parcel& parcel, const zoning::OrdinanceRecord& record,
                                  const zoning::RuleLimits& defaults) {
  std::array<double, 8> a{};
  a[0] = geometry::developable_area(parcel, zoning::EffectiveRule::unrestricted()).area_m2;
  const zoning::EffectiveRule baseline = zoning::effective_rule(record, zoning::ScenarioKind::Baseline, defaults);
  if (baseline.is_banned()) {
    const std::size_t first_zero = record.is_outright_ban() ? 1 : 2;
    for (std::size_t k = 1; k < a.size(); ++k) a[k] = k < first_zero ? a[0] : 0.0;
    return a;
  }
  const zoning::RuleLimits& full = baseline.limits();
  a[1] = a[2] = a[0];

  zoning::RuleLimits partial;
  partial.road_setback_m = full.road_setback_m;
  a[3] = geometry::erode_by_setbacks(parcel, zoning::EffectiveRule::permitted(partial)).area_m2;
  partial.ppl_setback_m = full.ppl_setback_m;
  a[4] = geometry::erode_by_setbacks(parcel, zoning::EffectiveRule::permitted(partial)).area_m2;
  const geometry::DevelopableArea eroded = geometry::erode_by_setbacks(parcel, baseline);
  a[5] = eroded.area_m2;
  const double parcel_area = parcel.area_m2();
  a[6] = geometry::apply_lot_size(parcel_area, eroded, full.min_lot_size_m2, zoning::RuleLimits{}.max_lot_size_m2)
             .area_m2;
  a[7] = geometry::apply_lot_size(parcel_area, eroded, full.min_lot_size_m2, full.max_lot_size_m2).area_m2;
  return a;
}

double total_capacity(std::span<const SupplySite> sites) {
  double s = 0.0;
  for (const auto& site : sites) s += site.capacity_mw;
  return s;
}

std::vector<SupplySite> sites_from_areas(const std::map<std::string, double>& area_by_subdivision,
                                         const std::map<std::string, SiteEconomics>& economics, double density) {
  std::vector<SupplySite> sites;
  sites.reserve(economics.size());
  for (const auto& [id, econ] : economics) {
    SupplySite s;
    s.subdivision_id = id;
    s.region_id = econ.region_id;
    auto it = area_by_subdivision.find(id);
    s.capacity_mw = site_capacity(it == area_by_subdivision.end() ? 0.0 : it->second, density);
    s.lcoe_usd_per_mwh = econ.lcoe_usd_per_mwh;
    s.interconnect_usd_per_mw = econ.interconnect_usd_per_mw;
    s.transmission_cost_usd_per_mwh = econ.transmission_cost_usd_per_mwh;
    s.cf = econ.cf;
    sites.push_back(std::move(s));
  }
  return sites;
}

void require_economics(const std::map<std::string, SiteEconomics>& economics, const std::string& subdivision_id) {
  if (!economics.count(subdivision_id)) {
    throw ValidationError("parcel in unknown subdivision '" + subdivision_id + "'");
  }
}

}  // namespace

void validate(const SupplySite& site) {
  if (!(site.capacity_mw >= 0.0) || !std::isfinite(site.capacity_mw)) {
    throw ValidationError("site " + site.subdivision_id + " has negative capacity");
  }
  if (!std::isfinite(site.lcoe_usd_per_mwh)) throw ValidationError("site " + site.subdivision_id + " has non-finite lcoe");
}

double site_capacity(double area_m2, double density) {
  if (!(area_m2 >= 0.0) || !(density >= 0.0)) throw ValidationError("area and power density must be nonnegative");
  return area_m2 * density / 1e6;
}

double SupplyCurve::lcoe_at(double q) const {
  if (!(q > 0.0) || q > total_mw()) throw ContractViolation("abscissa outside the supply curve");
  auto it = std::lower_bound(points.begin(), points.end(), q,
                             [](const CurvePoint& p, double v) { return p.cumulative_mw < v; });
  return it->lcoe_usd_per_mwh;
}

SupplyCurve build_supply_curve(std::span<const SupplySite> sites, std::string label) {
  std::vector<const SupplySite*> order;
  for (const auto& s : sites) {
    if (s.capacity_mw > 0.0) order.push_back(&s);
  }
  std::stable_sort(order.begin(), order.end(), [](const SupplySite* a, const SupplySite* b) { return cheaper(*a, *b); });
  SupplyCurve curve;
  curve.label = std::move(label);
  double cumulative = 0.0;
  for (const SupplySite* s : order) {
    cumulative += s->capacity_mw;
    curve.points.push_back({cumulative, s->lcoe_usd_per_mwh, s->subdivision_id, s->capacity_mw});
  }
  return curve;
}

std::vector<SupplySite> top_fraction(std::span<const SupplySite> sites, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("top-site fraction must lie in (0, 1]");
  std::vector<SupplySite> sorted(sites.begin(), sites.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const SupplySite& a, const SupplySite& b) {
    if (a.transmission_cost_usd_per_mwh != b.transmission_cost_usd_per_mwh) {
      return a.transmission_cost_usd_per_mwh < b.transmission_cost_usd_per_mwh;
    }
    return a.subdivision_id < b.subdivision_id;
  });
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(sorted.size()) - 1e-9));
  sorted.resize(std::min(keep, sorted.size()));
  return sorted;
}

std::string_view to_string(ReductionLayer layer) {
  switch (layer) {
    case ReductionLayer::OutrightBans: return "outright_bans";
    case ReductionLayer::DeFactoBans: return "de_facto_bans";
    case ReductionLayer::RoadSetback: return "road_setback";
    case ReductionLayer::PPLSetback: return "ppl_setback";
    case ReductionLayer::NPPLSetback: return "nppl_setback";
    case ReductionLayer::MinLS: return "min_lot_size";
    case ReductionLayer::MaxLS: return "max_lot_size";
  }
  return "unknown";
}

std::vector<geometry::DevelopableArea> evaluate_parcels(std::span<const parcels::Parcel> parcels,
                                                        const std::map<std::string, zoning::EffectiveRule>& rules) {
  for (const auto& p : parcels) {
    if (!rules.count(p.subdivision_id)) throw ValidationError("parcel in unknown subdivision '" + p.subdivision_id + "'");
  }
  std::vector<geometry::DevelopableArea> out(parcels.size());
  parallel_for(parcels.size(), [&](std::size_t i) {
    out[i] = geometry::developable_area(parcels[i], rules.at(parcels[i].subdivision_id));
  });
  return out;
}

std::vector<SupplySite> make_sites(std::span<const parcels::Parcel> parcels,
                                   std::span<const geometry::DevelopableArea> areas,
                                   const std::map<std::string, SiteEconomics>& economics, double density) {
  if (parcels.size() != areas.size()) throw ContractViolation("parcel and area lists differ in length");
  std::map<std::string, double> by_subdivision;
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    require_economics(economics, parcels[i].subdivision_id);
    by_subdivision[parcels[i].subdivision_id] += areas[i].area_m2;
  }
  return sites_from_areas(by_subdivision, economics, density);
}

Waterfall waterfall(std::span<const parcels::Parcel> parcels, const std::vector<zoning::OrdinanceRecord>& ordinances,
                    const std::map<std::string, SiteEconomics>& economics, const zoning::RuleLimits& unzoned_defaults,
                    double density) {
  std::map<std::string, const zoning::OrdinanceRecord*> by_id;
  for (const auto& r : ordinances) by_id[r.jurisdiction_id] = &r;
  for (const auto& p : parcels) {
    if (!by_id.count(p.subdivision_id)) throw ValidationError("parcel in unknown subdivision '" + p.subdivision_id + "'");
    require_economics(economics, p.subdivision_id);
  }

  std::vector<std::array<double, 8>> per_parcel(parcels.size());
  parallel_for(parcels.size(), [&](std::size_t i) {
    per_parcel[i] = layer_areas(parcels[i], *by_id.at(parcels[i].subdivision_id), unzoned_defaults);
  });

  std::array<std::vector<SupplySite>, 8> states;
  for (std::size_t k = 0; k < states.size(); ++k) {
    std::map<std::string, double> by_subdivision;
    for (std::size_t i = 0; i < parcels.size(); ++i) by_subdivision[parcels[i].subdivision_id] += per_parcel[i][k];
    states[k] = sites_from_areas(by_subdivision, economics, density);
  }

  Waterfall w;
  w.unregulated_mw = total_capacity(states[0]);
  w.baseline_mw = total_capacity(states[7]);
  w.unregulated_curve = build_supply_curve(states[0], "unregulated");
  double before = w.unregulated_mw;
  for (std::size_t k = 1; k < states.size(); ++k) {
    const ReductionLayer layer = kLayerOrder[k - 1];
    const double after = total_capacity(states[k]);
    w.layers.push_back({layer, after, before - after, build_supply_curve(states[k], std::string(to_string(layer)))});
    before = after;
  }
  return w;
}

void write_supply_curves(std::ostream& out, std::span<const SupplyCurve> curves) {
  out << "label,subdivision_id,capacity_mw,lcoe_usd_per_mwh,cumulative_mw\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << csv::escape(c.label) << ',' << csv::escape(p.subdivision_id) << ',' << csv::format_double(p.capacity_mw)
          << ',' << csv::format_double(p.lcoe_usd_per_mwh) << ',' << csv::format_double(p.cumulative_mw) << '\n';
    }
  }
}

void write_waterfall(std::ostream& out, const Waterfall& w) {
  out << "layer,capacity_after_mw,reduction_mw\n";
  out << "unregulated," << csv::format_double(w.unregulated_mw) << ",0\n";
  for (const auto& l : w.layers) {
    out << to_string(l.layer) << ',' << csv::format_double(l.capacity_after_mw) << ','
        << csv::format_double(l.reduction_mw) << '\n';
  }
}

}  // namespace solarzoning::supply
