#pragma once

// Subdivision-level supply sites, supply curves and the zoning waterfall.

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solarzoning/geometry.hpp"
#include "solarzoning/parcels.hpp"
#include "solarzoning/resource.hpp"
#include "solarzoning/zoning.hpp"

namespace solarzoning::supply {

inline constexpr double kSolarPowerDensity_w_m2 = 7.1;
inline constexpr double kWindPowerDensity_w_m2 = 0.8;

struct SupplySite {
  std::string subdivision_id;
  std::string region_id;
  double capacity_mw = 0.0;
  double lcoe_usd_per_mwh = 0.0;
  double interconnect_usd_per_mw = 0.0;
  double transmission_cost_usd_per_mwh = 0.0;  // levelized, the top-site ranking key
  std::shared_ptr<const resource::CapacityFactorSeries> cf;
};

// Throws ValidationError unless capacity is nonnegative and lcoe finite.
void validate(const SupplySite& site);

/// area × density / 10⁶. Throws ValidationError for negative inputs.
double site_capacity(double developable_area_m2, double power_density_w_per_m2);

struct CurvePoint {
  double cumulative_mw;
  double lcoe_usd_per_mwh;
  std::string subdivision_id;
  double capacity_mw;
};

struct SupplyCurve {
  std::string label;
  std::vector<CurvePoint> points;

  double total_mw() const { return points.empty() ? 0.0 : points.back().cumulative_mw; }
  // Marginal cost of the q-th MW: lcoe of the first step reaching q.
  // Requires 0 < q ≤ total_mw().
  double lcoe_at(double q) const;
};

/// Sorts by lcoe (ties by subdivision_id), drops zero-capacity sites and
/// accumulates capacity.
SupplyCurve build_supply_curve(std::span<const SupplySite> sites, std::string label);

/// The ⌈fraction·n⌉ sites with the lowest levelized transmission cost,
/// ties by subdivision_id, returned in that order.
std::vector<SupplySite> top_fraction(std::span<const SupplySite> sites, double fraction);

enum class ReductionLayer { OutrightBans, DeFactoBans, RoadSetback, PPLSetback, NPPLSetback, MinLS, MaxLS };
inline constexpr std::array<ReductionLayer, 7> kLayerOrder = {
    ReductionLayer::OutrightBans, ReductionLayer::DeFactoBans, ReductionLayer::RoadSetback,
    ReductionLayer::PPLSetback,   ReductionLayer::NPPLSetback, ReductionLayer::MinLS,
    ReductionLayer::MaxLS};
std::string_view to_string(ReductionLayer layer);

/// Scenario-independent attributes of a subdivision's would-be site.
struct SiteEconomics {
  std::string region_id;
  double lcoe_usd_per_mwh = 0.0;
  double interconnect_usd_per_mw = 0.0;
  double transmission_cost_usd_per_mwh = 0.0;
  std::shared_ptr<const resource::CapacityFactorSeries> cf;
};

/// Developable area of every parcel under per-jurisdiction rules (keyed by
/// subdivision id). Parcels are evaluated in parallel; output order matches
/// input order. Throws ValidationError for a parcel whose subdivision has
/// no rule.
std::vector<geometry::DevelopableArea> evaluate_parcels(std::span<const parcels::Parcel> parcels,
                                                        const std::map<std::string, zoning::EffectiveRule>& rules);

/// Sums developable area by subdivision (every subdivision in `economics`
/// appears, possibly with 0) and converts to sites.
std::vector<SupplySite> make_sites(std::span<const parcels::Parcel> parcels,
                                   std::span<const geometry::DevelopableArea> areas,
                                   const std::map<std::string, SiteEconomics>& economics,
                                   double power_density_w_per_m2);

struct LayerResult {
  ReductionLayer layer;
  double capacity_after_mw;
  double reduction_mw;
  SupplyCurve curve;
};

struct Waterfall {
  double unregulated_mw = 0.0;
  double baseline_mw = 0.0;
  SupplyCurve unregulated_curve;
  std::vector<LayerResult> layers;  // kLayerOrder
};

/// Applies the baseline rules one layer at a time, cumulatively, in
/// kLayerOrder. The last state is computed exactly as the baseline
/// scenario is, so the reductions telescope to unregulated − baseline.
/// Throws ValidationError for a parcel in an unknown subdivision.
Waterfall waterfall(std::span<const parcels::Parcel> parcels, const std::vector<zoning::OrdinanceRecord>& ordinances,
                    const std::map<std::string, SiteEconomics>& economics, const zoning::RuleLimits& unzoned_defaults,
                    double power_density_w_per_m2);

/// CSV columns: label, subdivision_id, capacity_mw, lcoe_usd_per_mwh, cumulative_mw.
void write_supply_curves(std::ostream& out, std::span<const SupplyCurve> curves);
/// CSV columns: layer, capacity_after_mw, reduction_mw.
void write_waterfall(std::ostream& out, const Waterfall& waterfall);

}  // namespace solarzoning::supply
