#include "solarzoning/geometry.hpp"

#include <cmath>

#include "solarzoning/errors.hpp"
#include "solarzoning/planar.hpp"

namespace solarzoning::geometry {

using parcels::EdgeClass;

std::string_view to_string(LimitingRule rule) {
  switch (rule) {
    case LimitingRule::None: return "none";
    case LimitingRule::RoadSetback: return "road_setback";
    case LimitingRule::PPLSetback: return "ppl_setback";
    case LimitingRule::NPPLSetback: return "nppl_setback";
    case LimitingRule::MinLotSize: return "min_lot_size";
    case LimitingRule::MaxLotSize: return "max_lot_size";
    case LimitingRule::Banned: return "banned";
  }
  return "unknown";
}

DevelopableArea erode_by_setbacks(const parcels::Parcel& parcel, const zoning::EffectiveRule& rule) {
  if (rule.is_banned()) throw ContractViolation("erode_by_setbacks called with a Banned rule");
  const zoning::RuleLimits& limits = rule.limits();

  struct Step {
    EdgeClass edge_class;
    double distance;
    LimitingRule tag;
  };
  const Step steps[] = {{EdgeClass::Road, limits.road_setback_m, LimitingRule::RoadSetback},
                        {EdgeClass::ParticipatingLine, limits.ppl_setback_m, LimitingRule::PPLSetback},
                        {EdgeClass::NonParticipatingLine, limits.nppl_setback_m, LimitingRule::NPPLSetback}};
  for (const auto& s : steps) {
    if (!(s.distance >= 0.0) || !std::isfinite(s.distance)) throw ValidationError("negative or non-finite setback");
  }

  DevelopableArea out;
  out.parcel_id = parcel.parcel_id;
  out.polygon_parts = {parcel.polygon};
  out.area_m2 = parcel.area_m2();

  const auto edges = parcel.edges();
  for (const auto& step : steps) {
    if (step.distance == 0.0 || out.polygon_parts.empty()) continue;
    std::vector<Segment> segments;
    for (const auto& e : edges) {
      if (e.edge_class == step.edge_class) segments.push_back(e.segment);
    }
    if (segments.empty()) continue;
    const auto buffer = planar::buffer_segments(segments, step.distance, kArcResolution);
    auto remaining = planar::difference(out.polygon_parts, buffer, 1e-6);
    const double remaining_area = planar::total_area(remaining);
    if (remaining_area < out.area_m2 * (1 - 1e-12)) out.limiting_rule = step.tag;
    out.polygon_parts = std::move(remaining);
    out.area_m2 = remaining_area;
  }
  return out;
}

DevelopableArea apply_lot_size(double parcel_area_m2, DevelopableArea developable, double min_lot_m2,
                               double max_lot_m2) {
  if (std::isnan(min_lot_m2) || std::isnan(max_lot_m2) || min_lot_m2 < 0.0 || max_lot_m2 < 0.0) {
    throw ValidationError("lot sizes must be nonnegative");
  }
  if (min_lot_m2 > max_lot_m2) throw ValidationError("minimum lot size exceeds maximum lot size");
  if (parcel_area_m2 < min_lot_m2) {
    developable.area_m2 = 0.0;
    developable.limiting_rule = LimitingRule::MinLotSize;
  } else if (developable.area_m2 > max_lot_m2) {
    developable.area_m2 = max_lot_m2;
    developable.limiting_rule = LimitingRule::MaxLotSize;
  }
  return developable;
}

DevelopableArea developable_area(const parcels::Parcel& parcel, const zoning::EffectiveRule& rule) {
  if (rule.is_banned()) {
    DevelopableArea out;
    out.parcel_id = parcel.parcel_id;
    out.limiting_rule = LimitingRule::Banned;
    return out;
  }
  const auto& limits = rule.limits();
  return apply_lot_size(parcel.area_m2(), erode_by_setbacks(parcel, rule), limits.min_lot_size_m2,
                        limits.max_lot_size_m2);
}

}  // namespace solarzoning::geometry
