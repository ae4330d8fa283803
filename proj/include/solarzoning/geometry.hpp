#pragma once

// Developable area of a parcel under a zoning rule: per-edge-class setback
// erosion followed by lot-size filters.

#include <string>
#include <string_view>
#include <vector>

#include "solarzoning/geom_types.hpp"
#include "solarzoning/parcels.hpp"
#include "solarzoning/zoning.hpp"

namespace solarzoning::geometry {

enum class LimitingRule { None, RoadSetback, PPLSetback, NPPLSetback, MinLotSize, MaxLotSize, Banned };

std::string_view to_string(LimitingRule rule);

/// Developable land of one parcel. When a maximum lot size caps the area,
/// `polygon_parts` still hold the full eroded footprint and `area_m2`
/// records the capped value.
struct DevelopableArea {
  std::string parcel_id;
  std::vector<Polygon> polygon_parts;
  double area_m2 = 0.0;
  LimitingRule limiting_rule = LimitingRule::None;
};

// Vertices per full circle used to approximate round buffer caps.
inline constexpr int kArcResolution = 256;

/// Removes from the parcel every point closer than its class setback to
/// an edge of that class (round caps, so distance-to-segment semantics).
/// Classes are applied in the order road, PPL, NPPL; `limiting_rule` is the
/// last one that reduced the area. Throws ContractViolation for a Banned
/// rule and ValidationError for negative setbacks.
DevelopableArea erode_by_setbacks(const parcels::Parcel& parcel, const zoning::EffectiveRule& rule);

/// Lot-size filter: parcel below the minimum lot → 0 (MinLotSize);
/// developable area above the maximum lot → capped (MaxLotSize).
/// Throws ValidationError if min > max.
DevelopableArea apply_lot_size(double parcel_area_m2, DevelopableArea developable, double min_lot_m2,
                               double max_lot_m2);

/// Full per-parcel evaluation: Banned → zero area with limiting rule
/// Banned, otherwise erosion then lot size.
DevelopableArea developable_area(const parcels::Parcel& parcel, const zoning::EffectiveRule& rule);

}  // namespace solarzoning::geometry
