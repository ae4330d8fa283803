#pragma once

// GeoJSON input and output for planar (projected, meter) coordinates.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "solarzoning/geom_types.hpp"
#include "solarzoning/geometry.hpp"
#include "solarzoning/parcels.hpp"
#include "solarzoning/resource.hpp"

namespace solarzoning::geojson {

struct Subdivision {
  std::string subdivision_id;
  std::string region_id;
  Polygon polygon;
};

struct NamedPolyline {
  std::string id;
  Polyline polyline;
};

/// Polygon features with string properties `subdivision_id` and `region_id`.
std::vector<Subdivision> read_subdivisions(const std::string& path);
void write_subdivisions(std::ostream& out, std::span<const Subdivision> subdivisions);

/// LineString / MultiLineString features; `id_property` names each line
/// (a MultiLineString yields one entry per part, suffixed ":<k>").
std::vector<NamedPolyline> read_polylines(const std::string& path, const std::string& id_property);
void write_polylines(std::ostream& out, std::span<const NamedPolyline> lines, const std::string& id_property);

/// Every Polygon / MultiPolygon in the collection.
std::vector<Polygon> read_polygons(const std::string& path);
void write_polygons(std::ostream& out, std::span<const Polygon> polygons);

/// Parcels with `parcel_id`, `subdivision_id`, and `edge_classes` (one
/// array of "road" / "ppl" / "nppl" per ring).
void write_parcels(std::ostream& out, std::span<const parcels::Parcel> parcels);
std::vector<parcels::Parcel> read_parcels(const std::string& path);

/// Developable footprints (MultiPolygon) with area and limiting rule.
void write_developable(std::ostream& out, std::span<const geometry::DevelopableArea> areas);

}  // namespace solarzoning::geojson
