#pragma once

// Synthetic land parcels: generation by guillotine splitting, edge
// adjacency classification, and land-use exclusions.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solarzoning/geom_types.hpp"

namespace solarzoning::parcels {

enum class EdgeClass { Road, ParticipatingLine, NonParticipatingLine };

std::string_view to_string(EdgeClass c);
EdgeClass parse_edge_class(std::string_view text);

struct Edge {
  Segment segment;
  EdgeClass edge_class;
};

/// A land parcel. `edge_classes[k][i]` classifies the edge of ring k
/// (0 = outer, then holes) running from vertex i to vertex i+1.
struct Parcel {
  std::string parcel_id;
  std::string subdivision_id;
  Polygon polygon;
  std::vector<std::vector<EdgeClass>> edge_classes;

  double area_m2() const;
  std::vector<Edge> edges() const;
  const Ring& ring(std::size_t k) const { return k == 0 ? polygon.outer : polygon.holes[k - 1]; }
  std::size_t ring_count() const { return 1 + polygon.holes.size(); }

  // Parcel over `polygon` with every edge set to `uniform`.
  static Parcel make(std::string parcel_id, std::string subdivision_id, Polygon polygon,
                     EdgeClass uniform = EdgeClass::NonParticipatingLine);
};

// Throws ValidationError unless rings are simple, oriented (outer CCW,
// holes CW), of positive area, and edge classes match the edge count.
void validate(const Parcel& parcel);

/// Polygons marking urban, restricted and non-agricultural land.
struct ExclusionMask {
  std::vector<Polygon> polygons;
};

/// Seeded guillotine split of the subdivision's bounding box into parcels
/// whose areas are drawn from `size_distribution` (each parcel within ±25%
/// of its drawn target). Axis-aligned road segments spanning a piece are
/// used as split lines first. Pieces crossing the subdivision boundary are
/// clipped and kept only if still within tolerance. Parcels have all edges
/// NonParticipatingLine until classify_edges runs.
std::vector<Parcel> generate_parcels(const Polygon& subdivision, std::string_view subdivision_id,
                                     std::span<const double> size_distribution,
                                     std::span<const Polyline> road_network, std::uint64_t seed);

// Allowed relative deviation of a generated parcel from its drawn target area.
inline constexpr double kParcelAreaTolerance = 0.25;

// Edges within this distance of a road are road-adjacent.
inline constexpr double kRoadTolerance_m = 1.0;

/// Bounding-box spatial index over a parcel collection.
class ParcelIndex {
 public:
  explicit ParcelIndex(std::span<const Parcel> parcels);
  ~ParcelIndex();
  ParcelIndex(ParcelIndex&&) noexcept;
  ParcelIndex& operator=(ParcelIndex&&) noexcept;

  // Parcels whose bounding boxes intersect `box`.
  std::vector<const Parcel*> query(const Box& box) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Whether the owner of `parcel_id` participates in a neighboring project
/// (a seeded Bernoulli draw keyed by the parcel id).
bool is_participating(std::string_view parcel_id, double participation_rate, std::uint64_t seed);

/// Edge classification: an edge lying entirely within 1 m of the road
/// network is Road; an edge entirely covered by boundaries of participating
/// neighbors is ParticipatingLine; everything else is NonParticipatingLine.
/// Geometry is returned unchanged.
Parcel classify_edges(const Parcel& parcel, std::span<const Polyline> road_network,
                      const ParcelIndex& neighbor_index, double participation_rate, std::uint64_t seed);

/// Classifies every parcel of a collection against the rest of it.
std::vector<Parcel> classify_all(std::span<const Parcel> parcels, std::span<const Polyline> road_network,
                                 double participation_rate, std::uint64_t seed);

/// Removes masked land. Surviving boundary keeps its edge class; boundary
/// created by the cut is NonParticipatingLine. Multi-part results become
/// one parcel per part with ids suffixed "-1", "-2", ...; empty results
/// are dropped.
std::vector<Parcel> apply_exclusions(std::span<const Parcel> parcels, const ExclusionMask& mask);

}  // namespace solarzoning::parcels
