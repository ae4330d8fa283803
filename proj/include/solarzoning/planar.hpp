#pragma once

// Planar geometry primitives and polygon set operations.

#include <optional>
#include <span>
#include <vector>

#include "solarzoning/geom_types.hpp"

namespace solarzoning::planar {

/// Shoelace area, positive for counterclockwise rings. Throws
/// ValidationError for a self-intersecting ring; a degenerate (zero-area)
/// ring returns 0 and emits a warning.
double polygon_area(std::span<const Point> ring);

// Shoelace without validation.
double signed_area(std::span<const Point> ring);

// Outer area minus hole areas (orientation-independent).
double area(const Polygon& polygon);
double total_area(std::span<const Polygon> polygons);

// True if no two non-adjacent edges touch and adjacent edges only share
// their common vertex.
bool is_simple(std::span<const Point> ring);

void make_ccw(Ring& ring);
// Outer ring counterclockwise, holes clockwise.
void normalize(Polygon& polygon);

double distance(Point p, Point q);
double distance(Point p, const Segment& s);
double distance(Point p, std::span<const Point> polyline);

// Even-odd containment; boundary points count as inside.
bool contains(std::span<const Point> ring, Point p);
bool contains(const Polygon& polygon, Point p);

Box bounds(std::span<const Point> points);
Box bounds(const Polygon& polygon);

Point centroid(const Polygon& polygon);

struct Interval {
  double lo;
  double hi;
};
// Parameter interval [lo, hi] ⊆ [0, 1] of segment `s` whose points lie
// within `tolerance` of segment `reference` (a single interval, since the
// distance is convex along `s`).
std::optional<Interval> near_interval(const Segment& s, const Segment& reference, double tolerance);

// True if the union of `intervals` covers [0, 1] up to `slack`.
bool covers_unit(std::vector<Interval> intervals, double slack = 1e-9);

// Polygon set operations (Boost.Geometry backed). Results are normalized
// and parts with area below `min_area` are dropped.
std::vector<Polygon> difference(const std::vector<Polygon>& subject, const std::vector<Polygon>& clip,
                                double min_area = 1e-9);
std::vector<Polygon> intersection(const Polygon& a, const Polygon& b, double min_area = 1e-9);
std::vector<Polygon> unite(const std::vector<Polygon>& polygons);

// Union of round-capped buffers of every segment (the set of points within
// `radius` of some segment).
std::vector<Polygon> buffer_segments(std::span<const Segment> segments, double radius,
                                     int points_per_circle = 256);

}  // namespace solarzoning::planar
