#include "solarzoning/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/linestring.hpp>
#include <boost/geometry/geometries/multi_linestring.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "solarzoning/errors.hpp"
#include "solarzoning/log.hpp"

namespace bg = boost::geometry;

namespace solarzoning::planar {
namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, /*ClockWise=*/false, /*Closed=*/true>;
using BMultiPolygon = bg::model::multi_polygon<BPolygon>;
using BLinestring = bg::model::linestring<BPoint>;
using BMultiLinestring = bg::model::multi_linestring<BLinestring>;

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

int orientation(Point a, Point b, Point c) {
  const double v = cross(a, b, c);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(q1, p1, p2)) return true;
  if (o2 == 0 && on_segment(q2, p1, p2)) return true;
  if (o3 == 0 && on_segment(p1, q1, q2)) return true;
  if (o4 == 0 && on_segment(p2, q1, q2)) return true;
  return false;
}

void append_ring(const Ring& ring, std::vector<BPoint>& out) {
  for (const auto& p : ring) out.emplace_back(p.x, p.y);
  if (!ring.empty()) out.emplace_back(ring.front().x, ring.front().y);
}

BPolygon to_boost(const Polygon& polygon) {
  BPolygon b;
  append_ring(polygon.outer, b.outer());
  for (const auto& hole : polygon.holes) {
    b.inners().emplace_back();
    append_ring(hole, b.inners().back());
  }
  bg::correct(b);
  return b;
}

BMultiPolygon to_boost(const std::vector<Polygon>& polygons) {
  BMultiPolygon mp;
  for (const auto& p : polygons) mp.push_back(to_boost(p));
  return mp;
}

template <typename BRing>
Ring from_boost_ring(const BRing& ring) {
  Ring out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.push_back({p.x(), p.y()});
  if (out.size() > 1 && out.front() == out.back()) out.pop_back();
  // Drop consecutive duplicates left by the set operations.
  Ring dedup;
  for (const auto& p : out) {
    if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(p);
  }
  while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
  return dedup;
}

std::vector<Polygon> from_boost(const BMultiPolygon& mp, double min_area) {
  std::vector<Polygon> out;
  for (const auto& b : mp) {
    Polygon p;
    p.outer = from_boost_ring(b.outer());
    if (p.outer.size() < 3) continue;
    for (const auto& inner : b.inners()) {
      Ring hole = from_boost_ring(inner);
      if (hole.size() >= 3 && std::abs(signed_area(hole)) > min_area) p.holes.push_back(std::move(hole));
    }
    normalize(p);
    if (area(p) > min_area) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

double signed_area(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  // Shifted origin reduces cancellation for large projected coordinates.
  const Point o = ring[0];
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % n];
    twice += (a.x - o.x) * (b.y - o.y) - (b.x - o.x) * (a.y - o.y);
  }
  return 0.5 * twice;
}

bool is_simple(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a1 = ring[i];
    const Point a2 = ring[(i + 1) % n];
    if (a1 == a2) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point b1 = ring[j];
      const Point b2 = ring[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges may only share the common vertex: reject folding back.
        const Point shared = (j == i + 1) ? a2 : a1;
        const Point other_a = (j == i + 1) ? a1 : a2;
        const Point other_b = (j == i + 1) ? b2 : b1;
        if (orientation(shared, other_a, other_b) == 0) {
          const double dot = (other_a.x - shared.x) * (other_b.x - shared.x) +
                             (other_a.y - shared.y) * (other_b.y - shared.y);
          if (dot > 0) return false;
        }
        continue;
      }
      if (segments_touch(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

double polygon_area(std::span<const Point> ring) {
  bool collinear = true;
  for (std::size_t i = 2; i < ring.size() && collinear; ++i) {
    collinear = orientation(ring[0], ring[1], ring[i]) == 0;
  }
  if (ring.size() < 3 || collinear) {
    log::warn("zero-area (degenerate) ring");
    return 0.0;
  }
  if (!is_simple(ring)) throw ValidationError("self-intersecting ring");
  return signed_area(ring);
}

double area(const Polygon& polygon) {
  double a = std::abs(signed_area(polygon.outer));
  for (const auto& h : polygon.holes) a -= std::abs(signed_area(h));
  return a;
}

double total_area(std::span<const Polygon> polygons) {
  double a = 0.0;
  for (const auto& p : polygons) a += area(p);
  return a;
}

void make_ccw(Ring& ring) {
  if (signed_area(ring) < 0) std::reverse(ring.begin(), ring.end());
}

void normalize(Polygon& polygon) {
  make_ccw(polygon.outer);
  for (auto& h : polygon.holes) {
    if (signed_area(h) > 0) std::reverse(h.begin(), h.end());
  }
}

double distance(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

double distance(Point p, const Segment& s) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, s.a);
  double t = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (s.a.x + t * dx), p.y - (s.a.y + t * dy));
}

double distance(Point p, std::span<const Point> polyline) {
  if (polyline.empty()) return std::numeric_limits<double>::infinity();
  if (polyline.size() == 1) return distance(p, polyline[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    best = std::min(best, distance(p, Segment{polyline[i], polyline[i + 1]}));
  }
  return best;
}

bool contains(std::span<const Point> ring, Point p) {
  const std::size_t n = ring.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = ring[i];
    const Point& b = ring[j];
    if (orientation(a, b, p) == 0 && on_segment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool contains(const Polygon& polygon, Point p) {
  if (!contains(polygon.outer, p)) return false;
  for (const auto& h : polygon.holes) {
    if (contains(h, p)) {
      // Points on a hole boundary are still on the polygon boundary.
      const std::size_t n = h.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (distance(p, Segment{h[i], h[(i + 1) % n]}) == 0.0) return true;
      }
      return false;
    }
  }
  return true;
}

Box bounds(std::span<const Point> points) {
  Box b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
        {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const auto& p : points) {
    b.min.x = std::min(b.min.x, p.x);
    b.min.y = std::min(b.min.y, p.y);
    b.max.x = std::max(b.max.x, p.x);
    b.max.y = std::max(b.max.y, p.y);
  }
  return b;
}

Box bounds(const Polygon& polygon) { return bounds(polygon.outer); }

Point centroid(const Polygon& polygon) {
  auto ring_moments = [](const Ring& ring, double& a, double& cx, double& cy) {
    const std::size_t n = ring.size();
    const Point o = ring.empty() ? Point{} : ring[0];
    double twice = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point p{ring[i].x - o.x, ring[i].y - o.y};
      const Point q{ring[(i + 1) % n].x - o.x, ring[(i + 1) % n].y - o.y};
      const double c = p.x * q.y - q.x * p.y;
      twice += c;
      sx += (p.x + q.x) * c;
      sy += (p.y + q.y) * c;
    }
    a = 0.5 * twice;
    cx = twice != 0 ? sx / (3.0 * twice) + o.x : o.x;
    cy = twice != 0 ? sy / (3.0 * twice) + o.y : o.y;
  };
  double a = 0, cx = 0, cy = 0;
  ring_moments(polygon.outer, a, cx, cy);
  double total = std::abs(a);
  double mx = cx * total, my = cy * total;
  for (const auto& h : polygon.holes) {
    double ha = 0, hx = 0, hy = 0;
    ring_moments(h, ha, hx, hy);
    total -= std::abs(ha);
    mx -= hx * std::abs(ha);
    my -= hy * std::abs(ha);
  }
  if (total <= 0) {
    const Box b = bounds(polygon.outer);
    return {(b.min.x + b.max.x) / 2, (b.min.y + b.max.y) / 2};
  }
  return {mx / total, my / total};
}

std::optional<Interval> near_interval(const Segment& s, const Segment& ref, double tol) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  auto absorb = [&](double a, double b) {
    a = std::max(a, 0.0);
    b = std::min(b, 1.0);
    if (a <= b) {
      lo = std::min(lo, a);
      hi = std::max(hi, b);
    }
  };

  // Disks around the reference endpoints: |s(t) - c|^2 <= tol^2.
  for (const Point c : {ref.a, ref.b}) {
    const double fx = s.a.x - c.x;
    const double fy = s.a.y - c.y;
    const double qa = dx * dx + dy * dy;
    const double qb = 2 * (dx * fx + dy * fy);
    const double qc = fx * fx + fy * fy - tol * tol;
    if (qa == 0.0) {
      if (qc <= 0) absorb(0, 1);
      continue;
    }
    const double disc = qb * qb - 4 * qa * qc;
    if (disc < 0) continue;
    const double root = std::sqrt(disc);
    absorb((-qb - root) / (2 * qa), (-qb + root) / (2 * qa));
  }

  // Rectangle swept along the reference segment, clipped Liang-Barsky style.
  const double rx = ref.b.x - ref.a.x;
  const double ry = ref.b.y - ref.a.y;
  const double len = std::hypot(rx, ry);
  if (len > 0) {
    const double ux = rx / len, uy = ry / len;
    const double nx = -uy, ny = ux;
    // along(t) = a0 + a1 t in [0, len]; across(t) = c0 + c1 t in [-tol, tol].
    const double a0 = (s.a.x - ref.a.x) * ux + (s.a.y - ref.a.y) * uy;
    const double a1 = dx * ux + dy * uy;
    const double c0 = (s.a.x - ref.a.x) * nx + (s.a.y - ref.a.y) * ny;
    const double c1 = dx * nx + dy * ny;
    double t0 = 0.0, t1 = 1.0;
    auto clip = [&](double v0, double v1, double min_v, double max_v) {
      if (v1 == 0.0) return min_v <= v0 && v0 <= max_v;
      double ta = (min_v - v0) / v1;
      double tb = (max_v - v0) / v1;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      return t0 <= t1;
    };
    if (clip(a0, a1, 0.0, len) && clip(c0, c1, -tol, tol)) absorb(t0, t1);
  }

  if (lo > hi) return std::nullopt;
  return Interval{lo, hi};
}

bool covers_unit(std::vector<Interval> intervals, double slack) {
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double reach = 0.0;
  for (const auto& iv : intervals) {
    if (iv.lo > reach + slack) return false;
    reach = std::max(reach, iv.hi);
    if (reach >= 1.0 - slack) return true;
  }
  return reach >= 1.0 - slack;
}

std::vector<Polygon> difference(const std::vector<Polygon>& subject, const std::vector<Polygon>& clip,
                                double min_area) {
  if (clip.empty()) {
    std::vector<Polygon> out;
    for (Polygon p : subject) {
      normalize(p);
      if (area(p) > min_area) out.push_back(std::move(p));
    }
    return out;
  }
  BMultiPolygon clip_union;
  for (const auto& c : clip) {
    BMultiPolygon merged;
    bg::union_(clip_union, to_boost(c), merged);
    clip_union = std::move(merged);
  }
  BMultiPolygon result;
  bg::difference(to_boost(subject), clip_union, result);
  return from_boost(result, min_area);
}

std::vector<Polygon> intersection(const Polygon& a, const Polygon& b, double min_area) {
  BMultiPolygon result;
  bg::intersection(to_boost(a), to_boost(b), result);
  return from_boost(result, min_area);
}

std::vector<Polygon> unite(const std::vector<Polygon>& polygons) {
  BMultiPolygon acc;
  for (const auto& p : polygons) {
    BMultiPolygon merged;
    bg::union_(acc, to_boost(p), merged);
    acc = std::move(merged);
  }
  return from_boost(acc, 0.0);
}

std::vector<Polygon> buffer_segments(std::span<const Segment> segments, double radius,
                                     int points_per_circle) {
  if (segments.empty() || radius <= 0.0) return {};
  BMultiLinestring lines;
  for (const auto& s : segments) {
    BLinestring ls;
    ls.emplace_back(s.a.x, s.a.y);
    ls.emplace_back(s.b.x, s.b.y);
    lines.push_back(std::move(ls));
  }
  bg::strategy::buffer::distance_symmetric<double> distance_strategy(radius);
  bg::strategy::buffer::join_round join_strategy(points_per_circle);
  bg::strategy::buffer::end_round end_strategy(points_per_circle);
  bg::strategy::buffer::point_circle point_strategy(points_per_circle);
  bg::strategy::buffer::side_straight side_strategy;
  BMultiPolygon result;
  bg::buffer(lines, result, distance_strategy, side_strategy, join_strategy, end_strategy, point_strategy);
  return from_boost(result, 0.0);
}

}  // namespace solarzoning::planar
