#pragma once

#include <vector>

namespace solarzoning {

// Planar coordinates in meters (inputs are assumed pre-projected).
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Open ring: the closing vertex is implicit, so ring[i] -> ring[(i+1) % n].
using Ring = std::vector<Point>;
using Polyline = std::vector<Point>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;

  friend bool operator==(const Polygon&, const Polygon&) = default;
};

struct Segment {
  Point a;
  Point b;
};

struct Box {
  Point min;
  Point max;
};

}  // namespace solarzoning
