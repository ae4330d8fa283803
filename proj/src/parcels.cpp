#include "solarzoning/parcels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "solarzoning/errors.hpp"
#include "solarzoning/planar.hpp"
#include "solarzoning/random.hpp"

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace solarzoning::parcels {
namespace {

struct Rect {
  double x0, y0, x1, y1;
  double area() const { return (x1 - x0) * (y1 - y0); }
  Polygon polygon() const { return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, {}}; }
};

// An axis-aligned road segment usable as a guillotine split line.
struct RoadLine {
  bool vertical;
  double at;      // x for vertical, y for horizontal
  double lo, hi;  // extent along the line
};

std::vector<RoadLine> axis_aligned_roads(std::span<const Polyline> roads) {
  std::vector<RoadLine> lines;
  for (const auto& road : roads) {
    for (std::size_t i = 0; i + 1 < road.size(); ++i) {
      const Point a = road[i], b = road[i + 1];
      if (std::abs(a.x - b.x) <= 1e-9 && a.y != b.y) {
        lines.push_back({true, a.x, std::min(a.y, b.y), std::max(a.y, b.y)});
      } else if (std::abs(a.y - b.y) <= 1e-9 && a.x != b.x) {
        lines.push_back({false, a.y, std::min(a.x, b.x), std::max(a.x, b.x)});
      }
    }
  }
  return lines;
}

// Road line crossing the rectangle fully, nearest its center.
std::optional<RoadLine> road_split(const Rect& r, const std::vector<RoadLine>& lines) {
  constexpr double kMinPiece = 1.0;
  const double cx = (r.x0 + r.x1) / 2, cy = (r.y0 + r.y1) / 2;
  std::optional<RoadLine> best;
  double best_score = std::numeric_limits<double>::infinity();
  for (const auto& l : lines) {
    double score;
    if (l.vertical) {
      if (l.at <= r.x0 + kMinPiece || l.at >= r.x1 - kMinPiece) continue;
      if (l.lo > r.y0 + kRoadTolerance_m || l.hi < r.y1 - kRoadTolerance_m) continue;
      score = std::abs(l.at - cx) / (r.x1 - r.x0);
    } else {
      if (l.at <= r.y0 + kMinPiece || l.at >= r.y1 - kMinPiece) continue;
      if (l.lo > r.x0 + kRoadTolerance_m || l.hi < r.x1 - kRoadTolerance_m) continue;
      score = std::abs(l.at - cy) / (r.y1 - r.y0);
    }
    if (score < best_score) {
      best_score = score;
      best = l;
    }
  }
  return best;
}

struct Leaf {
  Rect rect;
  double target;
};

class GuillotineSplitter {
 public:
  GuillotineSplitter(std::span<const double> sizes, std::vector<RoadLine> roads, std::uint64_t seed)
      : sizes_(sizes.begin(), sizes.end()), roads_(std::move(roads)), rng_(splitmix64(seed)) {
    sorted_ = sizes_;
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::vector<Leaf> run(const Rect& root) {
    std::vector<Leaf> leaves;
    std::vector<Rect> stack{root};
    while (!stack.empty()) {
      const Rect r = stack.back();
      stack.pop_back();
      split(r, stack, leaves);
    }
    return leaves;
  }

 private:
  void split(const Rect& r, std::vector<Rect>& stack, std::vector<Leaf>& leaves) {
    constexpr double tol = kParcelAreaTolerance;
    const double a = r.area();
    if (a < (1 - tol) * sorted_.front()) return;

    if (auto road = road_split(r, roads_)) {
      // Push the second half first so the first half is processed first.
      if (road->vertical) {
        stack.push_back({road->at, r.y0, r.x1, r.y1});
        stack.push_back({r.x0, r.y0, road->at, r.y1});
      } else {
        stack.push_back({r.x0, road->at, r.x1, r.y1});
        stack.push_back({r.x0, r.y0, r.x1, road->at});
      }
      return;
    }

    double target = sizes_[uniform_index(rng_, sizes_.size())];
    if (a < (1 - tol) * target) {
      // Largest size this piece can still satisfy.
      auto it = std::upper_bound(sorted_.begin(), sorted_.end(), a / (1 - tol));
      target = *std::prev(it);
    }
    if (a <= (1 + tol) * target) {
      leaves.push_back({r, target});
      return;
    }
    const long n = std::max(2L, std::lround(a / target));
    const double frac = static_cast<double>(n / 2) / static_cast<double>(n);
    if (r.x1 - r.x0 >= r.y1 - r.y0) {
      const double cut = r.x0 + (r.x1 - r.x0) * frac;
      stack.push_back({cut, r.y0, r.x1, r.y1});
      stack.push_back({r.x0, r.y0, cut, r.y1});
    } else {
      const double cut = r.y0 + (r.y1 - r.y0) * frac;
      stack.push_back({r.x0, cut, r.x1, r.y1});
      stack.push_back({r.x0, r.y0, r.x1, cut});
    }
  }

  std::vector<double> sizes_;
  std::vector<double> sorted_;
  std::vector<RoadLine> roads_;
  Rng rng_;
};

std::string parcel_name(std::string_view subdivision_id, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-P%04zu", index);
  return std::string(subdivision_id) + buf;
}

bool boxes_overlap(const Box& a, const Box& b, double pad = 0.0) {
  return a.min.x <= b.max.x + pad && b.min.x <= a.max.x + pad && a.min.y <= b.max.y + pad &&
         b.min.y <= a.max.y + pad;
}

Box segment_box(const Segment& s, double pad) {
  return {{std::min(s.a.x, s.b.x) - pad, std::min(s.a.y, s.b.y) - pad},
          {std::max(s.a.x, s.b.x) + pad, std::max(s.a.y, s.b.y) + pad}};
}

}  // namespace

std::string_view to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::Road: return "road";
    case EdgeClass::ParticipatingLine: return "ppl";
    case EdgeClass::NonParticipatingLine: return "nppl";
  }
  return "unknown";
}

EdgeClass parse_edge_class(std::string_view text) {
  if (text == "road") return EdgeClass::Road;
  if (text == "ppl") return EdgeClass::ParticipatingLine;
  if (text == "nppl") return EdgeClass::NonParticipatingLine;
  throw ParseError("unknown edge class '" + std::string(text) + "'");
}

double Parcel::area_m2() const { return planar::area(polygon); }

std::vector<Edge> Parcel::edges() const {
  std::vector<Edge> out;
  for (std::size_t k = 0; k < ring_count(); ++k) {
    const Ring& r = ring(k);
    for (std::size_t i = 0; i < r.size(); ++i) {
      out.push_back({{r[i], r[(i + 1) % r.size()]}, edge_classes[k][i]});
    }
  }
  return out;
}

Parcel Parcel::make(std::string parcel_id, std::string subdivision_id, Polygon polygon, EdgeClass uniform) {
  Parcel p;
  p.parcel_id = std::move(parcel_id);
  p.subdivision_id = std::move(subdivision_id);
  planar::normalize(polygon);
  p.polygon = std::move(polygon);
  p.edge_classes.emplace_back(p.polygon.outer.size(), uniform);
  for (const auto& h : p.polygon.holes) p.edge_classes.emplace_back(h.size(), uniform);
  return p;
}

void validate(const Parcel& parcel) {
  const std::string& id = parcel.parcel_id;
  if (parcel.edge_classes.size() != parcel.ring_count()) {
    throw ValidationError("parcel " + id + ": edge class rings do not match polygon rings");
  }
  for (std::size_t k = 0; k < parcel.ring_count(); ++k) {
    const Ring& r = parcel.ring(k);
    if (!planar::is_simple(r)) throw ValidationError("parcel " + id + ": ring is not simple");
    const double a = planar::signed_area(r);
    if (k == 0 && a <= 0) throw ValidationError("parcel " + id + ": outer ring not counterclockwise");
    if (k > 0 && a >= 0) throw ValidationError("parcel " + id + ": hole not clockwise");
    if (parcel.edge_classes[k].size() != r.size()) {
      throw ValidationError("parcel " + id + ": edge class count differs from edge count");
    }
  }
}

std::vector<Parcel> generate_parcels(const Polygon& subdivision, std::string_view subdivision_id,
                                     std::span<const double> size_distribution,
                                     std::span<const Polyline> road_network, std::uint64_t seed) {
  if (size_distribution.empty()) throw ContractViolation("empty parcel size distribution");
  for (double s : size_distribution) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ContractViolation("parcel sizes must be positive and finite");
  }
  if (!planar::is_simple(subdivision.outer)) throw ContractViolation("subdivision polygon is not simple");

  Polygon boundary = subdivision;
  planar::normalize(boundary);
  const double min_size = *std::min_element(size_distribution.begin(), size_distribution.end());
  if (planar::area(boundary) < min_size) return {};

  const Box bb = planar::bounds(boundary);
  GuillotineSplitter splitter(size_distribution, axis_aligned_roads(road_network), seed);
  const auto leaves = splitter.run({bb.min.x, bb.min.y, bb.max.x, bb.max.y});

  std::vector<Parcel> parcels;
  for (const auto& leaf : leaves) {
    const Polygon rect = leaf.rect.polygon();
    const double rect_area = leaf.rect.area();
    auto parts = planar::intersection(rect, boundary, 1e-6);
    if (parts.empty()) continue;
    if (parts.size() == 1 && planar::area(parts[0]) >= rect_area * (1 - 1e-9)) {
      // Fully inside: keep the exact rectangle.
      parcels.push_back(Parcel::make(parcel_name(subdivision_id, parcels.size()), std::string(subdivision_id), rect));
      continue;
    }
    for (auto& part : parts) {
      const double a = planar::area(part);
      if (std::abs(a - leaf.target) > kParcelAreaTolerance * leaf.target) continue;
      if (!part.holes.empty()) continue;
      parcels.push_back(
          Parcel::make(parcel_name(subdivision_id, parcels.size()), std::string(subdivision_id), std::move(part)));
    }
  }
  return parcels;
}

struct ParcelIndex::Impl {
  using BPoint = bg::model::point<double, 2, bg::cs::cartesian>;
  using BBox = bg::model::box<BPoint>;
  using Value = std::pair<BBox, std::size_t>;

  std::vector<const Parcel*> parcels;
  bgi::rtree<Value, bgi::quadratic<16>> tree;
};

ParcelIndex::ParcelIndex(std::span<const Parcel> parcels) : impl_(std::make_unique<Impl>()) {
  std::vector<Impl::Value> values;
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    impl_->parcels.push_back(&parcels[i]);
    const Box b = planar::bounds(parcels[i].polygon);
    values.emplace_back(Impl::BBox({b.min.x, b.min.y}, {b.max.x, b.max.y}), i);
  }
  impl_->tree = decltype(impl_->tree)(values.begin(), values.end());
}

ParcelIndex::~ParcelIndex() = default;
ParcelIndex::ParcelIndex(ParcelIndex&&) noexcept = default;
ParcelIndex& ParcelIndex::operator=(ParcelIndex&&) noexcept = default;

std::vector<const Parcel*> ParcelIndex::query(const Box& box) const {
  std::vector<Impl::Value> hits;
  impl_->tree.query(bgi::intersects(Impl::BBox({box.min.x, box.min.y}, {box.max.x, box.max.y})),
                    std::back_inserter(hits));
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  std::vector<const Parcel*> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(impl_->parcels[h.second]);
  return out;
}

bool is_participating(std::string_view parcel_id, double participation_rate, std::uint64_t seed) {
  Rng rng(derive_seed(seed, parcel_id));
  return unit_uniform(rng) < participation_rate;
}

Parcel classify_edges(const Parcel& parcel, std::span<const Polyline> road_network,
                      const ParcelIndex& neighbor_index, double participation_rate, std::uint64_t seed) {
  if (!(participation_rate >= 0.0 && participation_rate <= 1.0)) {
    throw ContractViolation("participation_rate must lie in [0, 1]");
  }
  std::vector<Segment> road_segments;
  for (const auto& road : road_network) {
    for (std::size_t i = 0; i + 1 < road.size(); ++i) road_segments.push_back({road[i], road[i + 1]});
  }

  Parcel out = parcel;
  for (std::size_t k = 0; k < parcel.ring_count(); ++k) {
    const Ring& r = parcel.ring(k);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Segment seg{r[i], r[(i + 1) % r.size()]};
      const Box seg_box = segment_box(seg, kRoadTolerance_m);

      std::vector<planar::Interval> road_cover;
      for (const auto& rs : road_segments) {
        if (!boxes_overlap(seg_box, segment_box(rs, 0.0))) continue;
        if (auto iv = planar::near_interval(seg, rs, kRoadTolerance_m)) road_cover.push_back(*iv);
      }
      if (!road_cover.empty() && planar::covers_unit(road_cover)) {
        out.edge_classes[k][i] = EdgeClass::Road;
        continue;
      }

      std::vector<planar::Interval> shared_cover;
      for (const Parcel* neighbor : neighbor_index.query(seg_box)) {
        if (neighbor->parcel_id == parcel.parcel_id) continue;
        if (!is_participating(neighbor->parcel_id, participation_rate, seed)) continue;
        for (std::size_t nk = 0; nk < neighbor->ring_count(); ++nk) {
          const Ring& nr = neighbor->ring(nk);
          for (std::size_t j = 0; j < nr.size(); ++j) {
            const Segment ns{nr[j], nr[(j + 1) % nr.size()]};
            if (auto iv = planar::near_interval(seg, ns, kRoadTolerance_m)) shared_cover.push_back(*iv);
          }
        }
      }
      out.edge_classes[k][i] = (!shared_cover.empty() && planar::covers_unit(shared_cover))
                                   ? EdgeClass::ParticipatingLine
                                   : EdgeClass::NonParticipatingLine;
    }
  }
  return out;
}

std::vector<Parcel> classify_all(std::span<const Parcel> parcels, std::span<const Polyline> road_network,
                                 double participation_rate, std::uint64_t seed) {
  const ParcelIndex index(parcels);
  std::vector<Parcel> out;
  out.reserve(parcels.size());
  for (const auto& p : parcels) out.push_back(classify_edges(p, road_network, index, participation_rate, seed));
  return out;
}

std::vector<Parcel> apply_exclusions(std::span<const Parcel> parcels, const ExclusionMask& mask) {
  std::vector<Box> mask_boxes;
  for (const auto& m : mask.polygons) mask_boxes.push_back(planar::bounds(m));

  std::vector<Parcel> out;
  for (const auto& parcel : parcels) {
    const Box pb = planar::bounds(parcel.polygon);
    std::vector<Polygon> relevant;
    for (std::size_t i = 0; i < mask.polygons.size(); ++i) {
      if (boxes_overlap(pb, mask_boxes[i])) relevant.push_back(mask.polygons[i]);
    }
    if (relevant.empty()) {
      out.push_back(parcel);
      continue;
    }
    auto parts = planar::difference({parcel.polygon}, relevant, 1e-6);
    if (parts.size() == 1 && std::abs(planar::area(parts[0]) - parcel.area_m2()) <= 1e-9 * parcel.area_m2()) {
      out.push_back(parcel);  // mask only touches the parcel
      continue;
    }
    std::sort(parts.begin(), parts.end(), [](const Polygon& a, const Polygon& b) {
      const Point ca = planar::centroid(a), cb = planar::centroid(b);
      return ca.x != cb.x ? ca.x < cb.x : ca.y < cb.y;
    });

    const auto original = parcel.edges();
    const Box scale_box = pb;
    const double eps = 1e-7 * (1.0 + std::max({std::abs(scale_box.min.x), std::abs(scale_box.max.x),
                                               std::abs(scale_box.min.y), std::abs(scale_box.max.y)}));
    auto class_of = [&](const Segment& s) {
      for (const auto& e : original) {
        if (planar::distance(s.a, e.segment) <= eps && planar::distance(s.b, e.segment) <= eps) {
          return e.edge_class;
        }
      }
      return EdgeClass::NonParticipatingLine;
    };

    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
      std::string id = parts.size() == 1 ? parcel.parcel_id : parcel.parcel_id + "-" + std::to_string(pi + 1);
      Parcel piece = Parcel::make(std::move(id), parcel.subdivision_id, std::move(parts[pi]));
      for (std::size_t k = 0; k < piece.ring_count(); ++k) {
        const Ring& r = piece.ring(k);
        for (std::size_t i = 0; i < r.size(); ++i) {
          piece.edge_classes[k][i] = class_of({r[i], r[(i + 1) % r.size()]});
        }
      }
      out.push_back(std::move(piece));
    }
  }
  return out;
}

}  // namespace solarzoning::parcels
