#include "solarzoning/geojson.hpp"

#include <fstream>
#include <ostream>

#include "json.hpp"
#include "solarzoning/errors.hpp"
#include "solarzoning/planar.hpp"

namespace solarzoning::geojson {
namespace {

using Json = nlohmann::ordered_json;

Json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    Json j = Json::parse(in);
    if (!j.is_object() || j.value("type", "") != "FeatureCollection" || !j.contains("features") ||
        !j["features"].is_array()) {
      throw ParseError(path + ": expected a GeoJSON FeatureCollection");
    }
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Point to_point(const Json& c, const std::string& where) {
  if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
    throw ParseError(where + ": bad coordinate");
  }
  return {c[0].get<double>(), c[1].get<double>()};
}

Polyline to_line(const Json& coords, const std::string& where) {
  if (!coords.is_array()) throw ParseError(where + ": coordinates must be an array");
  Polyline line;
  for (const auto& c : coords) line.push_back(to_point(c, where));
  return line;
}

Ring to_ring(const Json& coords, const std::string& where) {
  Ring ring = to_line(coords, where);
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) throw ParseError(where + ": polygon ring needs at least 3 distinct vertices");
  return ring;
}

Polygon to_polygon(const Json& rings, const std::string& where) {
  if (!rings.is_array() || rings.empty()) throw ParseError(where + ": polygon needs an outer ring");
  Polygon p;
  p.outer = to_ring(rings[0], where);
  for (std::size_t k = 1; k < rings.size(); ++k) p.holes.push_back(to_ring(rings[k], where));
  planar::normalize(p);
  return p;
}

std::vector<Polygon> polygons_of(const Json& geometry, const std::string& where) {
  const std::string type = geometry.value("type", "");
  if (type == "Polygon") return {to_polygon(geometry.at("coordinates"), where)};
  if (type == "MultiPolygon") {
    std::vector<Polygon> out;
    for (const auto& p : geometry.at("coordinates")) out.push_back(to_polygon(p, where));
    return out;
  }
  throw ParseError(where + ": expected Polygon or MultiPolygon geometry, found '" + type + "'");
}

Json coords(Point p) { return Json::array({p.x, p.y}); }

Json ring_coords(const Ring& ring) {
  Json a = Json::array();
  for (const auto& p : ring) a.push_back(coords(p));
  if (!ring.empty()) a.push_back(coords(ring.front()));
  return a;
}

Json polygon_coords(const Polygon& p) {
  Json a = Json::array({ring_coords(p.outer)});
  for (const auto& h : p.holes) a.push_back(ring_coords(h));
  return a;
}

std::string string_property(const Json& feature, const std::string& key, const std::string& where) {
  const Json& props = feature.contains("properties") ? feature["properties"] : Json();
  if (!props.is_object() || !props.contains(key)) throw ParseError(where + ": missing property '" + key + "'");
  const Json& v = props[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(where + ": property '" + key + "' must be a string");
}

void dump(std::ostream& out, const Json& features) {
  Json fc = {{"type", "FeatureCollection"}, {"features", features}};
  out << fc.dump() << '\n';
}

Json feature(Json properties, Json geometry) {
  return {{"type", "Feature"}, {"properties", std::move(properties)}, {"geometry", std::move(geometry)}};
}

}  // namespace

std::vector<Subdivision> read_subdivisions(const std::string& path) {
  const Json j = load(path);
  std::vector<Subdivision> out;
  std::size_t k = 0;
  for (const auto& f : j["features"]) {
    const std::string where = path + " feature " + std::to_string(k++);
    auto polys = polygons_of(f.at("geometry"), where);
    if (polys.size() != 1) throw ParseError(where + ": a subdivision must be a single polygon");
    out.push_back({string_property(f, "subdivision_id", where), string_property(f, "region_id", where), polys[0]});
  }
  return out;
}

void write_subdivisions(std::ostream& out, std::span<const Subdivision> subdivisions) {
  Json features = Json::array();
  for (const auto& s : subdivisions) {
    features.push_back(feature({{"subdivision_id", s.subdivision_id}, {"region_id", s.region_id}},
                               {{"type", "Polygon"}, {"coordinates", polygon_coords(s.polygon)}}));
  }
  dump(out, features);
}

std::vector<NamedPolyline> read_polylines(const std::string& path, const std::string& id_property) {
  const Json j = load(path);
  std::vector<NamedPolyline> out;
  std::size_t k = 0;
  for (const auto& f : j["features"]) {
    const std::string where = path + " feature " + std::to_string(k++);
    const std::string id = string_property(f, id_property, where);
    const Json& g = f.at("geometry");
    const std::string type = g.value("type", "");
    if (type == "LineString") {
      out.push_back({id, to_line(g.at("coordinates"), where)});
    } else if (type == "MultiLineString") {
      std::size_t part = 0;
      for (const auto& c : g.at("coordinates")) out.push_back({id + ":" + std::to_string(part++), to_line(c, where)});
    } else {
      throw ParseError(where + ": expected LineString geometry, found '" + type + "'");
    }
    if (out.back().polyline.size() < 2) throw ParseError(where + ": a line needs at least 2 points");
  }
  return out;
}

void write_polylines(std::ostream& out, std::span<const NamedPolyline> lines, const std::string& id_property) {
  Json features = Json::array();
  for (const auto& l : lines) {
    Json c = Json::array();
    for (const auto& p : l.polyline) c.push_back(coords(p));
    features.push_back(feature({{id_property, l.id}}, {{"type", "LineString"}, {"coordinates", c}}));
  }
  dump(out, features);
}

std::vector<Polygon> read_polygons(const std::string& path) {
  const Json j = load(path);
  std::vector<Polygon> out;
  std::size_t k = 0;
  for (const auto& f : j["features"]) {
    auto polys = polygons_of(f.at("geometry"), path + " feature " + std::to_string(k++));
    out.insert(out.end(), polys.begin(), polys.end());
  }
  return out;
}

void write_polygons(std::ostream& out, std::span<const Polygon> polygons) {
  Json features = Json::array();
  for (const auto& p : polygons) {
    features.push_back(feature(Json::object(), {{"type", "Polygon"}, {"coordinates", polygon_coords(p)}}));
  }
  dump(out, features);
}

void write_parcels(std::ostream& out, std::span<const parcels::Parcel> parcels) {
  Json features = Json::array();
  for (const auto& p : parcels) {
    Json classes = Json::array();
    for (const auto& ring : p.edge_classes) {
      Json r = Json::array();
      for (auto c : ring) r.push_back(std::string(parcels::to_string(c)));
      classes.push_back(r);
    }
    features.push_back(feature({{"parcel_id", p.parcel_id}, {"subdivision_id", p.subdivision_id},
                                {"area_m2", p.area_m2()}, {"edge_classes", classes}},
                               {{"type", "Polygon"}, {"coordinates", polygon_coords(p.polygon)}}));
  }
  dump(out, features);
}

std::vector<parcels::Parcel> read_parcels(const std::string& path) {
  const Json j = load(path);
  std::vector<parcels::Parcel> out;
  std::size_t k = 0;
  for (const auto& f : j["features"]) {
    const std::string where = path + " feature " + std::to_string(k++);
    auto polys = polygons_of(f.at("geometry"), where);
    if (polys.size() != 1) throw ParseError(where + ": a parcel must be a single polygon");
    parcels::Parcel p = parcels::Parcel::make(string_property(f, "parcel_id", where),
                                              string_property(f, "subdivision_id", where), polys[0]);
    const Json& props = f["properties"];
    if (props.contains("edge_classes")) {
      // Classes follow the file's vertex order, so the rings must already
      // be oriented the way normalize() leaves them.
      const Json& rings = f.at("geometry").at("coordinates");
      for (std::size_t r = 0; r < p.ring_count(); ++r) {
        if (to_ring(rings[r], where) != p.ring(r)) {
          throw ParseError(where + ": edge classes need a counterclockwise outer ring and clockwise holes");
        }
      }
      const Json& classes = props["edge_classes"];
      if (!classes.is_array() || classes.size() != p.ring_count()) throw ParseError(where + ": edge_classes per ring");
      for (std::size_t r = 0; r < p.ring_count(); ++r) {
        if (!classes[r].is_array() || classes[r].size() != p.ring(r).size()) {
          throw ParseError(where + ": edge_classes length must match ring " + std::to_string(r));
        }
        for (std::size_t e = 0; e < classes[r].size(); ++e) {
          try {
            p.edge_classes[r][e] = parcels::parse_edge_class(classes[r][e].get<std::string>());
          } catch (const std::exception& ex) {
            throw ParseError(where + ": " + ex.what());
          }
        }
      }
    }
    parcels::validate(p);
    out.push_back(std::move(p));
  }
  return out;
}

void write_developable(std::ostream& out, std::span<const geometry::DevelopableArea> areas) {
  Json features = Json::array();
  for (const auto& a : areas) {
    Json polys = Json::array();
    for (const auto& p : a.polygon_parts) polys.push_back(polygon_coords(p));
    features.push_back(feature({{"parcel_id", a.parcel_id}, {"area_m2", a.area_m2},
                                {"limiting_rule", std::string(geometry::to_string(a.limiting_rule))}},
                               {{"type", "MultiPolygon"}, {"coordinates", polys}}));
  }
  dump(out, features);
}

}  // namespace solarzoning::geojson
