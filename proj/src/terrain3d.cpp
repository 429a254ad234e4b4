#include "iabsim/terrain3d.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "iabsim/errors.hpp"

namespace iabsim {

namespace {

constexpr double kEarthRadiusM = 6371008.8;

std::string feature_error(std::size_t index, const std::string& what) {
  std::ostringstream msg;
  msg << "feature " << index << ": " << what;
  return msg.str();
}

}  // namespace

Box2 BuildingPrism::bounds() const {
  Box2 box;
  for (const auto& v : footprint) box.extend(v);
  return box;
}

bool polygon_is_simple(const std::vector<Point2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Segment e{poly[i], poly[(i + 1) % n]};
    if (e.a == e.b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const Segment f{poly[j], poly[(j + 1) % n]};
      if (adjacent) {
        // Neighbouring edges may only share their common vertex: reject folds back.
        const Point2& shared = j == i + 1 ? e.b : e.a;
        const Point2& e_other = j == i + 1 ? e.a : e.b;
        const Point2& f_other = j == i + 1 ? f.b : f.a;
        const Point2 u = e_other - shared;
        const Point2 v = f_other - shared;
        if (std::abs(u.x() * v.y() - u.y() * v.x()) == 0.0 && u.dot(v) > 0.0) return false;
        continue;
      }
      if (segments_intersect(e, f)) return false;
    }
  }
  return true;
}

bool point_in_polygon(const Point2& p, const std::vector<Point2>& poly) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if (segments_intersect({a, b}, {p, p})) return true;
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

void validate_prism(const BuildingPrism& prism) {
  if (prism.footprint.size() < 3) throw ParseError("footprint needs at least 3 vertices");
  if (!(prism.height_m > 0.0)) throw ParseError("building height must be positive");
  if (!polygon_is_simple(prism.footprint)) throw ParseError("footprint is self-intersecting");
}

std::vector<BuildingPrism> parse_buildings(const std::string& text,
                                           std::optional<GeoOrigin> origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("footprint file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw ParseError("footprint file must be a GeoJSON FeatureCollection");
  }

  struct Raw {
    std::vector<Point2> lonlat;
    double height;
  };
  std::vector<Raw> raw;
  const auto& features = doc["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    if (!f.is_object() || !f.contains("geometry") || !f["geometry"].is_object()) {
      throw ParseError(feature_error(i, "missing geometry"));
    }
    const auto& g = f["geometry"];
    if (g.value("type", "") != "Polygon") throw ParseError(feature_error(i, "geometry is not a Polygon"));
    if (!g.contains("coordinates") || !g["coordinates"].is_array() || g["coordinates"].empty()) {
      throw ParseError(feature_error(i, "polygon has no rings"));
    }
    if (!f.contains("properties") || !f["properties"].is_object() ||
        !f["properties"].contains("height") || !f["properties"]["height"].is_number()) {
      throw ParseError(feature_error(i, "missing numeric 'height' property"));
    }
    Raw r;
    r.height = f["properties"]["height"].get<double>();
    for (const auto& c : g["coordinates"][0]) {
      if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
        throw ParseError(feature_error(i, "malformed coordinate"));
      }
      r.lonlat.emplace_back(c[0].get<double>(), c[1].get<double>());
    }
    if (r.lonlat.size() > 1 && r.lonlat.front() == r.lonlat.back()) r.lonlat.pop_back();
    raw.push_back(std::move(r));
  }

  if (!origin) {
    Box2 box;
    for (const auto& r : raw)
      for (const auto& p : r.lonlat) box.extend(p);
    origin = raw.empty() ? GeoOrigin{} : GeoOrigin{box.center().y(), box.center().x()};
  }
  const double deg = std::numbers::pi / 180.0;
  const double cos_lat = std::cos(origin->latitude_deg * deg);

  std::vector<BuildingPrism> prisms;
  prisms.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    BuildingPrism p;
    p.height_m = raw[i].height;
    for (const auto& ll : raw[i].lonlat) {
      p.footprint.emplace_back(kEarthRadiusM * (ll.x() - origin->longitude_deg) * deg * cos_lat,
                               kEarthRadiusM * (ll.y() - origin->latitude_deg) * deg);
    }
    try {
      validate_prism(p);
    } catch (const ParseError& e) {
      throw ParseError(feature_error(i, e.what()));
    }
    prisms.push_back(std::move(p));
  }
  return prisms;
}

std::vector<BuildingPrism> load_buildings(const std::string& path, std::optional<GeoOrigin> origin) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open footprint file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_buildings(buf.str(), origin);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void CityParams::validate() const {
  if (!(density >= 0.0)) throw InvalidParameter("building density must be non-negative");
  if (!(size_min_m > 0.0 && size_max_m >= size_min_m)) {
    throw InvalidParameter("building size range must be positive and ordered");
  }
  if (!(height_min_m > 0.0 && height_max_m >= height_min_m)) {
    throw InvalidParameter("building height range must be positive and ordered");
  }
}

std::vector<BuildingPrism> generate_synthetic_city(const CityParams& params, const Region& region,
                                                   Rng& rng) {
  params.validate();
  const auto centres = sample_fhppp(params.density, region, rng);
  std::uniform_real_distribution<double> size(params.size_min_m, params.size_max_m);
  std::uniform_real_distribution<double> height(params.height_min_m, params.height_max_m);
  std::vector<BuildingPrism> city;
  city.reserve(centres.size());
  for (const auto& c : centres) {
    const double hw = 0.5 * size(rng);
    const double hd = 0.5 * size(rng);
    BuildingPrism p;
    p.footprint = {c + Point2(-hw, -hd), c + Point2(hw, -hd), c + Point2(hw, hd),
                   c + Point2(-hw, hd)};
    p.height_m = height(rng);
    city.push_back(std::move(p));
  }
  return city;
}

// The set of points of the segment whose ground projection lies in the
// footprint is a union of intervals; each interval ends at a segment endpoint
// or at a footprint edge crossing. z is linear along the segment, so its
// minimum over any interval sits at one of those ends.
bool segment_hits_prism(const Point3& a, const Point3& b, const BuildingPrism& prism) {
  const double h = prism.height_m;
  if (std::min(a.z(), b.z()) > h) return false;
  const Point2 a2 = a.head<2>();
  const Point2 b2 = b.head<2>();
  const auto z_at = [&](double t) { return a.z() + t * (b.z() - a.z()); };

  if (a.z() <= h && point_in_polygon(a2, prism.footprint)) return true;
  if (b.z() <= h && point_in_polygon(b2, prism.footprint)) return true;

  const Segment link{a2, b2};
  const auto& poly = prism.footprint;
  const Point2 d = b2 - a2;
  const double len2 = d.squaredNorm();
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Segment edge{poly[i], poly[(i + 1) % n]};
    if (!segments_intersect(link, edge)) continue;
    if (len2 == 0.0) return true;  // vertical link on the wall; endpoints' z bracket h
    const Point2 e = edge.b - edge.a;
    const double denom = d.x() * e.y() - d.y() * e.x();
    if (denom == 0.0) {
      // Collinear overlap with the edge: check both overlap ends.
      const double ta = std::clamp((edge.a - a2).dot(d) / len2, 0.0, 1.0);
      const double tb = std::clamp((edge.b - a2).dot(d) / len2, 0.0, 1.0);
      if (z_at(ta) <= h || z_at(tb) <= h) return true;
      continue;
    }
    if (z_at(intersection_parameter(link, edge)) <= h) return true;
  }
  return false;
}

bool los_3d(const Point3& tx, const Point3& rx, const std::vector<BuildingPrism>& prisms) {
  if (tx == rx) throw DegenerateLink("link endpoints coincide");
  for (const auto& p : prisms) {
    if (segment_hits_prism(tx, rx, p)) return false;
  }
  return true;
}

PrismIndex::PrismIndex(std::vector<BuildingPrism> prisms, const Region& region, double cell_size_m)
    : prisms_(std::move(prisms)) {
  if (prisms_.empty()) return;
  Box2 bounds(region.center - Point2::Constant(region.radius_m),
              region.center + Point2::Constant(region.radius_m));
  for (const auto& p : prisms_) bounds.extend(p.bounds());
  grid_ = GridIndex(bounds, cell_size_m);
  for (int i = 0; i < static_cast<int>(prisms_.size()); ++i) grid_.insert(i, prisms_[i].bounds());
}

bool PrismIndex::los(const Point3& tx, const Point3& rx) const {
  if (tx == rx) throw DegenerateLink("link endpoints coincide");
  const Point2 a = tx.head<2>();
  const Point2 b = rx.head<2>();
  if (a == b) {
    // Vertical link: only the prisms under that point matter.
    for (const auto& p : prisms_) {
      if (segment_hits_prism(tx, rx, p)) return false;
    }
    return true;
  }
  return grid_.walk(a, b, [&](std::span<const int> ids) {
    for (int id : ids) {
      if (segment_hits_prism(tx, rx, prisms_[id])) return false;
    }
    return true;
  });
}

}  // namespace iabsim
