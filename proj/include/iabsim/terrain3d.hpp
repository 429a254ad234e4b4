#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iabsim/geometry.hpp"
#include "iabsim/grid_index.hpp"

namespace iabsim {

/// Building extruded from ground level to `height_m`.
struct BuildingPrism {
  std::vector<Point2> footprint;  // simple polygon, no repeated closing vertex
  double height_m = 0.0;

  Box2 bounds() const;
};

/// Throws ParseError when the polygon has < 3 vertices, is self-intersecting,
/// or the height is not positive.
void validate_prism(const BuildingPrism& prism);

bool polygon_is_simple(const std::vector<Point2>& polygon);

/// Closed point-in-polygon test (boundary counts as inside).
bool point_in_polygon(const Point2& p, const std::vector<Point2>& polygon);

struct GeoOrigin {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
};

/// Reads a GeoJSON FeatureCollection of Polygon features, each with a numeric
/// `height` property (meters), coordinates in WGS84 [lon, lat] degrees. Only the
/// outer ring of each polygon is used. Footprints are projected to local meters
/// around `origin` (equirectangular); without an origin, the centre of the
/// footprints' bounding box is used.
std::vector<BuildingPrism> load_buildings(const std::string& path,
                                          std::optional<GeoOrigin> origin = std::nullopt);

/// Same as load_buildings() but from an in-memory document.
std::vector<BuildingPrism> parse_buildings(const std::string& geojson,
                                           std::optional<GeoOrigin> origin = std::nullopt);

struct CityParams {
  double density = 300.0;  // buildings per km^2
  double size_min_m = 10.0;
  double size_max_m = 30.0;
  double height_min_m = 5.0;
  double height_max_m = 20.0;

  void validate() const;
};

/// Axis-aligned rectangular buildings with FHPPP centres and uniform sizes and heights.
std::vector<BuildingPrism> generate_synthetic_city(const CityParams& params, const Region& region,
                                                   Rng& rng);

/// True iff the closed 3D segment touches the closed prism.
bool segment_hits_prism(const Point3& a, const Point3& b, const BuildingPrism& prism);

/// Linear scan: true iff the segment tx->rx clears every prism.
bool los_3d(const Point3& tx, const Point3& rx, const std::vector<BuildingPrism>& prisms);

/// Prisms behind a grid for repeated LOS queries.
class PrismIndex {
 public:
  PrismIndex() = default;
  PrismIndex(std::vector<BuildingPrism> prisms, const Region& region, double cell_size_m = 25.0);

  bool los(const Point3& tx, const Point3& rx) const;
  const std::vector<BuildingPrism>& prisms() const { return prisms_; }

 private:
  std::vector<BuildingPrism> prisms_;
  GridIndex grid_;
};

}  // namespace iabsim
