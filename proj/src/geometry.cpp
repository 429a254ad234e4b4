#include "iabsim/geometry.hpp"

#include <cmath>
#include <numbers>

#include "iabsim/errors.hpp"

namespace iabsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// p is known to be collinear with [a, b].
bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

void require_density(double density) {
  if (!(density >= 0.0) || !std::isfinite(density)) {
    throw InvalidParameter("density must be a finite non-negative number");
  }
}

}  // namespace

double Region::area_km2() const { return std::numbers::pi * radius_m * radius_m * 1e-6; }

bool Region::contains(const Point2& p) const {
  return (p - center).norm() <= radius_m * (1.0 + 1e-12);
}

Segment OrientedSegment::endpoints() const {
  const Point2 half = 0.5 * length_m * Point2(std::cos(orientation_rad), std::sin(orientation_rad));
  return {midpoint - half, midpoint + half};
}

std::vector<Point2> sample_fhppp(double density, const Region& region, Rng& rng) {
  require_density(density);
  if (region.radius_m <= 0.0) throw InvalidParameter("region radius must be positive");
  const double mean = density * region.area_km2();
  if (mean <= 0.0) return {};
  const auto count = std::poisson_distribution<std::int64_t>(mean)(rng);
  return sample_uniform_points(static_cast<std::size_t>(count), region, rng);
}

std::vector<Point2> sample_uniform_points(std::size_t count, const Region& region, Rng& rng) {
  if (region.radius_m <= 0.0) throw InvalidParameter("region radius must be positive");
  std::vector<Point2> points;
  points.reserve(count);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = region.radius_m * std::sqrt(unit(rng));
    const double phi = kTwoPi * unit(rng);
    points.emplace_back(region.center + r * Point2(std::cos(phi), std::sin(phi)));
  }
  return points;
}

std::vector<OrientedSegment> sample_segments(double density, double length_m,
                                             const Region& region, Rng& rng) {
  require_density(density);
  if (!(length_m >= 0.0)) throw InvalidParameter("segment length must be non-negative");
  const auto germs = sample_fhppp(density, region, rng);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::vector<OrientedSegment> out;
  out.reserve(germs.size());
  for (const auto& g : germs) out.push_back({g, length_m, angle(rng)});
  return out;
}

WallSet sample_walls(double density, double length_m, const Region& region, Rng& rng) {
  return {sample_segments(density, length_m, region, rng)};
}

TreeLineSet sample_tree_lines(double density, double length_m, double in_leaf_probability,
                              const Region& region, Rng& rng) {
  if (!(in_leaf_probability >= 0.0 && in_leaf_probability <= 1.0)) {
    throw InvalidParameter("in-leaf probability must lie in [0, 1]");
  }
  TreeLineSet trees;
  trees.segments = sample_segments(density, length_m, region, rng);
  std::bernoulli_distribution leaf(in_leaf_probability);
  trees.in_leaf.reserve(trees.segments.size());
  for (std::size_t i = 0; i < trees.segments.size(); ++i) trees.in_leaf.push_back(leaf(rng));
  return trees;
}

NodeSet make_node_set(NodeKind kind, std::vector<Point2> positions, double height_m) {
  NodeSet set;
  set.kind = kind;
  set.heights.assign(positions.size(), height_m);
  set.positions = std::move(positions);
  return set;
}

bool segments_intersect(const Segment& s, const Segment& t) {
  const double d1 = cross(t.a, t.b, s.a);
  const double d2 = cross(t.a, t.b, s.b);
  const double d3 = cross(s.a, s.b, t.a);
  const double d4 = cross(s.a, s.b, t.b);
  const int o1 = sign(d1), o2 = sign(d2), o3 = sign(d3), o4 = sign(d4);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o2 == 0 && on_segment(t.a, t.b, s.b)) return true;
  if (o3 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o4 == 0 && on_segment(s.a, s.b, t.b)) return true;
  return false;
}

double intersection_parameter(const Segment& link, const Segment& other) {
  if (!segments_intersect(link, other)) return -1.0;
  const Point2 d = link.b - link.a;
  const Point2 e = other.b - other.a;
  const double denom = d.x() * e.y() - d.y() * e.x();
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return 0.0;
  if (denom != 0.0) {
    const Point2 w = other.a - link.a;
    const double t = (w.x() * e.y() - w.y() * e.x()) / denom;
    return std::clamp(t, 0.0, 1.0);
  }
  // Collinear overlap: earliest overlapping point along the link.
  const double ta = (other.a - link.a).dot(d) / len2;
  const double tb = (other.b - link.a).dot(d) / len2;
  return std::clamp(std::min(ta, tb), 0.0, 1.0);
}

bool link_is_los(const Point2& tx, const Point2& rx, const WallSet& walls) {
  if (tx == rx) throw DegenerateLink("link endpoints coincide");
  const Segment link{tx, rx};
  for (const auto& w : walls.segments) {
    if (segments_intersect(link, w.endpoints())) return false;
  }
  return true;
}

std::vector<bool> foliage_crossings(const Point2& tx, const Point2& rx, const TreeLineSet& trees) {
  if (tx == rx) throw DegenerateLink("link endpoints coincide");
  const Segment link{tx, rx};
  std::vector<bool> out;
  for (std::size_t i = 0; i < trees.segments.size(); ++i) {
    if (segments_intersect(link, trees.segments[i].endpoints())) out.push_back(trees.in_leaf[i]);
  }
  return out;
}

}  // namespace iabsim
