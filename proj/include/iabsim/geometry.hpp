#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace iabsim {

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

/// Random stream used throughout the simulator. Every worker owns its own.
using Rng = std::mt19937_64;

/// Disk on which all point processes are restricted.
struct Region {
  Point2 center = Point2::Zero();
  double radius_m = 1000.0;

  double area_km2() const;
  bool contains(const Point2& p) const;
};

enum class NodeKind { Mbs, Sbs, Ue };

struct NodeSet {
  NodeKind kind = NodeKind::Ue;
  std::vector<Point2> positions;
  std::vector<double> heights;

  std::size_t size() const { return positions.size(); }
  Point3 position3(std::size_t i) const {
    return {positions[i].x(), positions[i].y(), heights[i]};
  }
};

/// Closed 2D line segment.
struct Segment {
  Point2 a;
  Point2 b;
};

/// Segment described by its germ (midpoint), length and orientation.
struct OrientedSegment {
  Point2 midpoint;
  double length_m = 0.0;
  double orientation_rad = 0.0;

  Segment endpoints() const;
};

struct WallSet {
  std::vector<OrientedSegment> segments;
};

struct TreeLineSet {
  std::vector<OrientedSegment> segments;
  std::vector<bool> in_leaf;  // parallel to segments
};

/// Draws a finite homogeneous Poisson point process on `region`.
/// `density` is in nodes per km^2.
std::vector<Point2> sample_fhppp(double density, const Region& region, Rng& rng);

/// Exactly `count` points, uniform on the disk.
std::vector<Point2> sample_uniform_points(std::size_t count, const Region& region, Rng& rng);

/// Germ-grain segments: FHPPP midpoints, fixed length, IID uniform orientation.
std::vector<OrientedSegment> sample_segments(double density, double length_m,
                                             const Region& region, Rng& rng);

WallSet sample_walls(double density, double length_m, const Region& region, Rng& rng);

/// Tree lines; each one is independently in-leaf with probability `in_leaf_probability`.
TreeLineSet sample_tree_lines(double density, double length_m, double in_leaf_probability,
                              const Region& region, Rng& rng);

NodeSet make_node_set(NodeKind kind, std::vector<Point2> positions, double height_m);

/// True iff the closed segments share at least one point.
bool segments_intersect(const Segment& a, const Segment& b);

/// Parameter t in [0, 1] along `link` of the first point shared with `other`,
/// or a negative value when they do not meet.
double intersection_parameter(const Segment& link, const Segment& other);

/// Linear scan over `walls`.
bool link_is_los(const Point2& tx, const Point2& rx, const WallSet& walls);

/// One in-leaf flag per tree line crossed by the link.
std::vector<bool> foliage_crossings(const Point2& tx, const Point2& rx,
                                    const TreeLineSet& trees);

}  // namespace iabsim
