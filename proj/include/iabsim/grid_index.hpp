#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "iabsim/geometry.hpp"

namespace iabsim {

using Box2 = Eigen::AlignedBox2d;

/// Uniform bucket grid over axis-aligned boxes. Items are stored by id in every
/// cell their (slightly inflated) bounding box touches; queries walk the cells
/// crossed by a segment. Read-only after construction, so queries may run
/// concurrently.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(const Box2& bounds, double cell_size_m);

  void insert(int id, const Box2& box);

  /// Calls `visit(std::span<const int>)` for every non-empty cell the segment
  /// a->b passes through, in order from a to b. Stops early when `visit`
  /// returns false. Returns false iff stopped early.
  template <class Visit>
  bool walk(const Point2& a, const Point2& b, Visit&& visit) const;

  bool empty() const { return cells_.empty(); }

 private:
  int cell_x(double x) const;
  int cell_y(double y) const;
  const std::vector<int>& cell(int ix, int iy) const { return cells_[iy * nx_ + ix]; }
  bool clip(Point2& a, Point2& b) const;

  Box2 bounds_;
  double cell_ = 1.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::vector<int>> cells_;
};

/// Segment obstacles (walls, tree lines) with a grid for fast link queries.
class SegmentIndex {
 public:
  SegmentIndex() = default;
  SegmentIndex(std::vector<Segment> segments, const Region& region, double cell_size_m = 25.0);

  std::size_t size() const { return segments_.size(); }
  const Segment& segment(int id) const { return segments_[id]; }

  bool blocks(const Point2& a, const Point2& b) const;

  /// Ids of all segments crossed by a->b, each once.
  std::vector<int> crossings(const Point2& a, const Point2& b) const;

 private:
  std::vector<Segment> segments_;
  GridIndex grid_;
};

template <class Visit>
bool GridIndex::walk(const Point2& a_in, const Point2& b_in, Visit&& visit) const {
  if (cells_.empty()) return true;
  Point2 a = a_in;
  Point2 b = b_in;
  if (!clip(a, b)) return true;

  int ix = cell_x(a.x());
  int iy = cell_y(a.y());
  const int ex = cell_x(b.x());
  const int ey = cell_y(b.y());
  const Point2 d = b - a;
  const double inf = std::numeric_limits<double>::infinity();
  const int sx = d.x() > 0 ? 1 : (d.x() < 0 ? -1 : 0);
  const int sy = d.y() > 0 ? 1 : (d.y() < 0 ? -1 : 0);
  const double x0 = bounds_.min().x();
  const double y0 = bounds_.min().y();
  double tmax_x = sx == 0 ? inf : ((ix + (sx > 0)) * cell_ + x0 - a.x()) / d.x();
  double tmax_y = sy == 0 ? inf : ((iy + (sy > 0)) * cell_ + y0 - a.y()) / d.y();
  const double tdelta_x = sx == 0 ? inf : cell_ / std::abs(d.x());
  const double tdelta_y = sy == 0 ? inf : cell_ / std::abs(d.y());

  bool visited_end = false;
  for (int guard = nx_ + ny_ + 2; guard > 0; --guard) {
    if (const auto& ids = cell(ix, iy); !ids.empty()) {
      if (!visit(std::span<const int>(ids))) return false;
    }
    if (ix == ex && iy == ey) {
      visited_end = true;
      break;
    }
    if (std::min(tmax_x, tmax_y) > 1.0) break;
    if (tmax_x < tmax_y) {
      ix += sx;
      tmax_x += tdelta_x;
    } else {
      iy += sy;
      tmax_y += tdelta_y;
    }
    if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) break;
  }
  // Rounding can leave the walk one cell short of the end point.
  if (!visited_end) {
    if (const auto& ids = cell(ex, ey); !ids.empty()) {
      if (!visit(std::span<const int>(ids))) return false;
    }
  }
  return true;
}

}  // namespace iabsim
