#include "iabsim/grid_index.hpp"

#include <algorithm>
#include <cmath>

namespace iabsim {

namespace {
constexpr double kInflate = 1e-6;
}

GridIndex::GridIndex(const Box2& bounds, double cell_size_m) : bounds_(bounds), cell_(cell_size_m) {
  const Point2 extent = bounds_.sizes();
  nx_ = std::max(1, static_cast<int>(std::ceil(extent.x() / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(extent.y() / cell_)));
  cells_.resize(static_cast<std::size_t>(nx_) * ny_);
}

int GridIndex::cell_x(double x) const {
  return std::clamp(static_cast<int>(std::floor((x - bounds_.min().x()) / cell_)), 0, nx_ - 1);
}

int GridIndex::cell_y(double y) const {
  return std::clamp(static_cast<int>(std::floor((y - bounds_.min().y()) / cell_)), 0, ny_ - 1);
}

void GridIndex::insert(int id, const Box2& box) {
  const int x0 = cell_x(box.min().x() - kInflate), x1 = cell_x(box.max().x() + kInflate);
  const int y0 = cell_y(box.min().y() - kInflate), y1 = cell_y(box.max().y() + kInflate);
  for (int iy = y0; iy <= y1; ++iy) {
    for (int ix = x0; ix <= x1; ++ix) cells_[iy * nx_ + ix].push_back(id);
  }
}

// Liang-Barsky clip of a->b against the grid bounds.
bool GridIndex::clip(Point2& a, Point2& b) const {
  const Point2 d = b - a;
  double t0 = 0.0, t1 = 1.0;
  const double p[4] = {-d.x(), d.x(), -d.y(), d.y()};
  const double q[4] = {a.x() - bounds_.min().x(), bounds_.max().x() - a.x(),
                       a.y() - bounds_.min().y(), bounds_.max().y() - a.y()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return false;
  }
  const Point2 a0 = a;
  a = a0 + t0 * d;
  b = a0 + t1 * d;
  return true;
}

SegmentIndex::SegmentIndex(std::vector<Segment> segments, const Region& region, double cell_size_m)
    : segments_(std::move(segments)) {
  if (segments_.empty()) return;
  Box2 bounds(region.center - Point2::Constant(region.radius_m),
              region.center + Point2::Constant(region.radius_m));
  for (const auto& s : segments_) {
    bounds.extend(s.a);
    bounds.extend(s.b);
  }
  grid_ = GridIndex(bounds, cell_size_m);
  for (int i = 0; i < static_cast<int>(segments_.size()); ++i) {
    Box2 box(segments_[i].a);
    box.extend(segments_[i].b);
    grid_.insert(i, box);
  }
}

bool SegmentIndex::blocks(const Point2& a, const Point2& b) const {
  const Segment link{a, b};
  return !grid_.walk(a, b, [&](std::span<const int> ids) {
    for (int id : ids) {
      if (segments_intersect(link, segments_[id])) return false;
    }
    return true;
  });
}

std::vector<int> SegmentIndex::crossings(const Point2& a, const Point2& b) const {
  const Segment link{a, b};
  std::vector<int> hits;
  grid_.walk(a, b, [&](std::span<const int> ids) {
    for (int id : ids) {
      if (std::find(hits.begin(), hits.end(), id) == hits.end() &&
          segments_intersect(link, segments_[id])) {
        hits.push_back(id);
      }
    }
    return true;
  });
  return hits;
}

}  // namespace iabsim
