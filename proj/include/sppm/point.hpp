#pragma once

#include <cmath>

namespace sppm {

/// A location in the plane. Layout is two packed doubles so spans of points
/// can be loaded directly into vector registers.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace sppm
