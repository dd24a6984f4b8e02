#pragma once

#include <algorithm>
#include <cmath>

namespace mobiq {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// An L x L square with periodic boundaries. Stored coordinates live in [0, L).
class WorldGeometry {
 public:
  explicit WorldGeometry(double side_length);

  double side_length() const { return side_; }

  /// Maps any real coordinate onto [0, L).
  double wrap(double coord) const;
  Point wrap(Point p) const { return {wrap(p.x), wrap(p.y)}; }

  /// Per-axis minimum-image separation, in [0, L/2].
  double axis_separation(double a, double b) const {
    const double d = std::abs(a - b);
    return std::min(d, side_ - d);
  }

 private:
  double side_;
  double half_;
};

/// Squared minimum-image distance. Neighbour tests and routing ranks use this
/// form so both compare identical values.
inline double toroidal_distance_sq(Point p, Point q, const WorldGeometry& geom) {
  const double dx = geom.axis_separation(p.x, q.x);
  const double dy = geom.axis_separation(p.y, q.y);
  return dx * dx + dy * dy;
}

inline double toroidal_distance(Point p, Point q, const WorldGeometry& geom) {
  return std::sqrt(toroidal_distance_sq(p, q, geom));
}

/// Two points can exchange packets only when strictly closer than `radius`.
inline bool in_contact(Point p, Point q, const WorldGeometry& geom, double radius) {
  return toroidal_distance(p, q, geom) < radius;
}

/// Same predicate as in_contact, deciding from the squared distance and
/// taking the square root only within a relative 1e-12 band of the boundary.
inline bool in_contact_sq(double d2, double radius) {
  const double r2 = radius * radius;
  if (d2 < r2 * (1.0 - 1e-12)) return true;
  if (d2 > r2 * (1.0 + 1e-12)) return false;
  return std::sqrt(d2) < radius;
}

}  // namespace mobiq
