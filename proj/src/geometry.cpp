#include "mobiq/geometry.hpp"

#include <stdexcept>

namespace mobiq {

WorldGeometry::WorldGeometry(double side_length) : side_(side_length), half_(side_length / 2.0) {
  if (!(side_length > 0.0) || !std::isfinite(side_length)) {
    throw std::invalid_argument("side length must be positive and finite");
  }
}

double WorldGeometry::wrap(double coord) const {
  double r = std::fmod(coord, side_);
  if (r < 0.0) r += side_;
  // -tiny + L can round up to exactly L.
  if (r >= side_) r = 0.0;
  return r;
}

}  // namespace mobiq
