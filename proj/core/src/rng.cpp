#include "simmatch/rng.hpp"

#include <cmath>
#include <numbers>

namespace simmatch {

double SeededRng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double low, double high) {
  return low + (high - low) * uniform01();
}

double SeededRng::gaussian() {
  if (cached_gaussian_) {
    const double z = *cached_gaussian_;
    cached_gaussian_.reset();
    return z;
  }
  // 1 - u lies in (0, 1], keeping log() finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_gaussian_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

}  // namespace simmatch
