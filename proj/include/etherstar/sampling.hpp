#pragma once

#include <cstdint>
#include <random>

#include "etherstar/geometry.hpp"

namespace etherstar {

/// Seeded source of random points, tangent vectors and triples on a model.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi);
  /// Flat: uniform in [-scale, scale]^{2n}. Sphere: uniform on S^2.
  Point point(const ManifoldModel& m, double scale = 1.0);
  /// Within distance `radius` of c (geodesic on the sphere, sup-norm flat).
  Point near(const ManifoldModel& m, const Point& c, double radius);
  /// Tangent vector at x with length in [0.1, 1] * scale.
  Vec tangent(const ManifoldModel& m, const Point& x, double scale);
  struct Triple {
    Point x, y, z;
  };
  /// Flat: three points of point(m, scale). Sphere: three points near a common centre.
  Triple triple(const ManifoldModel& m, double scale = 1.0);

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace etherstar
