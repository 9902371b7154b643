#pragma once

#include <cmath>
#include <random>

#include "etherstar/geometry.hpp"

namespace testsupport {

using etherstar::Point;
using etherstar::Vec;

inline Point random_flat(std::mt19937_64& rng, int n = 1, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(2 * n);
  for (int i = 0; i < 2 * n; ++i) v(i) = u(rng);
  return Point{v};
}

inline Point random_sphere(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(3);
  for (int i = 0; i < 3; ++i) v(i) = g(rng);
  return Point{v.normalized()};
}

/// Random point within geodesic distance `radius` of c.
inline Point sphere_near(std::mt19937_64& rng, const Point& c, double radius) {
  std::normal_distribution<double> g;
  Vec v(3);
  for (int i = 0; i < 3; ++i) v(i) = g(rng);
  v -= v.dot(c.coords) * c.coords;
  std::uniform_real_distribution<double> u(0.0, radius);
  const double t = u(rng);
  return Point{std::cos(t) * c.coords + std::sin(t) * v.normalized()};
}

inline Point p2(double q, double p) { return Point{Vec{{q, p}}}; }
inline Point p3(double a, double b, double c) { return Point{Vec{{a, b, c}}.normalized()}; }

/// Rodrigues rotation of w about unit axis k by angle t.
inline Vec rotate(const Vec& w, const Vec& k, double t) {
  return std::cos(t) * w + std::sin(t) * etherstar::cross3(k, w) + (1 - std::cos(t)) * k.dot(w) * k;
}

}  // namespace testsupport
