#include "etherstar/sampling.hpp"

#include <cmath>

namespace etherstar {

double Sampler::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

Point Sampler::point(const ManifoldModel& m, double scale) {
  Vec v(m.ambient_dim());
  if (m.kind() == ModelKind::flat) {
    for (int i = 0; i < v.size(); ++i) v(i) = uniform(-scale, scale);
    return Point{v};
  }
  std::normal_distribution<double> g;
  for (int i = 0; i < v.size(); ++i) v(i) = g(rng_);
  return Point{v.normalized()};
}

Point Sampler::near(const ManifoldModel& m, const Point& c, double radius) {
  if (m.kind() == ModelKind::flat) {
    Vec v = c.coords;
    for (int i = 0; i < v.size(); ++i) v(i) += uniform(-radius, radius);
    return Point{v};
  }
  const Vec t = tangent(m, c, 1.0).normalized();
  const double r = uniform(0.0, radius);
  return Point{std::cos(r) * c.coords + std::sin(r) * t};
}

Vec Sampler::tangent(const ManifoldModel& m, const Point& x, double scale) {
  std::normal_distribution<double> g;
  Vec v(m.ambient_dim());
  for (int i = 0; i < v.size(); ++i) v(i) = g(rng_);
  v = m.tangent_project(x, v);
  return scale * uniform(0.1, 1.0) * v / std::max(v.norm(), 1e-12);
}

Sampler::Triple Sampler::triple(const ManifoldModel& m, double scale) {
  if (m.kind() == ModelKind::flat) return {point(m, scale), point(m, scale), point(m, scale)};
  const Point c = point(m);
  return {near(m, c, scale), near(m, c, scale), near(m, c, scale)};
}

}  // namespace etherstar
