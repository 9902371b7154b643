#include "etherstar/quantization.hpp"

#include <cmath>
#include <numbers>

#include "etherstar/quadrature.hpp"

namespace etherstar {

namespace {

double polar_volume(const ManifoldModel& m, int nodes) {
  const GaussRule theta = gauss_legendre(nodes, 0.0, std::numbers::pi);
  const GaussRule phi = gauss_legendre(nodes, 0.0, 2.0 * std::numbers::pi);
  double sum = 0.0;
  for (std::size_t i = 0; i < theta.nodes.size(); ++i)
    for (std::size_t j = 0; j < phi.nodes.size(); ++j) {
      const double t = theta.nodes[i], f = phi.nodes[j];
      const Vec z{{std::sin(t) * std::cos(f), std::sin(t) * std::sin(f), std::cos(t)}};
      const Vec dt{{std::cos(t) * std::cos(f), std::cos(t) * std::sin(f), -std::sin(t)}};
      const Vec df{{-std::sin(t) * std::sin(f), std::sin(t) * std::cos(f), 0.0}};
      sum += theta.weights[i] * phi.weights[j] * std::abs(m.omega(Point{z}, dt, df));
    }
  return sum;
}

}  // namespace

double symplectic_volume(const ManifoldModel& m, double tol, double* change) {
  if (!m.is_compact()) throw DomainError("symplectic_volume: the model is not compact");
  if (m.kind() != ModelKind::sphere) throw DomainError("symplectic_volume: only the sphere is parametrized");
  double prev = polar_volume(m, 8);
  for (int nodes = 16; nodes <= 256; nodes *= 2) {
    const double next = polar_volume(m, nodes);
    const double rel = std::abs(next - prev) / std::abs(next);
    if (change) *change = rel;
    if (rel <= tol) return next;
    prev = next;
  }
  throw QuadratureError("symplectic_volume: no agreement under refinement");
}

QuantizationReport quantization_check(const ManifoldModel& m, double hbar, double tol) {
  if (!(hbar > 0.0)) throw DomainError("quantization_check: hbar must be positive");
  QuantizationReport r;
  r.chern = m.chern_integral();
  if (!m.is_compact()) {
    r.vacuous = true;
    r.passed = true;
    return r;
  }
  r.omega_integral = symplectic_volume(m, 1e-12, &r.quadrature_change);
  r.value = r.omega_integral / (2.0 * std::numbers::pi * hbar) - 0.5 * r.chern;
  r.distance = std::abs(r.value - std::round(r.value));
  r.passed = r.distance <= tol;
  return r;
}

}  // namespace etherstar
