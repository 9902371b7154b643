#pragma once

#include <vector>

namespace etherstar {

/// Nodes and weights of a one-dimensional Gauss rule.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-x^2) on the real line.
GaussRule gauss_hermite(int n);

/// Gauss-Hermite nodes with weights multiplied by exp(x^2), for integrals
/// over the line without a weight. Computed from normalized Hermite
/// functions so that the outer weights keep full relative accuracy.
GaussRule gauss_hermite_scaled(int n);

/// Gauss-Legendre rule on [a, b].
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

}  // namespace etherstar
