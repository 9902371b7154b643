#include "etherstar/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "etherstar/errors.hpp"

namespace etherstar {

namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
GaussRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) t(i, i + 1) = t(i + 1, i) = offdiag(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  if (es.info() != Eigen::Success) throw QuadratureError("Golub-Welsch eigen-solve failed");
  GaussRule r;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    r.weights.push_back(mu0 * v * v);
  }
  return r;
}

}  // namespace

GaussRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("gauss_hermite: n must be positive");
  if (n == 1) return GaussRule{{0.0}, {std::sqrt(std::numbers::pi)}};
  Eigen::VectorXd b(n - 1);
  for (int i = 1; i < n; ++i) b(i - 1) = std::sqrt(0.5 * i);
  return golub_welsch(b, std::sqrt(std::numbers::pi));
}

GaussRule gauss_hermite_scaled(int n) {
  GaussRule r = gauss_hermite(n);
  for (int i = 0; i < n; ++i) {
    const double x = r.nodes[i];
    // lambda_i exp(x_i^2) = 1 / sum_k phi_k(x_i)^2 with phi_k the Hermite functions
    double prev = 0.0, cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    double sum = cur * cur;
    for (int k = 0; k + 1 < n; ++k) {
      const double next = std::sqrt(2.0 / (k + 1.0)) * x * cur - std::sqrt(k / (k + 1.0)) * prev;
      prev = cur;
      cur = next;
      sum += cur * cur;
    }
    r.weights[i] = 1.0 / sum;
  }
  return r;
}

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  GaussRule r;
  if (n == 1) {
    r = GaussRule{{0.0}, {2.0}};
  } else {
    Eigen::VectorXd off(n - 1);
    for (int i = 1; i < n; ++i) off(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
    r = golub_welsch(off, 2.0);
  }
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = mid + half * r.nodes[i];
    r.weights[i] *= half;
  }
  return r;
}

}  // namespace etherstar
