#include "etherstar/hermite.hpp"

#include <cmath>
#include <numbers>

#include "etherstar/quadrature.hpp"

namespace etherstar::hermite {

CMat lowering(int dim) {
  CMat a = CMat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMat position(int dim, double hbar) {
  const CMat a = lowering(dim);
  return std::sqrt(hbar / 2.0) * (a + a.adjoint());
}

CMat momentum(int dim, double hbar) {
  const CMat a = lowering(dim);
  return Complex(0.0, std::sqrt(hbar / 2.0)) * (a.adjoint() - a);
}

namespace {

// Normalized associated Laguerre functions
// l_n^{(k)}(x) = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^{(k)}(x), n = 0..count-1.
std::vector<double> laguerre_normalized(int k, double x, int count) {
  std::vector<double> l(count, 0.0);
  if (count == 0) return l;
  if (x == 0.0) {
    l[0] = k == 0 ? 1.0 : 0.0;
  } else {
    l[0] = std::exp(0.5 * k * std::log(x) - 0.5 * x - 0.5 * std::lgamma(k + 1.0));
  }
  if (count > 1) l[1] = (1.0 + k - x) * l[0] / std::sqrt(1.0 + k);
  for (int n = 1; n + 1 < count; ++n)
    l[n + 1] = ((2.0 * n + 1.0 + k - x) * l[n] - std::sqrt(n * (n + static_cast<double>(k))) * l[n - 1]) /
               std::sqrt((n + 1.0) * (n + 1.0 + k));
  return l;
}

Complex unit_power(Complex u, int k) { return k == 0 ? Complex(1.0) : std::pow(u, k); }

}  // namespace

Complex displacement_element(int m, int n, Complex beta) {
  const double r = std::abs(beta);
  const Complex u = r > 0.0 ? beta / r : Complex(1.0);
  if (m >= n) {
    const int k = m - n;
    return unit_power(u, k) * laguerre_normalized(k, r * r, n + 1)[n];
  }
  const int k = n - m;
  return unit_power(-std::conj(u), k) * laguerre_normalized(k, r * r, m + 1)[m];
}

CMat displacement(Complex beta, int dim) {
  const double r = std::abs(beta);
  const Complex u = r > 0.0 ? beta / r : Complex(1.0);
  CMat d(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const std::vector<double> l = laguerre_normalized(k, r * r, dim - k);
    const Complex up = unit_power(u, k), dn = unit_power(-std::conj(u), k);
    for (int n = 0; n + k < dim; ++n) {
      d(n + k, n) = up * l[n];
      d(n, n + k) = dn * l[n];
    }
  }
  return d;
}

CMat weyl_kernel(const Vec& x, double hbar, int dim) {
  const Complex alpha = Complex(x(0), x(1)) / std::sqrt(2.0 * hbar);
  CMat s = 2.0 * displacement(2.0 * alpha, dim);
  for (int n = 1; n < dim; n += 2) s.col(n) *= -1.0;
  return s;
}

CMat weyl_operator(const PolySymbol& f, double hbar, int dim) {
  if (f.vars() != 2) throw DomainError("weyl_operator: one degree of freedom only");
  const int big = dim + f.degree() + 2;
  const CMat q = position(big, hbar), p = momentum(big, hbar);
  CMat out = CMat::Zero(big, big);
  for (const auto& [mi, c] : f.terms()) {
    const int a = mi[0], b = mi[1];
    // Weyl(q^a p^b) = 2^{-a} sum_k C(a,k) q^{a-k} p^b q^k
    CMat pb = CMat::Identity(big, big);
    for (int i = 0; i < b; ++i) pb = pb * p;
    std::vector<CMat> qk{CMat::Identity(big, big)};
    for (int i = 0; i < a; ++i) qk.push_back(qk.back() * q);
    CMat term = CMat::Zero(big, big);
    double binom = 1.0;
    for (int k = 0; k <= a; ++k) {
      term += binom * qk[a - k] * pb * qk[k];
      binom = binom * (a - k) / (k + 1.0);
    }
    out += c * std::pow(0.5, a) * term;
  }
  return out.topLeftCorner(dim, dim);
}

CMat gaussian_operator(const Vec& center, double sigma, double hbar, int dim) {
  const double r = hbar / (2.0 * sigma * sigma);
  if (!(r < 1.0)) throw DomainError("gaussian_operator: sigma^2 must exceed hbar / 2");
  const double l = (1.0 - r) / (1.0 + r);
  const Complex beta = Complex(center(0), center(1)) / std::sqrt(2.0 * hbar);
  // the displacement couples |n> to far states; build it in a wider basis
  const int big = dim + 64 + static_cast<int>(4.0 * std::norm(beta));
  CVec diag(big);
  for (int n = 0; n < big; ++n) diag(n) = 0.5 * (1.0 + l) * std::pow(l, n);
  const CMat d = displacement(beta, big);
  return (d * diag.asDiagonal() * d.adjoint()).topLeftCorner(dim, dim);
}

CMat operator_of(const FieldSymbol& f, double hbar, int dim, int nodes) {
  if (!f.envelope || f.envelope->center.size() != 2)
    throw DomainError("operator_of: needs a Gaussian-enveloped symbol on R^2");
  if (nodes <= 0) nodes = dim + 24;
  const GaussRule rule = gauss_hermite_scaled(nodes);
  GaussianEnvelope e = *f.envelope;
  const double s2 = 1.0 / (1.0 / (e.sigma * e.sigma) + 2.0 / hbar);
  e.center *= s2 / (e.sigma * e.sigma);
  e.sigma = std::sqrt(s2);
  const double s = std::sqrt(2.0) * e.sigma;
  CMat out = CMat::Zero(dim, dim);
  for (int a = 0; a < nodes; ++a)
    for (int b = 0; b < nodes; ++b) {
      const double xa = rule.nodes[a], xb = rule.nodes[b];
      const Vec x{{e.center(0) + s * xa, e.center(1) + s * xb}};
      const double w = s * s * rule.weights[a] * rule.weights[b];
      out += (w * f(x)) * weyl_kernel(x, hbar, dim);
    }
  return out / (2.0 * std::numbers::pi * hbar);
}

Complex symbol_of(const CMat& a, const Vec& x, double hbar) {
  return (a * weyl_kernel(x, hbar, static_cast<int>(a.rows()))).trace();
}

}  // namespace etherstar::hermite
