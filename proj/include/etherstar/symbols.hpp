#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "etherstar/geometry.hpp"

namespace etherstar {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Sparse complex polynomial in 2n phase-space variables (q_1..q_n, p_1..p_n).
class PolySymbol {
 public:
  using MultiIndex = std::vector<int>;
  using Terms = std::map<MultiIndex, Complex>;

  static constexpr int kDefaultDegreeCap = 16;

  explicit PolySymbol(int vars = 2) : vars_(vars) {}

  static PolySymbol constant(int vars, Complex c);
  static PolySymbol variable(int vars, int index, Complex c = 1.0);
  static PolySymbol monomial(const MultiIndex& mi, Complex c = 1.0);

  int vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  void add(const MultiIndex& mi, Complex c);
  int degree() const;
  bool empty() const { return terms_.empty(); }

  Complex eval(const Vec& x) const;
  CVec gradient(const Vec& x) const;
  CMat hessian(const Vec& x) const;
  PolySymbol derivative(int var) const;
  PolySymbol conj() const;

  PolySymbol operator+(const PolySymbol& o) const;
  PolySymbol operator-(const PolySymbol& o) const;
  PolySymbol operator*(Complex c) const;
  /// Commutative (pointwise) product.
  PolySymbol operator*(const PolySymbol& o) const;

  /// Drops coefficients with modulus below tol.
  PolySymbol pruned(double tol = 0.0) const;
  /// max over multi-indices of |c_this - c_other|.
  double max_coeff_diff(const PolySymbol& o) const;

  /// {"terms": [{"mi": [..], "re": r, "im": i}]}
  nlohmann::json to_json() const;
  /// vars = 0 accepts any even arity (phase-space coordinates); a positive
  /// value demands exactly that many variables (e.g. 3 for sphere ambient).
  static PolySymbol from_json(const nlohmann::json& j, int vars = 0);

 private:
  int vars_;
  Terms terms_;
};

/// Isotropic Gaussian envelope exp(-|x - center|^2 / (2 sigma^2)).
struct GaussianEnvelope {
  Vec center;
  double sigma = 1.0;

  double operator()(const Vec& x) const;
};

/// Scalar field on ambient coordinates with optional analytic ambient
/// derivatives and an optional declared Gaussian decay envelope.
struct FieldSymbol {
  std::function<Complex(const Vec&)> value;
  std::function<CVec(const Vec&)> gradient;
  std::function<CMat(const Vec&)> hessian;
  std::optional<GaussianEnvelope> envelope;

  Complex operator()(const Vec& x) const { return value(x); }
  Complex operator()(const Point& z) const { return value(z.coords); }
  bool has_derivatives() const { return static_cast<bool>(gradient) && static_cast<bool>(hessian); }

  static FieldSymbol constant(Complex c, int ambient_dim);
  static FieldSymbol from_poly(const PolySymbol& p);
  /// amplitude * exp(-|x - center|^2 / (2 sigma^2)).
  static FieldSymbol gaussian(const Vec& center, double sigma, Complex amplitude = 1.0);
  /// poly(x) * exp(-|x - center|^2 / (2 sigma^2)).
  static FieldSymbol poly_gaussian(const PolySymbol& p, const Vec& center, double sigma);
  /// Plain callable, derivatives by finite differences where needed.
  static FieldSymbol from_function(std::function<Complex(const Vec&)> f);

  FieldSymbol conj() const;
};

}  // namespace etherstar
