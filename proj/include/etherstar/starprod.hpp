#pragma once

#include "etherstar/geometry.hpp"
#include "etherstar/symbols.hpp"

namespace etherstar {

enum class DerivativeMode { analytic, finite_difference };

struct SeriesConfig {
  double hbar = 0.1;
  int order = 2;  // 0, 1 or 2
  DerivativeMode mode = DerivativeMode::analytic;
  double first_step = 1e-5;
  double second_step = 1e-3;

  void validate() const;
};

struct QuadConfig {
  int nodes = 48;           // Gauss-Hermite nodes per axis
  int max_doublings = 2;
  double tolerance = 1e-9;  // relative change accepted between node counts
  bool verify = true;       // compare against the doubled rule
};

/// Exact Weyl-Moyal product of polynomials on flat phase space.
PolySymbol moyal_poly(const PolySymbol& f, const PolySymbol& g, double hbar,
                      int degree_cap = PolySymbol::kDefaultDegreeCap);

/// Chart gradient and Hessian of f at z in the chart centred at z.
struct ChartJet {
  Complex value;
  CVec gradient;
  CMat hessian;
};
ChartJet chart_jet(const ManifoldModel& m, const FieldSymbol& f, const Point& z,
                   const SeriesConfig& cfg);

/// Covariant deformation series f g - (i hbar/2) df Psi dg
/// - (hbar^2/8) (nabla^2 f) Psi Psi (nabla^2 g), truncated at cfg.order.
Complex series_product(const ManifoldModel& m, const FieldSymbol& f, const FieldSymbol& g,
                       const Point& z, const SeriesConfig& cfg);

/// Bidifferential coefficient c_k(f, g) of the series at z (k = 1, 2).
Complex series_coefficient(const ManifoldModel& m, const FieldSymbol& f, const FieldSymbol& g,
                           const Point& z, int k, const SeriesConfig& cfg);

/// Integral-kernel product on flat R^2 by tensor Gauss-Hermite quadrature.
/// At least one factor must carry a Gaussian envelope; the other may be
/// polynomially bounded.
Complex quad_product(const FieldSymbol& f, const FieldSymbol& g, const Point& z, double hbar,
                     const QuadConfig& cfg = {});

/// The quadrature product as a lazily evaluated symbol, with the product of
/// the two envelopes declared as its envelope.
FieldSymbol quad_product_symbol(const FieldSymbol& f, const FieldSymbol& g, double hbar,
                                const QuadConfig& cfg = {});

/// Integral of f over flat R^2 with its envelope absorbed by Gauss-Hermite.
Complex gaussian_integral(const FieldSymbol& f, const QuadConfig& cfg = {});

/// The Ether component z -> <E_j, H_x(z)> as a symbol (E_j: frame at x).
FieldSymbol ether_component(const ManifoldModel& m, const Point& x, int j);

/// max_j |i hbar d_j f(x) - (f * H_{x,j})(x)| with the series product.
double germ_residual(const ManifoldModel& m, const FieldSymbol& f, const Point& x,
                     const SeriesConfig& cfg);

}  // namespace etherstar
