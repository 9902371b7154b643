#pragma once

// Operator-matrix oracle on the harmonic-oscillator basis |0>, ..., |dim-1>
// for one degree of freedom. Conventions:
//   q = sqrt(hbar/2) (a + a^+),  p = i sqrt(hbar/2) (a^+ - a),
//   alpha(x) = (q + i p) / sqrt(2 hbar),
//   S_x = 2 D(2 alpha(x)) Pi  (Pi |n> = (-1)^n |n>),
//   symbol of A: tr(A S_x);  Op(f) = (2 pi hbar)^{-1} int f(x) S_x dx.

#include "etherstar/symbols.hpp"

namespace etherstar::hermite {

/// Lowering operator a truncated to dim x dim.
CMat lowering(int dim);

/// Position and momentum matrices truncated to dim x dim.
CMat position(int dim, double hbar);
CMat momentum(int dim, double hbar);

/// Matrix element <m| D(beta) |n> of the displacement operator.
Complex displacement_element(int m, int n, Complex beta);

/// Displacement operator D(beta) truncated to dim x dim.
CMat displacement(Complex beta, int dim);

/// Stratonovich-Weyl kernel S_x truncated to dim x dim.
CMat weyl_kernel(const Vec& x, double hbar, int dim);

/// Weyl-ordered operator of a polynomial symbol in (q, p), built in an
/// enlarged basis and truncated so that every element is exact.
CMat weyl_operator(const PolySymbol& f, double hbar, int dim);

/// Op of exp(-|x - center|^2 / (2 sigma^2)) in closed form: a displaced
/// ((1 + l) / 2) l^N with l = (1 - r) / (1 + r), r = hbar / (2 sigma^2).
CMat gaussian_operator(const Vec& center, double sigma, double hbar, int dim);

/// Op(f) by tensor Gauss-Hermite quadrature. The rule is built on the product
/// of f's envelope with the exp(-|x|^2/hbar) decay of the kernel, so the
/// elements are exact for polynomial-times-Gaussian f once nodes > dim + deg/2.
/// nodes = 0 picks dim + 24.
CMat operator_of(const FieldSymbol& f, double hbar, int dim, int nodes = 0);

/// tr(A S_x).
Complex symbol_of(const CMat& a, const Vec& x, double hbar);

}  // namespace etherstar::hermite
