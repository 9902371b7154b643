#pragma once

#include "etherstar/geometry.hpp"

namespace etherstar {

struct QuantizationReport {
  bool vacuous = false;         // H^2 trivial: nothing to check
  double omega_integral = 0.0;  // symplectic volume by quadrature
  double quadrature_change = 0.0;  // relative change at the last refinement
  int chern = 0;
  double value = 0.0;           // omega_integral / (2 pi hbar) - chern / 2
  double distance = 0.0;        // to the nearest integer
  bool passed = false;
};

/// Symplectic volume of a compact model by tensor Gauss-Legendre quadrature
/// of |omega| in polar coordinates, refined until the relative change is
/// below tol.
double symplectic_volume(const ManifoldModel& m, double tol = 1e-12, double* change = nullptr);

/// Integrality of (1/2 pi hbar)[omega] - c_1 / 2 on the fundamental class.
QuantizationReport quantization_check(const ManifoldModel& m, double hbar, double tol = 1e-6);

}  // namespace etherstar
