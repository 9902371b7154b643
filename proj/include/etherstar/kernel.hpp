#pragma once

#include <optional>
#include <vector>

#include "etherstar/ether.hpp"

namespace etherstar {

/// Midpoint triangle: x, y, z are the side midpoints, a, b, c the vertices
/// with c = s_z(b), b = s_y(a), a = s_x(c).
struct TriangleSolution {
  Point x, y, z;
  Point a, b, c;
  int branch_id = 0;
  int newton_iters = 0;
  double residual = 0.0;
  /// det(I - D(s_z o s_x o s_y)(b)) in an orthonormal frame at b.
  double focal_det = 0.0;
};

struct KernelValue {
  double phase = 0.0;
  double amplitude = 0.0;
  double hbar = 1.0;
  int branch_id = 0;
  Complex value;
};

struct MembraneConfig {
  int samples_per_side = 8;
  double rel_tol = 1e-8;
  int max_refinements = 4;
  FlowConfig flow;
};

inline constexpr double kFocalThreshold = 1e-10;

/// Fixed point b of s_z o s_x o s_y and the derived vertices. Branch 0 is the
/// root nearest the flat guess y - x + z; on the sphere branch 1 is the other
/// fixed point. `guess` overrides the flat guess (continuation).
TriangleSolution solve_triangle(const ManifoldModel& m, const Point& x, const Point& y,
                                const Point& z, int branch = 0,
                                const std::optional<Point>& guess = std::nullopt);

/// All isolated fixed points found from a fixed set of Newton seeds.
std::vector<TriangleSolution> enumerate_branches(const ManifoldModel& m, const Point& x,
                                                 const Point& y, const Point& z);

/// Boundary of the membrane: the three Ether geodesic sides a->b (through y),
/// b->c (through z), c->a (through x), each sampled at k+1 points.
std::vector<Point> membrane_boundary(const ManifoldModel& m, const TriangleSolution& tri, int k,
                                     const FlowConfig& cfg = {});

/// Integral of omega over the membrane bounded by the closed polygonal
/// boundary, filled by a fan from `apex` (default: normalized vertex mean).
double fan_area(const ManifoldModel& m, const std::vector<Point>& boundary,
                const std::optional<Point>& apex = std::nullopt);

/// Symplectic area of the membrane triangle.
double phase(const ManifoldModel& m, const TriangleSolution& tri, const MembraneConfig& cfg = {});

/// 2^n mu^2 det(I - D(s_z o s_x o s_y)(b))^{-1/2} with mu = 2^n.
double amplitude(const ManifoldModel& m, const TriangleSolution& tri);

/// The same amplitude from second derivatives of the phase and the Ether
/// form, without reflections. `step` is the chart step in y.
double amplitude_reflection_free(const ManifoldModel& m, const TriangleSolution& tri,
                                 double step = 1e-5);

KernelValue kernel_value(const ManifoldModel& m, const Point& x, const Point& y, const Point& z,
                         double hbar, int branch = 0, const MembraneConfig& cfg = {});

/// Closed-form flat phase 2 omega(x - z, y - z).
double flat_phase(const FlatModel& m, const Point& x, const Point& y, const Point& z);

/// max component of dPhi - (H_x(a) + H_y(b) + H_z(c)), dPhi by central
/// differences in the charts centred at x, y and z.
double phase_gradient_residual(const ManifoldModel& m, const Point& x, const Point& y,
                               const Point& z, double step = 1e-4, const MembraneConfig& cfg = {});

struct TransportSteps {
  double first = 1e-4;   // first derivatives of phase and amplitude
  double second = 2e-3;  // Hessian of the phase in z
  double symbol = 1e-3;  // derivatives of the lifted Hamiltonian
};

/// Amplitude transport along x with y fixed, in the charts centred at x and
/// z, with L_x(z, xi) = H_x(l(z, xi)) and xi = d_z Phi:
///   d_x phi + L_xi . d_z phi
///     + (1/2) tr(L_xixi Phi_zz + L_zxi) phi + (1/2) A_x phi = 0,
///   A_x(z, xi)_j = d_xi_s L_j . d_xi_k [d_k H_z(w)_s]_{w = l(z, xi)},
/// where d_k moves the base point of H_z with w held fixed.
/// Returns the largest |component| of the left side.
double transport_residual(const ManifoldModel& m, const Point& x, const Point& y, const Point& z,
                          const TransportSteps& steps = {}, const MembraneConfig& cfg = {});

}  // namespace etherstar
