#pragma once

#include <vector>

#include "etherstar/geometry.hpp"
#include "etherstar/newton.hpp"
#include "etherstar/ode.hpp"
#include "etherstar/symbols.hpp"

namespace etherstar {

/// Piecewise path y = waypoints.front() -> x = waypoints.back(); each piece is
/// a straight segment (flat) or a minor great-circle arc (sphere).
struct PathSpec {
  std::vector<Point> waypoints;

  static PathSpec segment(const Point& from, const Point& to) { return PathSpec{{from, to}}; }
};

/// Point reached from x by the Ether flow of <v, H_x>, normalised so the flat
/// model returns x + v.
Point exp_map(const ManifoldModel& m, const Point& x, const TangentVector& v,
              const FlowConfig& cfg = {});

/// Inverse of exp_map near x. Throws DomainError for antipodal points.
TangentVector log_map(const ManifoldModel& m, const Point& x, const Point& b,
                      const FlowConfig& cfg = {}, const NewtonOptions& opts = {});

/// Trajectory of the Hamiltonian <v, H_x> started at y, evaluated at time t.
/// flow_point(x, v, y, 1/2) is the time-one shift e^v_x(y).
Point flow_point(const ManifoldModel& m, const Point& x, const TangentVector& v, const Point& y,
                 double t, const FlowConfig& cfg = {});

/// Ether translation g_{x,y}(z0) along a path from y to x.
Point translate(const ManifoldModel& m, const PathSpec& path, const Point& z0,
                const FlowConfig& cfg = {});

/// The point z with H_x(z) = eta (eta: ambient covector at x).
Point ell_invert(const ManifoldModel& m, const Point& x, const CotangentVector& eta,
                 const NewtonOptions& opts = {});

/// Left quantum lift f#(x, eta) truncated at order 0 or 1 in hbar.
Complex lift_symbol(const ManifoldModel& m, const FieldSymbol& f, const Point& x,
                    const CotangentVector& eta, int order, double hbar);

/// max_{j<k} |d_j H_k - d_k H_j + {H_j, H_k}| at z, with x-derivatives taken
/// by central differences in the chart centred at x.
double zero_curvature_residual(const ManifoldModel& m, const Point& x, const Point& z,
                               double step = 1e-5);

}  // namespace etherstar
