#pragma once

#include <functional>
#include <vector>

#include "etherstar/geometry.hpp"

namespace etherstar {

/// Fixed-step RK4 settings with step doubling until two resolutions agree.
struct FlowConfig {
  int steps_per_unit = 128;   // per unit of (time x speed scale)
  int min_steps = 16;
  double tolerance = 1e-12;   // max-norm change accepted between resolutions
  int max_refinements = 8;
  /// Step counts are rounded up to a multiple of this (for evenly spaced samples).
  int step_multiple = 1;

  void validate() const;
};

/// Ambient vector field; the integrator projects back onto the manifold.
using VectorField = std::function<Vec(const Point& z, double t)>;

struct FlowResult {
  Point end;
  std::vector<Point> samples;  // trajectory at the accepted resolution, if requested
  int steps = 0;
};

/// Integrates dz/dt = field(z, t) from z0 over [0, t_end].
///
/// `speed` is a rough bound on |field| used to choose the initial step count.
FlowResult integrate_flow(const ManifoldModel& m, const VectorField& field, const Point& z0,
                          double t_end, const FlowConfig& cfg, double speed = 1.0,
                          bool keep_samples = false);

}  // namespace etherstar
