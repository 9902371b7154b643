#pragma once

#include <functional>

#include "etherstar/geometry.hpp"

namespace etherstar {

struct NewtonOptions {
  int max_iterations = 50;
  double step_tol = 1e-12;
  double residual_tol = 1e-14;
  double fd_step = 1e-7;
  /// Fill NewtonResult::jacobian at the solution (costs one more Jacobian).
  bool final_jacobian = false;
};

struct NewtonResult {
  Vec x;
  int iterations = 0;
  double residual = 0.0;
  Mat jacobian;  // at the returned x, when requested
};

using VecFunction = std::function<Vec(const Vec&)>;
using JacFunction = std::function<Mat(const Vec&)>;

/// Central-difference Jacobian of f at x.
Mat fd_jacobian(const VecFunction& f, const Vec& x, double h);

/// Damped Newton iteration for f(x) = 0. Throws NewtonDiverged.
NewtonResult newton_solve(const VecFunction& f, const Vec& x0, const NewtonOptions& opts = {},
                          const JacFunction& jac = {});

}  // namespace etherstar
