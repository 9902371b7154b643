#include "etherstar/newton.hpp"

#include <cmath>

namespace etherstar {

Mat fd_jacobian(const VecFunction& f, const Vec& x, double h) {
  const Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  for (int k = 0; k < x.size(); ++k) {
    Vec xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    j.col(k) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

NewtonResult newton_solve(const VecFunction& f, const Vec& x0, const NewtonOptions& opts,
                          const JacFunction& jac) {
  auto jacobian = [&](const Vec& x) { return jac ? jac(x) : fd_jacobian(f, x, opts.fd_step); };
  NewtonResult r;
  r.x = x0;
  Vec fx = f(r.x);
  double norm = fx.norm();
  for (int it = 1; it <= opts.max_iterations; ++it) {
    r.iterations = it;
    if (!std::isfinite(norm)) throw NewtonDiverged("Newton: non-finite residual");
    if (norm <= opts.residual_tol) break;
    const Mat j = jacobian(r.x);
    const Vec step = j.fullPivLu().solve(-fx);
    if (!step.allFinite()) throw NewtonDiverged("Newton: singular Jacobian");
    double lambda = 1.0;
    Vec trial = r.x + step;
    Vec ft = f(trial);
    while (!(ft.norm() < norm) && lambda > 1.0 / 64.0) {
      lambda *= 0.5;
      trial = r.x + lambda * step;
      ft = f(trial);
    }
    r.x = trial;
    fx = ft;
    norm = fx.norm();
    if (lambda * step.norm() <= opts.step_tol * std::max(1.0, r.x.norm())) break;
    if (it == opts.max_iterations)
      throw NewtonDiverged("Newton: no convergence in " + std::to_string(it) + " iterations");
  }
  if (!(norm <= std::max(opts.residual_tol, 1e-9)))
    throw NewtonDiverged("Newton: stalled with residual " + std::to_string(norm));
  r.residual = norm;
  if (opts.final_jacobian) r.jacobian = jacobian(r.x);
  return r;
}

}  // namespace etherstar
