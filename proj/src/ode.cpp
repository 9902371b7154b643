#include "etherstar/ode.hpp"

#include <cmath>

namespace etherstar {

void FlowConfig::validate() const {
  if (min_steps < 16) throw DomainError("FlowConfig: min_steps must be >= 16");
  if (steps_per_unit < 1) throw DomainError("FlowConfig: steps_per_unit must be >= 1");
  if (!(tolerance > 0.0)) throw DomainError("FlowConfig: tolerance must be > 0");
  if (step_multiple < 1) throw DomainError("FlowConfig: step_multiple must be >= 1");
}

namespace {

FlowResult rk4(const ManifoldModel& m, const VectorField& field, const Point& z0, double t_end,
               int steps, bool keep) {
  FlowResult r;
  r.steps = steps;
  const double h = t_end / steps;
  Point z = z0;
  if (keep) r.samples.reserve(steps + 1), r.samples.push_back(z);
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const Vec k1 = field(z, t);
    const Vec k2 = field(m.project(z.coords + 0.5 * h * k1), t + 0.5 * h);
    const Vec k3 = field(m.project(z.coords + 0.5 * h * k2), t + 0.5 * h);
    const Vec k4 = field(m.project(z.coords + h * k3), t + h);
    z = m.project(z.coords + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if (!z.coords.allFinite()) throw IntegratorDiverged("RK4: non-finite state");
    if (keep) r.samples.push_back(z);
  }
  r.end = z;
  return r;
}

}  // namespace

FlowResult integrate_flow(const ManifoldModel& m, const VectorField& field, const Point& z0,
                          double t_end, const FlowConfig& cfg, double speed, bool keep_samples) {
  cfg.validate();
  if (t_end == 0.0) {
    FlowResult r;
    r.end = z0;
    if (keep_samples) r.samples.push_back(z0);
    return r;
  }
  int steps = std::max(cfg.min_steps,
                       static_cast<int>(std::ceil(cfg.steps_per_unit * std::abs(t_end) * speed)));
  steps = (steps + cfg.step_multiple - 1) / cfg.step_multiple * cfg.step_multiple;
  FlowResult coarse = rk4(m, field, z0, t_end, steps, false);
  for (int r = 0; r < cfg.max_refinements; ++r) {
    steps *= 2;
    FlowResult fine = rk4(m, field, z0, t_end, steps, keep_samples);
    const double change = (fine.end.coords - coarse.end.coords).lpNorm<Eigen::Infinity>();
    if (change <= cfg.tolerance * std::max(1.0, fine.end.coords.lpNorm<Eigen::Infinity>()))
      return fine;
    coarse = std::move(fine);
  }
  throw IntegratorDiverged("RK4: no agreement between successive step doublings");
}

}  // namespace etherstar
