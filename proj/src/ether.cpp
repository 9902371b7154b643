#include "etherstar/ether.hpp"

#include <array>
#include <cmath>

namespace etherstar {

namespace {

Vec tangent_at(const ManifoldModel& m, const Point& x, const Vec& v) {
  return m.tangent_project(x, v);
}

/// Point and velocity of piece [a, b] at parameter lambda in [0, 1].
std::pair<Point, Vec> piece(const ManifoldModel& m, const Point& a, const Point& b, double lambda) {
  if (m.kind() == ModelKind::flat)
    return {Point{a.coords + lambda * (b.coords - a.coords)}, b.coords - a.coords};
  const double c = std::clamp(a.coords.dot(b.coords), -1.0, 1.0);
  if (c < -1.0 + 1e-8) throw DomainError("path: antipodal waypoints");
  const double th = std::acos(c);
  if (th < 1e-12) return {a, Vec::Zero(3)};
  const double s = std::sin(th);
  const Vec p = (std::sin((1.0 - lambda) * th) * a.coords + std::sin(lambda * th) * b.coords) / s;
  const Vec dp = th * (-std::cos((1.0 - lambda) * th) * a.coords + std::cos(lambda * th) * b.coords) / s;
  return {m.project(p), dp};
}

double piece_length(const ManifoldModel& m, const Point& a, const Point& b) {
  if (m.kind() == ModelKind::flat) return (b.coords - a.coords).norm();
  return std::acos(std::clamp(a.coords.dot(b.coords), -1.0, 1.0));
}

// Fourth-order central first derivative of a vector-valued function.
template <class F>
auto d1(F&& f, double h) {
  return ((f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)).eval();
}

constexpr std::array<double, 4> kOff{-2.0, -1.0, 1.0, 2.0};
constexpr std::array<double, 4> kW{1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};

}  // namespace

Point exp_map(const ManifoldModel& m, const Point& x, const TangentVector& v, const FlowConfig& cfg) {
  return flow_point(m, x, v, x, 0.5, cfg);
}

Point flow_point(const ManifoldModel& m, const Point& x, const TangentVector& v, const Point& y,
                 double t, const FlowConfig& cfg) {
  m.require_on(x);
  m.require_on(y);
  const Vec vt = tangent_at(m, x, v.comps);
  const VectorField field = [&](const Point& z, double) {
    return m.hamiltonian_vector(z, m.ether_gradient(x, vt, z));
  };
  const double speed = 2.0 * std::max(vt.norm(), 1e-3);
  return integrate_flow(m, field, y, t, cfg, speed).end;
}

TangentVector log_map(const ManifoldModel& m, const Point& x, const Point& b, const FlowConfig& cfg,
                      const NewtonOptions& opts) {
  m.require_on(x);
  m.require_on(b);
  const Mat f = m.frame(x);
  Vec guess;
  if (m.kind() == ModelKind::flat) {
    guess = b.coords - x.coords;
  } else {
    const double c = std::clamp(x.coords.dot(b.coords), -1.0, 1.0);
    if (c < -1.0 + 1e-10) throw DomainError("log_map: antipodal point");
    const Vec perp = b.coords - c * x.coords;
    guess = perp.norm() < 1e-15 ? Vec::Zero(3).eval() : (std::acos(c) * perp / perp.norm()).eval();
  }
  const auto residual = [&](const Vec& a) {
    const Point e = exp_map(m, x, TangentVector{x, f * a}, cfg);
    return m.chart_coords(b, e);
  };
  const NewtonResult r = newton_solve(residual, f.transpose() * guess, opts);
  return TangentVector{x, f * r.x};
}

Point translate(const ManifoldModel& m, const PathSpec& path, const Point& z0, const FlowConfig& cfg) {
  m.require_on(z0);
  if (path.waypoints.empty()) throw DomainError("translate: empty path");
  Point z = z0;
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    const Point& a = path.waypoints[i];
    const Point& b = path.waypoints[i + 1];
    m.require_on(a);
    m.require_on(b);
    const double len = piece_length(m, a, b);
    if (len == 0.0) continue;
    const VectorField field = [&](const Point& p, double lambda) {
      const auto [xl, xdot] = piece(m, a, b, lambda);
      return m.hamiltonian_vector(p, m.ether_gradient(xl, xdot, p));
    };
    z = integrate_flow(m, field, z, 1.0, cfg, 2.0 * len).end;
  }
  return z;
}

Point ell_invert(const ManifoldModel& m, const Point& x, const CotangentVector& eta,
                 const NewtonOptions& opts) {
  m.require_on(x);
  const Vec e = m.tangent_project(x, eta.comps);
  if (e.norm() >= m.fibration_radius())
    throw DomainError("ell_invert: covector outside the fibration neighbourhood");
  const Mat f = m.frame(x);
  const Vec target = f.transpose() * e;
  const auto residual = [&](const Vec& s) {
    return (f.transpose() * m.ether_form(x, m.chart_point(x, s)) - target).eval();
  };
  const NewtonResult r = newton_solve(residual, Vec::Zero(m.dim()), opts);
  return m.chart_point(x, r.x);
}

Complex lift_symbol(const ManifoldModel& m, const FieldSymbol& f, const Point& x,
                    const CotangentVector& eta, int order, double hbar) {
  if (order != 0 && order != 1) throw DomainError("lift_symbol: order must be 0 or 1");
  const int d = m.dim();
  const Vec eta0 = m.to_frame(x, m.tangent_project(x, eta.comps));
  const auto ell = [&](const Vec& s, const Vec& ec) {
    return ell_invert(m, m.chart_point(x, s), CotangentVector{x, covector_from_chart(m, x, s, ec)});
  };
  const Vec zero = Vec::Zero(d);
  const Complex f0 = f(ell(zero, eta0));
  if (order == 0) return f0;

  const double h = 1e-3;
  // d^2 F / ds_k d eta_k, summed over k.
  Complex mixed = 0.0;
  for (int k = 0; k < d; ++k)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        Vec s = zero, ec = eta0;
        s(k) += kOff[a] * h;
        ec(k) += kOff[b] * h;
        mixed += kW[a] * kW[b] * f(ell(s, ec));
      }
  mixed /= h * h;

  // d_{eta_s} F at s = 0.
  Eigen::VectorXcd dfeta(d);
  for (int j = 0; j < d; ++j) {
    const auto fj = [&](double t) {
      Vec ec = eta0;
      ec(j) += t;
      return Eigen::Matrix<Complex, 1, 1>(f(ell(zero, ec)));
    };
    dfeta(j) = d1(fj, h)(0);
  }

  // D_{ks}(eta) = d/ds_k [H_{x(s)}(w) . E_s(s)] at s = 0 with w = ell(x, eta) held fixed.
  const auto dh = [&](const Vec& ec) {
    const Point w = ell(zero, ec);
    Mat out(d, d);
    for (int k = 0; k < d; ++k) {
      const auto g = [&](double t) {
        Vec s = zero;
        s(k) = t;
        return (m.chart_basis(x, s).transpose() * m.ether_form(m.chart_point(x, s), w)).eval();
      };
      out.row(k) = d1(g, h).transpose();
    }
    return out;
  };
  Complex second = 0.0;
  for (int k = 0; k < d; ++k) {
    const auto col = [&](double t) {
      Vec ec = eta0;
      ec(k) += t;
      return dh(ec).row(k).transpose().eval();
    };
    const Vec dk = d1(col, h);  // d/d eta_k of D_{k s}, indexed by s
    for (int s = 0; s < d; ++s) second += dfeta(s) * dk(s);
  }
  const Complex ih2(0.0, 0.5 * hbar);
  return f0 - ih2 * mixed - ih2 * second;
}

double zero_curvature_residual(const ManifoldModel& m, const Point& x, const Point& z, double step) {
  m.require_on(x);
  m.require_on(z);
  const int d = m.dim();
  // hk(s)(k) = H_{x(s)}(z) . E_k(s)
  const auto hk = [&](const Vec& s) {
    return (m.chart_basis(x, s).transpose() * m.ether_form(m.chart_point(x, s), z)).eval();
  };
  Mat dH(d, d);  // dH(j, k) = d_j H_k
  for (int j = 0; j < d; ++j) {
    Vec sp = Vec::Zero(d), sm = Vec::Zero(d);
    sp(j) = step;
    sm(j) = -step;
    dH.row(j) = ((hk(sp) - hk(sm)) / (2.0 * step)).transpose();
  }
  const Mat e = m.chart_basis(x, Vec::Zero(d));
  std::vector<Vec> grads;
  for (int k = 0; k < d; ++k) grads.push_back(m.ether_gradient(x, e.col(k), z));
  double worst = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      const double r = dH(j, k) - dH(k, j) + m.poisson(z, grads[j], grads[k]);
      worst = std::max(worst, std::abs(r));
    }
  return worst;
}

}  // namespace etherstar
