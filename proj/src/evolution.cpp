#include "etherstar/evolution.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>

#include "etherstar/hermite.hpp"

namespace etherstar {

namespace {

// Augmented state (q, p, M00, M10, M01, M11, int p dq, unused) carried in a
// flat container of dimension 8 so the shared RK4 driver can integrate it.
const FlatModel& augmented_space() {
  static const FlatModel space(4);
  return space;
}

void require_plane(const Point& x, const char* what) {
  if (x.coords.size() != 2) throw DomainError(std::string(what) + ": flat R^2 only");
}

Vec field_gradient(const FieldSymbol& h, const Vec& z) {
  if (h.gradient) return h.gradient(z).real();
  Vec g(2);
  const double step = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vec zp = z, zm = z;
    zp(i) += step;
    zm(i) -= step;
    g(i) = (h(zp) - h(zm)).real() / (2.0 * step);
  }
  return g;
}

Mat field_hessian(const FieldSymbol& h, const Vec& z) {
  if (h.hessian) return h.hessian(z).real();
  Mat hm(2, 2);
  const double step = 1e-4;
  for (int i = 0; i < 2; ++i) {
    Vec zp = z, zm = z;
    zp(i) += step;
    zm(i) -= step;
    hm.col(i) = (field_gradient(h, zp) - field_gradient(h, zm)) / (2.0 * step);
  }
  return (hm + hm.transpose()) / 2.0;
}

// Smallest value of det(I + D gamma^s) over the arc, with interior minima
// refined by a parabola through neighbouring samples.
double focal_minimum(const std::vector<double>& d) {
  double lo = d.front();
  for (std::size_t i = 0; i < d.size(); ++i) {
    lo = std::min(lo, d[i]);
    if (i == 0 || i + 1 == d.size()) continue;
    if (d[i] <= d[i - 1] && d[i] <= d[i + 1]) {
      const double curv = d[i + 1] - 2.0 * d[i] + d[i - 1];
      if (curv > 0.0) lo = std::min(lo, d[i] - std::pow(d[i + 1] - d[i - 1], 2) / (8.0 * curv));
    }
  }
  return lo;
}

PolySymbol shifted(const PolySymbol& h, const Vec& x) {
  // h(q + x_q, p + x_p) by binomial expansion
  PolySymbol out(2);
  for (const auto& [mi, c] : h.terms()) {
    const int a = mi[0], b = mi[1];
    double ca = 1.0;
    for (int i = 0; i <= a; ++i) {
      double cb = 1.0;
      for (int j = 0; j <= b; ++j) {
        out.add({i, j}, c * ca * cb * std::pow(x(0), a - i) * std::pow(x(1), b - j));
        cb = cb * (b - j) / (j + 1.0);
      }
      ca = ca * (a - i) / (i + 1.0);
    }
  }
  return out;
}

// Parity about x with a smooth cutoff in the number of quanta counted from x:
// 2 D(alpha) w(N) Pi D(alpha)^+, w(n) = erfc((n - c) / s) / 2.
CMat tapered_parity(const Vec& x, double hbar, int dim) {
  const Complex alpha = Complex(x(0), x(1)) / std::sqrt(2.0 * hbar);
  const int big = dim + 64 + static_cast<int>(4.0 * std::norm(alpha));
  const double centre = dim / 2.0, width = 3.0 * dim / 32.0;
  CVec w(big);
  for (int n = 0; n < big; ++n) w(n) = (n % 2 ? -1.0 : 1.0) * std::erfc((n - centre) / width);
  const CMat d = hermite::displacement(alpha, big);
  return (d * w.asDiagonal() * d.adjoint()).topLeftCorner(dim, dim);
}

}  // namespace

FlowTrace hamilton_flow(const FieldSymbol& h, const Point& x0, double t, const FlowConfig& cfg) {
  require_plane(x0, "hamilton_flow");
  const VectorField field = [&h](const Point& y, double) {
    const Vec z = y.coords.head(2);
    const Vec g = field_gradient(h, z);
    const Mat hs = field_hessian(h, z);
    Mat jh(2, 2);
    jh << hs(1, 0), hs(1, 1), -hs(0, 0), -hs(0, 1);
    const Mat m = Eigen::Map<const Mat>(y.coords.data() + 2, 2, 2);
    const Mat dm = jh * m;
    Vec out = Vec::Zero(8);
    out(0) = g(1);
    out(1) = -g(0);
    out.segment(2, 4) = Eigen::Map<const Vec>(dm.data(), 4);
    out(6) = z(1) * g(1);
    return out;
  };
  Vec y0 = Vec::Zero(8);
  y0.head(2) = x0.coords;
  y0(2) = y0(5) = 1.0;
  const double speed = std::max(1.0, field_gradient(h, x0.coords).norm());
  const FlowResult r = integrate_flow(augmented_space(), field, Point{y0}, t, cfg, speed, true);

  FlowTrace out;
  out.start = x0;
  out.end = Point{r.end.coords.head(2)};
  out.tangent = Eigen::Map<const Mat>(r.end.coords.data() + 2, 2, 2);
  out.p_dq = r.end.coords(6);
  const double e0 = h(x0.coords).real();
  for (const Point& s : r.samples) {
    out.arc.push_back(Point{s.coords.head(2)});
    out.energy_drift = std::max(out.energy_drift, std::abs(h(s.coords.head(2).eval()).real() - e0));
    const Mat m = Eigen::Map<const Mat>(s.coords.data() + 2, 2, 2);
    out.focal_det.push_back((Mat::Identity(2, 2) + m).determinant());
  }
  return out;
}

FlowTrace chord_fixed_point(const FieldSymbol& h, const Point& x, double t, const EvolutionConfig& cfg) {
  require_plane(x, "chord_fixed_point");
  std::optional<FlowTrace> last;
  const auto trace_at = [&](const Vec& x0) -> const FlowTrace& {
    if (!last || last->start.coords != x0) last = hamilton_flow(h, Point{x0}, t, cfg.flow);
    return *last;
  };
  const auto check_focal = [&](const FlowTrace& tr) {
    const double d = (Mat::Identity(2, 2) + tr.tangent).determinant();
    if (std::abs(d) <= cfg.focal_threshold)
      throw FocalTime("chord map is degenerate (det(I + D gamma^t) = " + std::to_string(d) + ")");
  };
  check_focal(trace_at(x.coords));
  const VecFunction f = [&](const Vec& x0) { return ((x0 + trace_at(x0).end.coords) / 2.0 - x.coords).eval(); };
  const JacFunction jac = [&](const Vec& x0) {
    const FlowTrace& tr = trace_at(x0);
    check_focal(tr);
    return ((Mat::Identity(2, 2) + tr.tangent) / 2.0).eval();
  };
  const NewtonResult nr = newton_solve(f, x.coords, cfg.newton, jac);
  FlowTrace tr = trace_at(nr.x);
  check_focal(tr);
  const double miss = ((tr.start.coords + tr.end.coords) / 2.0 - x.coords).norm();
  if (miss > cfg.midpoint_tol)
    throw NewtonDiverged("chord_fixed_point: midpoint residual " + std::to_string(miss));
  return tr;
}

SymbolSample evolution_symbol(const FieldSymbol& h, const Point& x, double t, double hbar,
                              const EvolutionConfig& cfg) {
  if (!(hbar > 0.0)) throw DomainError("evolution_symbol: hbar must be positive");
  const FlowTrace tr = chord_fixed_point(h, x, t, cfg);
  if (t != 0.0 && focal_minimum(tr.focal_det) <= 1e-6)
    throw FocalTime("evolution_symbol: the arc passes a focal time; the branch is not continued");

  SymbolSample s;
  s.segment.x = x;
  s.segment.t = t;
  s.segment.x0 = tr.start;
  s.segment.arc = tr.arc;
  const Vec& a = tr.start.coords;
  const Vec& b = tr.end.coords;
  // arc followed by the straight chord back to the start
  s.segment.area = tr.p_dq + 0.5 * (a(1) + b(1)) * (a(0) - b(0));
  s.segment.h_arc = h(a).real();
  s.phase = (s.segment.area - t * s.segment.h_arc) / hbar;
  // det starts at 4 and stays positive on an uncrossed branch
  s.amplitude = 2.0 / std::sqrt(tr.focal_det.back());
  s.value = std::polar(s.amplitude, s.phase);
  return s;
}

FieldSymbol OracleHamiltonian::symbol() const {
  FieldSymbol out = FieldSymbol::from_poly(poly);
  for (const GaussianBump& b : bumps) {
    const FieldSymbol g = FieldSymbol::gaussian(b.center, b.sigma, b.weight);
    const FieldSymbol acc = out;
    out.value = [acc, g](const Vec& z) { return acc(z) + g(z); };
    out.gradient = [acc, g](const Vec& z) { return (acc.gradient(z) + g.gradient(z)).eval(); };
    out.hessian = [acc, g](const Vec& z) { return (acc.hessian(z) + g.hessian(z)).eval(); };
  }
  return out;
}

CMat OracleHamiltonian::shifted_operator(const Vec& x, double hbar, int dim) const {
  CMat op = hermite::weyl_operator(shifted(poly, x), hbar, dim);
  for (const GaussianBump& b : bumps) op += b.weight * hermite::gaussian_operator(b.center - x, b.sigma, hbar, dim);
  return op;
}

Complex oracle_symbol(const PolySymbol& h, const Vec& x, double t, double hbar, const OracleConfig& cfg) {
  if (h.vars() != 2) throw DomainError("oracle_symbol: flat R^2 only");
  return oracle_symbol(OracleHamiltonian{h, {}}, x, t, hbar, cfg);
}

OraclePropagator::OraclePropagator(const OracleHamiltonian& h, double t, double hbar, int dim)
    : hbar_(hbar), dim_(dim) {
  if (h.poly.vars() != 2) throw DomainError("OraclePropagator: flat R^2 only");
  if (dim < 16 || dim > 256) throw DomainError("OraclePropagator: dim must lie in [16, 256]");
  if (!(hbar > 0.0)) throw DomainError("OraclePropagator: hbar must be positive");
  const CMat hm = h.shifted_operator(Vec::Zero(2), hbar, dim);
  const Eigen::SelfAdjointEigenSolver<CMat> eig((hm + hm.adjoint()) / 2.0);
  CVec phases(dim);
  for (int k = 0; k < dim; ++k) phases(k) = std::exp(Complex(0.0, -t * eig.eigenvalues()(k) / hbar));
  u_ = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

Complex OraclePropagator::symbol(const Vec& x) const {
  if (x.size() != 2) throw DomainError("OraclePropagator: flat R^2 only");
  return tapered_parity(x, hbar_, dim_).cwiseProduct(u_.transpose()).sum();
}

Complex oracle_symbol(const OracleHamiltonian& h, const Vec& x, double t, double hbar, const OracleConfig& cfg) {
  if (x.size() != 2) throw DomainError("oracle_symbol: flat R^2 only");
  const Complex full = OraclePropagator(h, t, hbar, cfg.dim).symbol(x);
  if (cfg.verify) {
    const int other = 2 * cfg.dim <= 256 ? 2 * cfg.dim : cfg.dim / 2;
    const Complex ref = OraclePropagator(h, t, hbar, other).symbol(x);
    if (std::abs(full - ref) > cfg.truncation_tol * std::max(1.0, std::abs(full)))
      throw NumericalError("oracle_symbol: truncation not converged (change " +
                           std::to_string(std::abs(full - ref)) + " between dim " + std::to_string(cfg.dim) +
                           " and " + std::to_string(other) + ")");
  }
  return full;
}

}  // namespace etherstar
