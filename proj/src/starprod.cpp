#include "etherstar/starprod.hpp"

#include <cmath>
#include <numbers>

#include "etherstar/quadrature.hpp"

namespace etherstar {

void SeriesConfig::validate() const {
  if (!(hbar > 0.0)) throw DomainError("series: hbar must be positive");
  if (order < 0 || order > 2) throw DomainError("series: order must be 0, 1 or 2");
  if (!(first_step > 0.0) || !(second_step > 0.0)) throw DomainError("series: steps must be positive");
}

// ---- Moyal product on polynomials ------------------------------------------

namespace {

struct Edge {
  int a, b;
  double psi;
};

void moyal_terms(const std::vector<Edge>& edges, std::size_t e, int budget, int k, Complex coeff,
                 const PolySymbol& f, const PolySymbol& g, Complex step, PolySymbol& out) {
  if (f.empty() || g.empty()) return;
  if (e == edges.size()) {
    out = out + (f * g) * (coeff * std::pow(step, k));
    return;
  }
  PolySymbol fd = f, gd = g;
  Complex c = coeff;
  for (int ke = 0; ke <= budget; ++ke) {
    if (ke > 0) {
      fd = fd.derivative(edges[e].a);
      gd = gd.derivative(edges[e].b);
      c *= edges[e].psi / ke;
      if (fd.empty() || gd.empty()) break;
    }
    moyal_terms(edges, e + 1, budget - ke, k + ke, c, fd, gd, step, out);
  }
}

}  // namespace

PolySymbol moyal_poly(const PolySymbol& f, const PolySymbol& g, double hbar, int degree_cap) {
  if (f.vars() != g.vars() || f.vars() % 2) throw DomainError("moyal_poly: arity mismatch");
  if (f.degree() + g.degree() > degree_cap)
    throw DomainError("moyal_poly: product degree exceeds the cap of " + std::to_string(degree_cap));
  const FlatModel m(f.vars() / 2);
  const Mat psi = -m.J();
  std::vector<Edge> edges;
  for (int a = 0; a < psi.rows(); ++a)
    for (int b = 0; b < psi.cols(); ++b)
      if (psi(a, b) != 0.0) edges.push_back({a, b, psi(a, b)});
  PolySymbol out(f.vars());
  moyal_terms(edges, 0, std::min(f.degree(), g.degree()), 0, 1.0, f, g, Complex(0.0, -0.5 * hbar), out);
  return out;
}

// ---- covariant series ----------------------------------------------------

ChartJet chart_jet(const ManifoldModel& m, const FieldSymbol& f, const Point& z, const SeriesConfig& cfg) {
  m.require_on(z);
  const int d = m.dim();
  ChartJet jet{f(z), CVec(d), CMat(d, d)};
  if (cfg.mode == DerivativeMode::analytic) {
    if (!f.has_derivatives()) throw DomainError("series: analytic derivatives unavailable");
    const Mat fr = m.frame(z);
    const CMat frc = fr.cast<Complex>();
    const CVec g = f.gradient(z.coords);
    jet.gradient = frc.transpose() * g;
    jet.hessian = frc.transpose() * f.hessian(z.coords) * frc;
    // Second derivative of the gnomonic chart map at its centre is -z I.
    if (m.kind() == ModelKind::sphere)
      jet.hessian -= (z.coords.cast<Complex>().dot(g)) * CMat::Identity(d, d);
    return jet;
  }
  const auto at = [&](const Vec& s) { return f(m.chart_point(z, s)); };
  const double h1 = cfg.first_step, h2 = cfg.second_step;
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e(i) = h1;
    jet.gradient(i) = (at(e) - at(-e)) / (2.0 * h1);
  }
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Vec ei = Vec::Zero(d), ej = Vec::Zero(d);
      ei(i) = h2;
      ej(j) = h2;
      Complex v;
      if (i == j)
        v = (at(ei) - 2.0 * jet.value + at(-ei)) / (h2 * h2);
      else
        v = (at(ei + ej) - at(ei - ej) - at(ej - ei) + at(-ei - ej)) / (4.0 * h2 * h2);
      jet.hessian(i, j) = jet.hessian(j, i) = v;
    }
  return jet;
}

namespace {

CMat covariant_hessian(const ManifoldModel& m, const Point& z, const ChartJet& jet) {
  const Connection gam = m.chart_christoffel(z, Vec::Zero(m.dim()));
  CMat h = jet.hessian;
  for (std::size_t l = 0; l < gam.gamma.size(); ++l) h -= gam.gamma[l].cast<Complex>() * jet.gradient(l);
  return h;
}

Complex coefficient(const ManifoldModel& m, const Point& z, const ChartJet& jf, const ChartJet& jg, int k) {
  const CMat psi = chart_omega(m, z, Vec::Zero(m.dim())).inverse().cast<Complex>();
  if (k == 1) return Complex(0.0, -0.5) * jf.gradient.transpose() * psi * jg.gradient;
  const CMat a = covariant_hessian(m, z, jf), b = covariant_hessian(m, z, jg);
  return -0.125 * (psi.transpose() * a * psi).cwiseProduct(b).sum();
}

}  // namespace

Complex series_coefficient(const ManifoldModel& m, const FieldSymbol& f, const FieldSymbol& g,
                           const Point& z, int k, const SeriesConfig& cfg) {
  if (k != 1 && k != 2) throw DomainError("series_coefficient: k must be 1 or 2");
  return coefficient(m, z, chart_jet(m, f, z, cfg), chart_jet(m, g, z, cfg), k);
}

Complex series_product(const ManifoldModel& m, const FieldSymbol& f, const FieldSymbol& g,
                       const Point& z, const SeriesConfig& cfg) {
  cfg.validate();
  if (cfg.order == 0) return f(z) * g(z);
  const ChartJet jf = chart_jet(m, f, z, cfg), jg = chart_jet(m, g, z, cfg);
  Complex r = jf.value * jg.value + cfg.hbar * coefficient(m, z, jf, jg, 1);
  if (cfg.order == 2) r += cfg.hbar * cfg.hbar * coefficient(m, z, jf, jg, 2);
  return r;
}

// ---- quadrature ----------------------------------------------------------

namespace {

struct Axis {
  std::vector<double> x;  // nodes
  std::vector<double> w;  // weights for a plain integral over the line
};

// `rule` carries exp(xi^2)-scaled weights.

Axis hermite_axis(const GaussRule& rule, double center, double sigma) {
  Axis a;
  const double s = std::sqrt(2.0) * sigma;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double xi = rule.nodes[i];
    a.x.push_back(center + s * xi);
    a.w.push_back(s * rule.weights[i]);
  }
  return a;
}

void require_plane(const FieldSymbol& f, const char* what) {
  if (!f.envelope) throw DomainError(std::string(what) + ": symbol has no declared Gaussian decay");
  if (f.envelope->center.size() != 2) throw DomainError(std::string(what) + ": only flat R^2 is supported");
}

// orient = -1 evaluates g * f with the roles of the two arguments swapped,
// for when only the second factor carries an envelope.
Complex quad_once(const FieldSymbol& f, const FieldSymbol& g, const Vec& z, double hbar, int nodes,
                  double orient = 1.0) {
  const GaussRule rule = gauss_hermite_scaled(nodes);
  const GaussianEnvelope& ef = *f.envelope;
  const Axis uq = hermite_axis(rule, ef.center(0) - z(0), ef.sigma);
  const Axis up = hermite_axis(rule, ef.center(1) - z(1), ef.sigma);

  // Decay of the inner oscillatory integral in w, combined with g's envelope.
  const double si = hbar / (2.0 * ef.sigma);
  double sw = si;
  Vec cw = Vec::Zero(2);
  if (g.envelope) {
    const double sg = g.envelope->sigma;
    sw = 1.0 / std::sqrt(1.0 / (si * si) + 1.0 / (sg * sg));
    cw = (g.envelope->center - z) * (sw * sw) / (sg * sg);
  }
  // The inner sum sees a frequency proportional to the outer node, so the
  // outer rule stays coarser than the inner one to keep it resolved.
  const GaussRule outer = gauss_hermite_scaled(std::max(12, nodes / 3));
  const Axis wq = hermite_axis(outer, cw(0), sw);
  const Axis wp = hermite_axis(outer, cw(1), sw);

  const int n = nodes;
  const int m = static_cast<int>(outer.nodes.size());
  CMat fm(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      fm(a, b) = uq.w[a] * up.w[b] * f(Vec{{z(0) + uq.x[a], z(1) + up.x[b]}});
  // exp((2i/hbar) omega(u, w)) = exp((2i/hbar) u_q w_p) exp(-(2i/hbar) u_p w_q)
  const double k = orient * 2.0 / hbar;
  CMat e1(n, m), e2(n, m);
  for (int a = 0; a < n; ++a)
    for (int d = 0; d < m; ++d) e1(a, d) = std::exp(Complex(0.0, k * uq.x[a] * wp.x[d]));
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < m; ++c) e2(b, c) = std::exp(Complex(0.0, -k * up.x[b] * wq.x[c]));
  const CMat inner = e1.transpose() * fm * e2;  // inner(d, c) = I(w_q[c], w_p[d])
  Complex total = 0.0;
  for (int c = 0; c < m; ++c)
    for (int d = 0; d < m; ++d)
      total += wq.w[c] * wp.w[d] * inner(d, c) * g(Vec{{z(0) + wq.x[c], z(1) + wp.x[d]}});
  const double mu2 = 4.0;
  return mu2 * total / std::pow(2.0 * std::numbers::pi * hbar, 2);
}

template <class F>
Complex converged(F&& eval, const QuadConfig& cfg, const char* what) {
  if (cfg.nodes < 2) throw DomainError(std::string(what) + ": need at least 2 nodes");
  Complex prev = eval(cfg.nodes);
  if (!cfg.verify) return prev;
  int nodes = cfg.nodes;
  for (int r = 0; r < cfg.max_doublings; ++r) {
    nodes *= 2;
    const Complex next = eval(nodes);
    if (std::abs(next - prev) <= cfg.tolerance * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  throw QuadratureError(std::string(what) + ": no agreement under node doubling");
}

}  // namespace

Complex quad_product(const FieldSymbol& f, const FieldSymbol& g, const Point& z, double hbar,
                     const QuadConfig& cfg) {
  const bool swap = !f.envelope && g.envelope;
  require_plane(swap ? g : f, "quad_product");
  if (z.coords.size() != 2) throw DomainError("quad_product: only flat R^2 is supported");
  if (hbar < 0.05) throw DomainError("quad_product: hbar below the oscillation budget (0.05)");
  return converged(
      [&](int n) { return swap ? quad_once(g, f, z.coords, hbar, n, -1.0) : quad_once(f, g, z.coords, hbar, n); },
      cfg, "quad_product");
}

FieldSymbol quad_product_symbol(const FieldSymbol& f, const FieldSymbol& g, double hbar,
                                const QuadConfig& cfg) {
  const bool swap = !f.envelope && g.envelope;
  require_plane(swap ? g : f, "quad_product_symbol");
  FieldSymbol out;
  GaussianEnvelope env = swap ? *g.envelope : *f.envelope;
  if (f.envelope && g.envelope) {
    const double a = env.sigma * env.sigma, b = g.envelope->sigma * g.envelope->sigma;
    env.center = (b * env.center + a * g.envelope->center) / (a + b);
    env.sigma = std::sqrt(a * b / (a + b));
  }
  out.envelope = env;
  out.value = [f, g, hbar, cfg](const Vec& x) { return quad_product(f, g, Point{x}, hbar, cfg); };
  return out;
}

Complex gaussian_integral(const FieldSymbol& f, const QuadConfig& cfg) {
  require_plane(f, "gaussian_integral");
  const GaussianEnvelope& e = *f.envelope;
  const auto once = [&](int n) {
    const GaussRule rule = gauss_hermite_scaled(n);
    const Axis q = hermite_axis(rule, e.center(0), e.sigma);
    const Axis p = hermite_axis(rule, e.center(1), e.sigma);
    Complex s = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) s += q.w[a] * p.w[b] * f(Vec{{q.x[a], p.x[b]}});
    return s;
  };
  return converged(once, cfg, "gaussian_integral");
}

// ---- germ ----------------------------------------------------------------

FieldSymbol ether_component(const ManifoldModel& m, const Point& x, int j) {
  const Vec e = m.frame(x).col(j);
  const ManifoldModel* mp = &m;
  FieldSymbol h;
  h.value = [mp, x, e](const Vec& z) { return Complex(e.dot(mp->ether_form(x, Point{z}))); };
  h.gradient = [mp, x, e](const Vec& z) { return mp->ether_gradient(x, e, Point{z}).cast<Complex>().eval(); };
  h.hessian = [mp, x, e](const Vec& z) {
    const int n = static_cast<int>(z.size());
    const double step = 1e-5;
    CMat hm(n, n);
    for (int i = 0; i < n; ++i) {
      Vec zp = z, zm = z;
      zp(i) += step;
      zm(i) -= step;
      hm.col(i) = ((mp->ether_gradient(x, e, Point{zp}) - mp->ether_gradient(x, e, Point{zm})) / (2.0 * step))
                      .cast<Complex>();
    }
    return CMat((hm + hm.transpose()) / 2.0);
  };
  return h;
}

double germ_residual(const ManifoldModel& m, const FieldSymbol& f, const Point& x, const SeriesConfig& cfg) {
  cfg.validate();
  const ChartJet jf = chart_jet(m, f, x, cfg);
  double worst = 0.0;
  for (int j = 0; j < m.dim(); ++j) {
    const Complex lhs = Complex(0.0, cfg.hbar) * jf.gradient(j);
    const Complex rhs = series_product(m, f, ether_component(m, x, j), x, cfg);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace etherstar
