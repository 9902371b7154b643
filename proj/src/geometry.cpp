#include "etherstar/geometry.hpp"

#include <cmath>
#include <sstream>

namespace etherstar {

namespace {

constexpr double kOnManifoldTol = 1e-12;

Connection zero_connection(int dim) {
  Connection c;
  c.gamma.assign(dim, Mat::Zero(dim, dim));
  return c;
}

}  // namespace

// ---- Connection ----------------------------------------------------------

double Connection::max_abs() const {
  double r = 0.0;
  for (const auto& g : gamma) r = std::max(r, g.cwiseAbs().maxCoeff());
  return r;
}

double Connection::max_abs_diff(const Connection& other) const {
  double r = 0.0;
  for (std::size_t l = 0; l < gamma.size(); ++l)
    r = std::max(r, (gamma[l] - other.gamma[l]).cwiseAbs().maxCoeff());
  return r;
}

double Connection::symmetry_defect() const {
  double r = 0.0;
  for (const auto& g : gamma) r = std::max(r, (g - g.transpose()).cwiseAbs().maxCoeff());
  return r;
}

// ---- ManifoldModel -------------------------------------------------------

void ManifoldModel::require_on(const Point& z) const {
  if (z.coords.size() != ambient_dim()) {
    std::ostringstream os;
    os << id() << ": point has " << z.coords.size() << " coordinates, expected " << ambient_dim();
    throw DomainError(os.str());
  }
  const double err = off_manifold(z.coords);
  if (!(err <= kOnManifoldTol)) {
    std::ostringstream os;
    os << id() << ": point off manifold by " << err;
    throw DomainError(os.str());
  }
}

double ManifoldModel::poisson(const Point& z, const Vec& grad_f, const Vec& grad_g) const {
  // {f,g} = X_g(f) with X_g^m = d_l g Psi^{lm}; that is df . Psi . dg.
  return -grad_f.dot(hamiltonian_vector(z, grad_g));
}

Vec cross3(const Vec& a, const Vec& b) {
  Vec r(3);
  r << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
  return r;
}

// ---- FlatModel -----------------------------------------------------------

FlatModel::FlatModel(int n) : n_(n), j_(Mat::Zero(2 * n, 2 * n)) {
  if (n < 1) throw DomainError("flat model needs n >= 1");
  j_.topRightCorner(n, n) = Mat::Identity(n, n);
  j_.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
}

std::string FlatModel::id() const { return "flat:" + std::to_string(n_); }

double FlatModel::off_manifold(const Vec& coords) const {
  return coords.allFinite() ? 0.0 : INFINITY;
}

Mat FlatModel::frame(const Point&) const { return Mat::Identity(2 * n_, 2 * n_); }

double FlatModel::omega(const Point&, const Vec& u, const Vec& w) const { return u.dot(j_ * w); }

Vec FlatModel::hamiltonian_vector(const Point&, const Vec& grad) const { return j_ * grad; }

Point FlatModel::reflect(const Point& x, const Point& z) const {
  return Point{2.0 * x.coords - z.coords};
}

Mat FlatModel::reflect_jacobian(const Point&, const Point&) const {
  return -Mat::Identity(2 * n_, 2 * n_);
}

Vec FlatModel::ether_form(const Point& x, const Point& z) const {
  return 2.0 * j_ * (z.coords - x.coords);
}

Vec FlatModel::ether_gradient(const Point&, const Vec& v, const Point&) const {
  return 2.0 * j_.transpose() * v;
}

Point FlatModel::chart_point(const Point& center, const Vec& s) const {
  return Point{center.coords + s};
}

Vec FlatModel::chart_coords(const Point& center, const Point& z) const {
  return z.coords - center.coords;
}

Mat FlatModel::chart_basis(const Point&, const Vec&) const {
  return Mat::Identity(2 * n_, 2 * n_);
}

Connection FlatModel::chart_christoffel(const Point&, const Vec&) const {
  return zero_connection(2 * n_);
}

// ---- SphereModel ---------------------------------------------------------

double SphereModel::off_manifold(const Vec& coords) const {
  if (coords.size() != 3 || !coords.allFinite()) return INFINITY;
  return std::abs(coords.norm() - 1.0);
}

Point SphereModel::project(const Vec& coords) const {
  const double r = coords.norm();
  if (!(r > 0.0)) throw DomainError("sphere: cannot project the origin");
  return Point{coords / r};
}

Vec SphereModel::tangent_project(const Point& z, const Vec& w) const {
  return w - z.coords * z.coords.dot(w);
}

Mat SphereModel::frame(const Point& z) const {
  const Vec& c = z.coords;
  int axis = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(c(i)) < std::abs(c(axis))) axis = i;
  Vec a = Vec::Zero(3);
  a(axis) = 1.0;
  Vec e1 = a - c * c.dot(a);
  e1.normalize();
  Mat f(3, 2);
  f.col(0) = e1;
  f.col(1) = cross3(e1, c);
  return f;
}

double SphereModel::omega(const Point& z, const Vec& u, const Vec& w) const {
  return -z.coords.dot(cross3(u, w));
}

Vec SphereModel::hamiltonian_vector(const Point& z, const Vec& grad) const {
  return cross3(z.coords, grad);
}

Point SphereModel::reflect(const Point& x, const Point& z) const {
  return Point{2.0 * x.coords.dot(z.coords) * x.coords - z.coords};
}

Mat SphereModel::reflect_jacobian(const Point& x, const Point&) const {
  return 2.0 * x.coords * x.coords.transpose() - Mat::Identity(3, 3);
}

Vec SphereModel::ether_form(const Point& x, const Point& z) const {
  return 2.0 * cross3(x.coords, z.coords);
}

Vec SphereModel::ether_gradient(const Point& x, const Vec& v, const Point&) const {
  return 2.0 * cross3(v, x.coords);
}

Point SphereModel::chart_point(const Point& center, const Vec& s) const {
  const Vec u = center.coords + frame(center) * s;
  return Point{u / u.norm()};
}

Vec SphereModel::chart_coords(const Point& center, const Point& z) const {
  const double d = center.coords.dot(z.coords);
  if (!(d > 1e-8)) throw DomainError("sphere: point outside the gnomonic chart hemisphere");
  return frame(center).transpose() * z.coords / d;
}

Mat SphereModel::chart_basis(const Point& center, const Vec& s) const {
  const Mat f = frame(center);
  const Vec u = center.coords + f * s;
  const double r = u.norm();
  const Vec phi = u / r;
  Mat e(3, 2);
  for (int k = 0; k < 2; ++k) e.col(k) = (f.col(k) - phi * phi.dot(f.col(k))) / r;
  return e;
}

Connection SphereModel::chart_christoffel(const Point&, const Vec& s) const {
  // Levi-Civita connection of the round metric in gnomonic coordinates.
  const double d = 1.0 + s.squaredNorm();
  Connection c = zero_connection(2);
  for (int l = 0; l < 2; ++l)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        c.gamma[l](j, k) = -(s(j) * (k == l ? 1.0 : 0.0) + s(k) * (j == l ? 1.0 : 0.0)) / d;
  return c;
}

// ---- factory -------------------------------------------------------------

ModelPtr make_model(const std::string& spec) {
  if (spec == "sphere") return std::make_shared<SphereModel>();
  if (spec.rfind("flat:", 0) == 0) {
    const std::string tail = spec.substr(5);
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(tail, &used);
    } catch (const std::exception&) {
      throw DomainError("bad manifold spec '" + spec + "'");
    }
    if (used != tail.size() || n < 1) throw DomainError("bad manifold spec '" + spec + "'");
    return std::make_shared<FlatModel>(n);
  }
  throw DomainError("unknown manifold '" + spec + "' (expected flat:<n> or sphere)");
}

// ---- operations ----------------------------------------------------------

FormMatrix omega_at(const ManifoldModel& m, const Point& z) {
  m.require_on(z);
  const Mat f = m.frame(z);
  const int d = m.dim();
  Mat w(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) w(j, k) = m.omega(z, f.col(j), f.col(k));
  return FormMatrix{w};
}

FormMatrix psi_at(const ManifoldModel& m, const Point& z) {
  const Mat w = omega_at(m, z).entries;
  Eigen::FullPivLU<Mat> lu(w);
  if (!lu.isInvertible()) throw NumericalError("psi_at: singular symplectic form");
  return FormMatrix{lu.inverse()};
}

Point reflect(const ManifoldModel& m, const Point& x, const Point& z) {
  m.require_on(x);
  m.require_on(z);
  return m.reflect(x, z);
}

CotangentVector ether_form(const ManifoldModel& m, const Point& x, const Point& z) {
  m.require_on(x);
  m.require_on(z);
  return CotangentVector{x, m.ether_form(x, z)};
}

Connection christoffel_at(const ManifoldModel& m, const Point& z) {
  m.require_on(z);
  return m.chart_christoffel(z, Vec::Zero(m.dim()));
}

Connection christoffel_at(const ManifoldModel& m, const Point& z, const Point& center) {
  m.require_on(z);
  return m.chart_christoffel(center, m.chart_coords(center, z));
}

Connection connection_from_reflections(const ManifoldModel& m, const Point& z, const Point& center,
                                       double step) {
  m.require_on(z);
  if (!m.has_analytic_reflection()) throw DomainError("model has no analytic reflection");
  if (!(step > 1e-7)) throw NumericalError("connection_from_reflections: step underflow");
  const int d = m.dim();
  const Vec s0 = m.chart_coords(center, z);
  auto s_of = [&](const Vec& s) { return m.chart_coords(center, m.reflect(z, m.chart_point(center, s))); };

  Connection c;
  c.gamma.assign(d, Mat::Zero(d, d));
  const Vec f0 = s_of(s0);
  const double h = step;
  for (int j = 0; j < d; ++j) {
    for (int k = j; k < d; ++k) {
      Vec second;
      if (j == k) {
        Vec sp = s0, sm = s0;
        sp(j) += h;
        sm(j) -= h;
        second = (s_of(sp) - 2.0 * f0 + s_of(sm)) / (h * h);
      } else {
        auto at = [&](double a, double b) {
          Vec s = s0;
          s(j) += a;
          s(k) += b;
          return s_of(s);
        };
        second = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
      }
      for (int l = 0; l < d; ++l) {
        c.gamma[l](j, k) = -0.5 * second(l);
        c.gamma[l](k, j) = -0.5 * second(l);
      }
    }
  }
  return c;
}

Connection connection_from_reflections(const ManifoldModel& m, const Point& z, double step) {
  return connection_from_reflections(m, z, z, step);
}

Mat chart_omega(const ManifoldModel& m, const Point& center, const Vec& s) {
  const Point p = m.chart_point(center, s);
  const Mat e = m.chart_basis(center, s);
  const int d = m.dim();
  Mat w(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) w(j, k) = m.omega(p, e.col(j), e.col(k));
  return w;
}

double covariant_omega_residual(const ManifoldModel& m, const Point& z, const Point& center,
                                double step) {
  m.require_on(z);
  const int d = m.dim();
  const Vec s0 = m.chart_coords(center, z);
  const Mat w = chart_omega(m, center, s0);
  const Connection g = m.chart_christoffel(center, s0);
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    auto at = [&](double t) {
      Vec s = s0;
      s(i) += t;
      return chart_omega(m, center, s);
    };
    // fourth-order central difference
    const Mat dw = (at(-2.0 * step) - 8.0 * at(-step) + 8.0 * at(step) - at(2.0 * step)) / (12.0 * step);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double r = dw(j, k);
        for (int l = 0; l < d; ++l) r -= g.gamma[l](j, i) * w(l, k) + g.gamma[l](k, i) * w(j, l);
        worst = std::max(worst, std::abs(r));
      }
  }
  return worst;
}

double liouville_density(const ManifoldModel& m, const Point& center, const Vec& s) {
  return std::sqrt(std::abs(chart_omega(m, center, s).determinant()));
}

Vec covector_from_chart(const ManifoldModel& m, const Point& center, const Vec& s, const Vec& eta) {
  const Point p = m.chart_point(center, s);
  const Mat f = m.frame(p);
  const Mat e = m.chart_basis(center, s);
  const Vec alpha = (e.transpose() * f).fullPivLu().solve(eta);
  return f * alpha;
}

}  // namespace etherstar
