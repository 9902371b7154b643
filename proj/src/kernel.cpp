#include "etherstar/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace etherstar {

namespace {

Point triple_map(const ManifoldModel& m, const Point& x, const Point& y, const Point& z,
                 const Point& q) {
  return m.reflect(z, m.reflect(x, m.reflect(y, q)));
}

Mat triple_jacobian(const ManifoldModel& m, const Point& x, const Point& y, const Point& z,
                    const Point& b) {
  const Point sy = m.reflect(y, b);
  const Point sx = m.reflect(x, sy);
  const Mat d = m.reflect_jacobian(z, sx) * m.reflect_jacobian(x, sy) * m.reflect_jacobian(y, b);
  const Mat f = m.frame(b);
  return f.transpose() * d * f;
}

double focal_determinant(const ManifoldModel& m, const Point& x, const Point& y, const Point& z,
                         const Point& b) {
  const Mat d = triple_jacobian(m, x, y, z, b);
  return (Mat::Identity(d.rows(), d.cols()) - d).determinant();
}

Point flat_guess(const ManifoldModel& m, const Point& x, const Point& y, const Point& z) {
  const Vec g = y.coords - x.coords + z.coords;
  if (m.kind() == ModelKind::sphere && g.norm() < 1e-8) return y;
  return m.project(g);
}

struct Root {
  Point b;
  int iterations = 0;
  double residual = 0.0;
};

// Newton on the fixed-point equation with a chart retraction at each iterate.
Root newton_fixed_point(const ManifoldModel& m, const Point& x, const Point& y, const Point& z,
                        Point p) {
  const NewtonOptions opts;
  const double max_step = m.kind() == ModelKind::sphere ? 0.5 : 1e300;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Mat f = m.frame(p);
    const Point base = p;
    const auto r = [&](const Vec& s) {
      const Point q = m.chart_point(base, s);
      return (f.transpose() * (triple_map(m, x, y, z, q).coords - q.coords)).eval();
    };
    const Vec zero = Vec::Zero(m.dim());
    const Vec r0 = r(zero);
    const Mat jac = fd_jacobian(r, zero, opts.fd_step);
    Eigen::FullPivLU<Mat> lu(jac);
    if (!lu.isInvertible()) throw FocalTriple("solve_triangle: singular linearization");
    Vec step = -lu.solve(r0);
    if (!step.allFinite()) throw NewtonDiverged("solve_triangle: non-finite Newton step");
    if (step.norm() > max_step) step *= max_step / step.norm();
    p = m.chart_point(base, step);
    if (step.norm() <= opts.step_tol * std::max(1.0, p.coords.norm())) {
      const double res = (triple_map(m, x, y, z, p).coords - p.coords).norm();
      if (res > 1e-9) throw NewtonDiverged("solve_triangle: converged to a non-fixed point");
      return Root{p, it, res};
    }
  }
  throw NewtonDiverged("solve_triangle: no convergence in 50 iterations");
}

TriangleSolution finish(const ManifoldModel& m, const Point& x, const Point& y, const Point& z,
                        const Root& root, int branch) {
  TriangleSolution t{x, y, z, m.reflect(y, root.b), root.b, m.reflect(z, root.b), branch,
                     root.iterations, root.residual, 0.0};
  t.focal_det = focal_determinant(m, x, y, z, root.b);
  if (std::abs(t.focal_det) <= kFocalThreshold)
    throw FocalTriple("solve_triangle: fixed point is not isolated (focal triple)");
  return t;
}

double sphere_solid_angle(const Vec& a, const Vec& b, const Vec& c) {
  const double num = a.dot(cross3(b, c));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

Mat ether_jacobian(const ManifoldModel& m, const Point& x, const Point& b) {
  // (i, j) = d/d b_j of the i-th frame component of H_x(b).
  const Mat fx = m.frame(x), fb = m.frame(b);
  Mat d(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i) d.row(i) = (m.ether_gradient(x, fx.col(i), b).transpose() * fb);
  return d;
}

}  // namespace

TriangleSolution solve_triangle(const ManifoldModel& m, const Point& x, const Point& y,
                                const Point& z, int branch, const std::optional<Point>& guess) {
  m.require_on(x);
  m.require_on(y);
  m.require_on(z);
  const int branches = m.kind() == ModelKind::sphere ? 2 : 1;
  if (branch < 0 || branch >= branches) throw DomainError("solve_triangle: no such branch");
  const Point b0 = guess ? *guess : flat_guess(m, x, y, z);
  Root root;
  try {
    root = newton_fixed_point(m, x, y, z, b0);
  } catch (const NewtonDiverged&) {
    if (m.kind() != ModelKind::sphere) throw;
    root = newton_fixed_point(m, x, y, z, m.project(-b0.coords));
  }
  if (m.kind() == ModelKind::sphere) {
    // Fixed points of a nontrivial rotation are +-axis; orient towards b0.
    if (root.b.coords.dot(b0.coords) < 0.0) root.b.coords = -root.b.coords;
    if (branch == 1) root = newton_fixed_point(m, x, y, z, m.project(-root.b.coords));
  }
  return finish(m, x, y, z, root, branch);
}

std::vector<TriangleSolution> enumerate_branches(const ManifoldModel& m, const Point& x,
                                                 const Point& y, const Point& z) {
  const Point b0 = flat_guess(m, x, y, z);
  std::vector<Point> seeds{b0};
  if (m.kind() == ModelKind::sphere) {
    seeds.push_back(m.project(-b0.coords));
    for (int i = 0; i < 3; ++i)
      for (double sg : {1.0, -1.0}) {
        Vec e = Vec::Zero(3);
        e(i) = sg;
        seeds.push_back(Point{e});
      }
  }
  std::vector<Root> roots;
  for (const Point& s : seeds) {
    Root r;
    try {
      r = newton_fixed_point(m, x, y, z, s);
    } catch (const NewtonDiverged&) {
      continue;
    }
    const bool seen = std::any_of(roots.begin(), roots.end(), [&](const Root& o) {
      return (o.b.coords - r.b.coords).norm() < 1e-6;
    });
    if (!seen) roots.push_back(r);
  }
  if (roots.empty()) throw NewtonDiverged("enumerate_branches: no fixed point found");
  std::stable_sort(roots.begin(), roots.end(), [&](const Root& p, const Root& q) {
    return (p.b.coords - b0.coords).norm() < (q.b.coords - b0.coords).norm();
  });
  std::vector<TriangleSolution> out;
  for (std::size_t i = 0; i < roots.size(); ++i)
    out.push_back(finish(m, x, y, z, roots[i], static_cast<int>(i)));
  return out;
}

namespace {

struct Side {
  const Point& mid;
  const Point& from;
  Vec w;  // log of the far vertex at mid, ambient components
};

std::vector<Side> membrane_sides(const ManifoldModel& m, const TriangleSolution& tri, const FlowConfig& cfg) {
  const Point* s[3][3] = {{&tri.y, &tri.a, &tri.b}, {&tri.z, &tri.b, &tri.c}, {&tri.x, &tri.c, &tri.a}};
  std::vector<Side> out;
  for (const auto& [mid, from, to] : s) {
    try {
      out.push_back({*mid, *from, m.tangent_project(*mid, log_map(m, *mid, *to, cfg).comps)});
    } catch (const DomainError& e) {
      throw MembraneError(std::string("membrane side: ") + e.what());
    }
  }
  return out;
}

// Each side is one flow of w . H_mid from its first vertex over unit time,
// sampled at k evenly spaced times.
std::vector<Point> sample_sides(const ManifoldModel& m, const std::vector<Side>& sides, int k, FlowConfig cfg) {
  if (k < 2) throw DomainError("membrane_boundary: need at least 2 samples per side");
  cfg.step_multiple = k;
  std::vector<Point> pts;
  for (const Side& s : sides) {
    const VectorField field = [&](const Point& z, double) {
      return m.hamiltonian_vector(z, m.ether_gradient(s.mid, s.w, z));
    };
    const FlowResult r = integrate_flow(m, field, s.from, 1.0, cfg, 2.0 * std::max(s.w.norm(), 1e-3), true);
    const int stride = r.steps / k;
    pts.push_back(s.from);
    for (int i = 1; i < k; ++i) pts.push_back(r.samples[static_cast<std::size_t>(i * stride)]);
  }
  return pts;
}

}  // namespace

std::vector<Point> membrane_boundary(const ManifoldModel& m, const TriangleSolution& tri, int k,
                                     const FlowConfig& cfg) {
  if (k < 2) throw DomainError("membrane_boundary: need at least 2 samples per side");
  return sample_sides(m, membrane_sides(m, tri, cfg), k, cfg);
}

double fan_area(const ManifoldModel& m, const std::vector<Point>& boundary,
                const std::optional<Point>& apex) {
  if (boundary.size() < 3) return 0.0;
  Vec mean = Vec::Zero(boundary.front().coords.size());
  for (const Point& p : boundary) mean += p.coords;
  mean /= static_cast<double>(boundary.size());
  const std::size_t n = boundary.size();
  double total = 0.0;
  if (m.kind() == ModelKind::flat) {
    const Vec c = apex ? apex->coords : mean;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec& p = boundary[i].coords;
      const Vec& q = boundary[(i + 1) % n].coords;
      total += 0.5 * m.omega(boundary[i], p - c, q - c);
    }
    return total;
  }
  if (!apex && mean.norm() < 1e-6) throw MembraneError("membrane: fan apex undefined");
  const Vec c = apex ? apex->coords : Vec(mean.normalized());
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& p = boundary[i].coords;
    if (p.dot(c) < -1.0 + 1e-6) throw MembraneError("membrane: boundary passes the fan antipode");
    // omega_z(u, w) = -z . (u x w): minus the solid angle.
    total -= sphere_solid_angle(c, p, boundary[(i + 1) % n].coords);
  }
  return total;
}

double phase(const ManifoldModel& m, const TriangleSolution& tri, const MembraneConfig& cfg) {
  const std::vector<Side> sides = membrane_sides(m, tri, cfg.flow);
  int k = cfg.samples_per_side;
  double prev = fan_area(m, sample_sides(m, sides, k, cfg.flow));
  for (int r = 0; r < cfg.max_refinements; ++r) {
    k *= 2;
    const double next = fan_area(m, sample_sides(m, sides, k, cfg.flow));
    if (std::abs(next - prev) <= cfg.rel_tol * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  throw MembraneError("membrane area did not converge under side refinement");
}

double amplitude(const ManifoldModel& m, const TriangleSolution& tri) {
  const double det = focal_determinant(m, tri.x, tri.y, tri.z, tri.b);
  if (det <= 1e-12) throw FocalTriple("amplitude: degenerate determinant");
  const double mu = std::pow(2.0, m.n());
  return std::pow(2.0, m.n()) * mu * mu / std::sqrt(det);
}

double amplitude_reflection_free(const ManifoldModel& m, const TriangleSolution& tri, double step) {
  const int d = m.dim();
  const Mat fz = m.frame(tri.z);
  Mat mixed(d, d);  // (i, j) = d/dy_j of the i-th frame component of D_z Phi = H_z(c)
  for (int j = 0; j < d; ++j) {
    Vec col = Vec::Zero(d);
    for (double sg : {1.0, -1.0}) {
      Vec s = Vec::Zero(d);
      s(j) = sg * step;
      const TriangleSolution t =
          solve_triangle(m, tri.x, m.chart_point(tri.y, s), tri.z, 0, tri.b);
      col += sg * fz.transpose() * m.ether_form(tri.z, t.c);
    }
    mixed.col(j) = col / (2.0 * step);
  }
  const double det_omega = chart_omega(m, tri.b, Vec::Zero(d)).determinant();
  const double ratio = mixed.determinant() * det_omega /
                       (ether_jacobian(m, tri.y, tri.b).determinant() *
                        ether_jacobian(m, tri.z, tri.b).determinant());
  const double mu = std::pow(2.0, m.n());
  return std::pow(2.0, m.n()) * mu * mu * std::sqrt(std::abs(ratio));
}

KernelValue kernel_value(const ManifoldModel& m, const Point& x, const Point& y, const Point& z,
                         double hbar, int branch, const MembraneConfig& cfg) {
  if (!(hbar > 0.0)) throw DomainError("kernel_value: hbar must be positive");
  const TriangleSolution t = solve_triangle(m, x, y, z, branch);
  KernelValue k;
  k.phase = phase(m, t, cfg);
  k.amplitude = amplitude(m, t);
  k.hbar = hbar;
  k.branch_id = branch;
  k.value = k.amplitude * std::exp(Complex(0.0, k.phase / hbar));
  return k;
}

double flat_phase(const FlatModel& m, const Point& x, const Point& y, const Point& z) {
  return 2.0 * m.omega(z, x.coords - z.coords, y.coords - z.coords);
}

double phase_gradient_residual(const ManifoldModel& m, const Point& x, const Point& y,
                               const Point& z, double step, const MembraneConfig& cfg) {
  const TriangleSolution base = solve_triangle(m, x, y, z, 0);
  const int d = m.dim();
  const Point* slots[3] = {&base.x, &base.y, &base.z};
  const Point* verts[3] = {&base.a, &base.b, &base.c};
  double worst = 0.0;
  for (int slot = 0; slot < 3; ++slot) {
    const Vec rhs = m.to_frame(*slots[slot], m.ether_form(*slots[slot], *verts[slot]));
    for (int j = 0; j < d; ++j) {
      double diff = 0.0;
      for (double sg : {1.0, -1.0}) {
        Vec s = Vec::Zero(d);
        s(j) = sg * step;
        Point p[3] = {base.x, base.y, base.z};
        p[slot] = m.chart_point(*slots[slot], s);
        const TriangleSolution t = solve_triangle(m, p[0], p[1], p[2], 0, base.b);
        diff += sg * phase(m, t, cfg);
      }
      worst = std::max(worst, std::abs(diff / (2.0 * step) - rhs(j)));
    }
  }
  return worst;
}

namespace {

Vec unit(int d, int k) {
  Vec v = Vec::Zero(d);
  v(k) = 1.0;
  return v;
}

// Central first difference of a vector-valued f along each unit direction.
Mat gradient(const std::function<Vec(const Vec&)>& f, int d, double h) {
  Mat out;
  for (int k = 0; k < d; ++k) {
    const Vec col = (f(h * unit(d, k)) - f(-h * unit(d, k))) / (2.0 * h);
    if (k == 0) out.resize(col.size(), d);
    out.col(k) = col;
  }
  return out;
}

// Mixed central difference d^2 f / du_k dv_l for f(u, v), one matrix per output.
std::vector<Mat> mixed(const std::function<Vec(const Vec&, const Vec&)>& f, int d, double h) {
  std::vector<Mat> out;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const Vec ek = h * unit(d, k), el = h * unit(d, l);
      const Vec v = (f(ek, el) - f(ek, -el) - f(-ek, el) + f(-ek, -el)) / (4.0 * h * h);
      if (out.empty()) out.assign(v.size(), Mat::Zero(d, d));
      for (int j = 0; j < v.size(); ++j) out[j](k, l) = v(j);
    }
  return out;
}

}  // namespace

double transport_residual(const ManifoldModel& m, const Point& x, const Point& y, const Point& z,
                          const TransportSteps& steps, const MembraneConfig& cfg) {
  const int d = m.dim();
  const Vec o = Vec::Zero(d);
  const TriangleSolution base = solve_triangle(m, x, y, z, 0);
  // finite differences of the phase need it far below the step squared
  MembraneConfig tight = cfg;
  tight.rel_tol = std::min(cfg.rel_tol, 1e-13);
  tight.max_refinements = std::max(cfg.max_refinements, 8);
  const auto tri = [&](const Vec& sx, const Vec& sz) {
    return solve_triangle(m, m.chart_point(x, sx), y, m.chart_point(z, sz), 0, base.b);
  };
  const auto big_phi = [&](const Vec& sx, const Vec& sz) { return phase(m, tri(sx, sz), tight); };
  const auto amp = [&](const Vec& sx, const Vec& sz) { return amplitude(m, tri(sx, sz)); };
  const auto scalar = [](double v) { return Vec::Constant(1, v); };

  // l(z', xi): the point w with H_{z'}(w) = xi, xi in chart components at z'
  const auto ell = [&](const Vec& sz, const Vec& xi) {
    const Point zp = m.chart_point(z, sz);
    return ell_invert(m, zp, CotangentVector{zp, covector_from_chart(m, z, sz, xi)});
  };
  // chart components of H_p(w) at the chart point sp around c
  const auto form = [&](const Point& c, const Vec& sp, const Point& w) {
    return Vec(m.chart_basis(c, sp).transpose() * m.ether_form(m.chart_point(c, sp), w));
  };

  const double h = steps.first, g = steps.symbol;
  const Vec dx_amp = gradient([&](const Vec& s) { return scalar(amp(s, o)); }, d, h).row(0).transpose();
  const Vec dz_amp = gradient([&](const Vec& s) { return scalar(amp(o, s)); }, d, h).row(0).transpose();
  const Vec xi = gradient([&](const Vec& s) { return scalar(big_phi(o, s)); }, d, h).row(0).transpose();
  const Mat phi_zz = mixed([&](const Vec& u, const Vec& v) { return scalar(big_phi(o, u + v)); }, d, steps.second)[0];
  const double phi = amp(o, o);

  // L_x(z', xi') with x fixed at the chart centre
  const auto lifted = [&](const Vec& sz, const Vec& xi_) { return form(x, o, ell(sz, xi_)); };
  const Mat l_xi = gradient([&](const Vec& e) { return lifted(o, xi + e); }, d, g);  // (j, k)
  const std::vector<Mat> l_xixi = mixed([&](const Vec& a, const Vec& b) { return lifted(o, xi + a + b); }, d, g);
  const std::vector<Mat> l_zxi = mixed([&](const Vec& a, const Vec& b) { return lifted(a, xi + b); }, d, g);

  // sum_k d_xi_k [d_k H_z(w)_s] with w = l(z, xi) held fixed under d_k
  Vec inner = Vec::Zero(d);
  for (int k = 0; k < d; ++k) {
    const auto dk = [&](const Vec& xi_) {
      const Point w = ell(o, xi_);
      return Vec((form(z, g * unit(d, k), w) - form(z, -g * unit(d, k), w)) / (2.0 * g));
    };
    inner += (dk(xi + g * unit(d, k)) - dk(xi - g * unit(d, k))) / (2.0 * g);
  }
  const Vec a = l_xi * inner;

  double worst = 0.0;
  for (int j = 0; j < d; ++j) {
    const double t = dx_amp(j) + l_xi.row(j).dot(dz_amp) +
                     0.5 * ((l_xixi[j] * phi_zz).trace() + l_zxi[j].trace()) * phi + 0.5 * a(j) * phi;
    worst = std::max(worst, std::abs(t));
  }
  return worst;
}

}  // namespace etherstar
