#include "etherstar/checks.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "etherstar/evolution.hpp"
#include "etherstar/kernel.hpp"
#include "etherstar/sampling.hpp"
#include "etherstar/starprod.hpp"

namespace etherstar {

bool SuiteReport::passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

namespace {

// FNV-1a, so each check draws from its own stream regardless of filtering.
std::uint64_t stream_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (unsigned char ch : name) h = (h ^ ch) * 1099511628211ull;
  return h;
}

class Runner {
 public:
  Runner(SuiteReport& report, const CheckConfig& cfg) : report_(report), cfg_(cfg) {}

  void run(const std::string& name, double tol, int count, const std::function<double(Sampler&)>& sample) {
    if (!cfg_.only.empty() && name.rfind(cfg_.only, 0) != 0) return;
    CheckResult r;
    r.name = name;
    r.tolerance = tol;
    Sampler s(stream_seed(cfg_.seed, name));
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < count; ++i) {
      try {
        const double v = sample(s);
        r.max_residual = std::isnan(v) ? std::numeric_limits<double>::infinity() : std::max(r.max_residual, v);
        ++r.samples;
      } catch (const FocalTriple&) {
        ++r.skipped;
      } catch (const NumericalError& e) {
        r.max_residual = std::numeric_limits<double>::infinity();
        ++r.samples;
        if (r.note.empty()) r.note = e.what();
      }
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.passed = r.samples > 0 && r.max_residual <= tol;
    if (r.samples == 0 && r.note.empty()) r.note = "every sample was focal";
    report_.checks.push_back(std::move(r));
  }

 private:
  SuiteReport& report_;
  const CheckConfig& cfg_;
};

double frame_symplectic_defect(const ManifoldModel& m, const Point& x, const Point& z) {
  const Point sz = m.reflect(x, z);
  const Mat a = m.frame(sz).transpose() * m.reflect_jacobian(x, z) * m.frame(z);
  const int d = m.dim();
  Mat j = Mat::Zero(d, d);
  j.topRightCorner(d / 2, d / 2) = Mat::Identity(d / 2, d / 2);
  j.bottomLeftCorner(d / 2, d / 2) = -Mat::Identity(d / 2, d / 2);
  return (a.transpose() * j * a - j).cwiseAbs().maxCoeff();
}

PolySymbol random_poly(Sampler& s, int vars, int degree) {
  PolySymbol p(vars);
  PolySymbol::MultiIndex mi(vars, 0);
  // all multi-indices of total degree <= degree
  std::function<void(int, int)> fill = [&](int v, int left) {
    if (v == vars) {
      p.add(mi, Complex(s.uniform(-1, 1), s.uniform(-1, 1)));
      return;
    }
    for (int e = 0; e <= left; ++e) {
      mi[v] = e;
      fill(v + 1, left - e);
    }
    mi[v] = 0;
  };
  fill(0, degree);
  return p;
}

PolySymbol oscillator() {
  PolySymbol h(2);
  h.add({2, 0}, 0.5);
  h.add({0, 2}, 0.5);
  return h;
}

}  // namespace

SuiteReport run_checks(const ManifoldModel& m, const CheckConfig& cfg) {
  if (cfg.samples < 1) throw DomainError("run_checks: samples must be positive");
  if (!(cfg.hbar > 0.0)) throw DomainError("run_checks: hbar must be positive");
  SuiteReport rep;
  rep.manifold = m.id();
  rep.seed = cfg.seed;
  rep.hbar = cfg.hbar;
  Runner run(rep, cfg);
  const int n = cfg.samples;
  const int few = std::max(1, n / 4);
  const bool flat = m.kind() == ModelKind::flat;
  const bool plane = flat && m.n() == 1;

  // ---- geometry ----
  run.run("geometry.reflection_involution", 1e-8, n, [&](Sampler& s) {
    const Point x = s.point(m), z = s.point(m);
    return (m.reflect(x, m.reflect(x, z)).coords - z.coords).norm();
  });
  run.run("geometry.reflection_fixed_point", 1e-8, n, [&](Sampler& s) {
    const Point x = s.point(m);
    return (m.reflect(x, x).coords - x.coords).norm();
  });
  run.run("geometry.reflection_symplectic", 1e-8, n, [&](Sampler& s) {
    const Point x = s.point(m), z = s.point(m);
    return frame_symplectic_defect(m, x, z);
  });
  run.run("geometry.ether_odd_under_reflection", 1e-8, n, [&](Sampler& s) {
    const Point x = s.point(m), z = s.point(m);
    return (m.ether_form(x, m.reflect(x, z)) + m.ether_form(x, z)).norm();
  });
  run.run("geometry.omega_covariantly_constant", 1e-8, few, [&](Sampler& s) {
    const Point c = s.point(m);
    return covariant_omega_residual(m, s.near(m, c, 0.3), c);
  });

  // ---- ether ----
  run.run("ether.zero_curvature", 1e-6, n, [&](Sampler& s) {
    const Point x = s.point(m), z = s.point(m);
    return zero_curvature_residual(m, x, z);
  });
  run.run("ether.geodesic_symmetry", 1e-8, n, [&](Sampler& s) {
    const Point x = s.point(m);
    const Vec v = s.tangent(m, x, 1.2);
    const Point ep = exp_map(m, x, TangentVector{x, v});
    const Point em = exp_map(m, x, TangentVector{x, -v});
    return (m.reflect(x, ep).coords - em.coords).norm();
  });
  run.run("ether.log_inverts_exp", 1e-9, few, [&](Sampler& s) {
    const Point x = s.point(m);
    const Point b = s.near(m, x, 1.2);
    return (exp_map(m, x, log_map(m, x, b)).coords - b.coords).norm();
  });
  run.run("ether.fibration_reflectivity", 1e-9, few, [&](Sampler& s) {
    const Point x = s.point(m);
    const Vec eta = m.tangent_project(x, s.tangent(m, x, 1.2));
    const Point zp = ell_invert(m, x, CotangentVector{x, eta});
    const Point zm = ell_invert(m, x, CotangentVector{x, -eta});
    return (m.reflect(x, zp).coords - zm.coords).norm();
  });

  // ---- kernel ----
  run.run("kernel.vertex_relations", 1e-9, n, [&](Sampler& s) {
    const auto tr = s.triple(m);
    const TriangleSolution t = solve_triangle(m, tr.x, tr.y, tr.z);
    return std::max({(t.c.coords - m.reflect(t.z, t.b).coords).norm(),
                     (t.b.coords - m.reflect(t.y, t.a).coords).norm(),
                     (t.a.coords - m.reflect(t.x, t.c).coords).norm()});
  });
  run.run("kernel.phase_antisymmetry", 1e-8, few, [&](Sampler& s) {
    const auto tr = s.triple(m);
    return std::abs(phase(m, solve_triangle(m, tr.x, tr.y, tr.z)) + phase(m, solve_triangle(m, tr.y, tr.x, tr.z)));
  });
  run.run("kernel.phase_cyclicity", 1e-8, few, [&](Sampler& s) {
    const auto tr = s.triple(m);
    return std::abs(phase(m, solve_triangle(m, tr.x, tr.y, tr.z)) - phase(m, solve_triangle(m, tr.z, tr.x, tr.y)));
  });
  run.run("kernel.hamilton_jacobi", flat ? 1e-6 : 1e-4, few, [&](Sampler& s) {
    const auto tr = s.triple(m);
    return phase_gradient_residual(m, tr.x, tr.y, tr.z);
  });
  run.run("kernel.reflection_free_amplitude", 1e-5, few, [&](Sampler& s) {
    const auto tr = s.triple(m);
    const TriangleSolution t = solve_triangle(m, tr.x, tr.y, tr.z);
    const double a = amplitude(m, t);
    return std::abs(a - amplitude_reflection_free(m, t)) / a;
  });
  run.run("kernel.transport", flat ? 1e-8 : 1e-3, std::max(1, n / 10), [&](Sampler& s) {
    const auto tr = s.triple(m);
    return transport_residual(m, tr.x, tr.y, tr.z);
  });
  if (flat) {
    const auto& fm = static_cast<const FlatModel&>(m);
    run.run("kernel.flat_closed_form", 1e-8, n, [&](Sampler& s) {
      const auto tr = s.triple(m);
      const TriangleSolution t = solve_triangle(m, tr.x, tr.y, tr.z);
      const double mu2 = std::pow(4.0, m.n());
      return std::max(std::abs(phase(m, t) - flat_phase(fm, tr.x, tr.y, tr.z)),
                      std::abs(amplitude(m, t) - mu2) / mu2);
    });
  } else {
    run.run("kernel.two_branches", 0.0, n, [&](Sampler& s) {
      const Point x = s.point(m), y = s.point(m), z = s.point(m);
      return std::abs(static_cast<double>(enumerate_branches(m, x, y, z).size()) - 2.0);
    });
  }

  // ---- starprod ----
  const int amb = m.ambient_dim();
  run.run("starprod.germ", 1e-12, few, [&](Sampler& s) {
    const FieldSymbol f = FieldSymbol::from_poly(random_poly(s, amb, flat ? 3 : 2));
    return germ_residual(m, f, s.point(m), SeriesConfig{0.1, flat ? 2 : 1});
  });
  run.run("starprod.series_parity", 1e-12, few, [&](Sampler& s) {
    const FieldSymbol f = FieldSymbol::from_poly(random_poly(s, amb, 2));
    const FieldSymbol g = FieldSymbol::from_poly(random_poly(s, amb, 2));
    const Point z = s.point(m);
    const SeriesConfig sc{cfg.hbar, 2};
    return std::max(std::abs(series_coefficient(m, f, g, z, 1, sc) + series_coefficient(m, g, f, z, 1, sc)),
                    std::abs(series_coefficient(m, f, g, z, 2, sc) - series_coefficient(m, g, f, z, 2, sc)));
  });
  if (plane) {
    const PolySymbol q = PolySymbol::variable(2, 0), p = PolySymbol::variable(2, 1);
    run.run("starprod.heisenberg", 0.0, 1, [&](Sampler&) {
      const PolySymbol comm = moyal_poly(q, p, cfg.hbar) - moyal_poly(p, q, cfg.hbar);
      return comm.max_coeff_diff(PolySymbol::constant(2, Complex(0.0, cfg.hbar)));
    });
    run.run("starprod.quadrature_unity", 1e-6, 2, [&](Sampler& s) {
      const FieldSymbol f = FieldSymbol::poly_gaussian(random_poly(s, 2, 1), s.point(m, 0.5).coords, s.uniform(0.8, 1.2));
      const Point z = s.point(m, 0.7);
      return std::abs(quad_product(f, FieldSymbol::constant(1.0, 2), z, cfg.hbar) - f(z));
    });
    run.run("starprod.quadrature_hermiticity", 1e-8, 2, [&](Sampler& s) {
      const FieldSymbol f = FieldSymbol::poly_gaussian(random_poly(s, 2, 1), s.point(m, 0.5).coords, s.uniform(0.8, 1.2));
      const FieldSymbol g = FieldSymbol::gaussian(s.point(m, 0.5).coords, s.uniform(0.8, 1.2), Complex(0.7, -0.2));
      const Point z = s.point(m, 0.7);
      return std::abs(std::conj(quad_product(f, g, z, cfg.hbar)) - quad_product(g.conj(), f.conj(), z, cfg.hbar));
    });

    // ---- evolution ----
    const FieldSymbol h = FieldSymbol::from_poly(oscillator());
    run.run("evolution.oscillator_amplitude", 1e-8, few, [&](Sampler& s) {
      const double t = s.uniform(0.1, 3.0);
      return std::abs(evolution_symbol(h, s.point(m), t, cfg.hbar).amplitude - 1.0 / std::cos(t / 2));
    });
    run.run("evolution.midpoint", 1e-10, few, [&](Sampler& s) {
      const Point x = s.point(m);
      const FlowTrace tr = chord_fixed_point(h, x, s.uniform(0.1, 3.0));
      return ((tr.start.coords + tr.end.coords) / 2 - x.coords).norm();
    });
    run.run("evolution.focal_time", 0.0, 1, [&](Sampler& s) {
      try {
        evolution_symbol(h, s.point(m), std::numbers::pi, cfg.hbar);
      } catch (const FocalTime&) {
        return 0.0;
      }
      return 1.0;
    });
    run.run("evolution.quadratic_oracle", 1e-6, 1, [&](Sampler& s) {
      const Point x = s.point(m, 0.5);
      const Complex o = oracle_symbol(oscillator(), x.coords, 1.0, cfg.hbar);
      return std::abs(evolution_symbol(h, x, 1.0, cfg.hbar).value - o) / std::abs(o);
    });
  }
  return rep;
}

}  // namespace etherstar
