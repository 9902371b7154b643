#include <doctest.h>

#include <random>

#include "etherstar/ether.hpp"
#include "support.hpp"

using namespace etherstar;
using namespace testsupport;

namespace {

Vec random_tangent(std::mt19937_64& rng, const ManifoldModel& m, const Point& x, double scale) {
  std::normal_distribution<double> g;
  Vec v(m.ambient_dim());
  for (int i = 0; i < v.size(); ++i) v(i) = g(rng);
  v = m.tangent_project(x, v);
  return scale * v / std::max(v.norm(), 1e-12) * std::uniform_real_distribution<double>(0.1, 1.0)(rng);
}

// Exact sphere geodesic: rotation of x about x^v through |v|.
Vec sphere_exp_oracle(const Vec& x, const Vec& v) {
  const double t = v.norm();
  if (t == 0.0) return x;
  return rotate(x, cross3(x, v).normalized(), t);
}

}  // namespace

TEST_CASE("exp_map: flat translation and sphere great circle") {
  std::mt19937_64 rng(21);
  FlatModel f(1);
  SphereModel s;
  for (int i = 0; i < 30; ++i) {
    const Point x = random_flat(rng);
    const Vec v = random_tangent(rng, f, x, 2.0);
    CHECK((exp_map(f, x, TangentVector{x, v}).coords - (x.coords + v)).norm() < 1e-10);
    const Point xs = random_sphere(rng);
    const Vec vs = random_tangent(rng, s, xs, 2.5);
    const Point e = exp_map(s, xs, TangentVector{xs, vs});
    CHECK(std::abs(e.coords.dot(cross3(xs.coords, vs))) < 1e-9);
    CHECK((e.coords - sphere_exp_oracle(xs.coords, vs)).norm() < 1e-9);
    CHECK(std::abs(e.coords.norm() - 1.0) < 1e-10);
  }
  const Point x = p3(0.2, 0.3, 0.9);
  CHECK((exp_map(s, x, TangentVector{x, Vec::Zero(3)}).coords - x.coords).norm() == 0.0);
}

TEST_CASE("log_map inverts exp_map") {
  std::mt19937_64 rng(22);
  FlatModel f(1);
  SphereModel s;
  const Point a = p2(1, 2), b = p2(-0.5, 4);
  CHECK((log_map(f, a, b).comps - (b.coords - a.coords)).norm() < 1e-10);
  for (int i = 0; i < 100; ++i) {
    const Point x = random_sphere(rng);
    const Point y = random_sphere(rng);
    if (x.coords.dot(y.coords) < -0.95) continue;
    const TangentVector w = log_map(s, x, y);
    CHECK(w.comps.norm() == doctest::Approx(std::acos(x.coords.dot(y.coords))).epsilon(1e-8));
    CHECK((exp_map(s, x, w).coords - y.coords).norm() < 1e-8);
  }
  const Point n = p3(0, 0, 1);
  CHECK_THROWS_AS(log_map(s, n, p3(0, 0, -1)), DomainError);
}

TEST_CASE("flow_point") {
  std::mt19937_64 rng(23);
  FlatModel f(1);
  SphereModel s;
  const Point x = p2(0.5, -1), y = p2(2, 3);
  const Vec v{{0.3, 0.7}};
  CHECK((flow_point(f, x, TangentVector{x, v}, y, 0.8).coords - (y.coords + 1.6 * v)).norm() < 1e-10);
  CHECK((flow_point(f, x, TangentVector{x, v}, y, 0.0).coords - y.coords).norm() == 0.0);
  for (int i = 0; i < 30; ++i) {
    const Point xs = random_sphere(rng), ys = random_sphere(rng);
    const Vec vs = random_tangent(rng, s, xs, 1.5);
    const TangentVector tv{xs, vs}, tm{xs, -vs};
    // time-1/2 flow from x is the exponential map
    CHECK((flow_point(s, xs, tv, xs, 0.5).coords - exp_map(s, xs, tv).coords).norm() < 1e-12);
    // s_x e^v_x = e^{-v}_x s_x
    const Point lhs = s.reflect(xs, flow_point(s, xs, tv, ys, 0.5));
    const Point rhs = flow_point(s, xs, tm, s.reflect(xs, ys), 0.5);
    CHECK((lhs.coords - rhs.coords).norm() < 1e-8);
  }
}

TEST_CASE("translations") {
  std::mt19937_64 rng(24);
  FlatModel f(1);
  SphereModel s;
  const Point x = p2(1, 0.5), y = p2(-0.3, 2), z0 = p2(0.2, 0.1);
  CHECK((translate(f, PathSpec::segment(y, x), z0).coords - (z0.coords + 2 * (x.coords - y.coords))).norm() < 1e-10);
  CHECK((translate(f, PathSpec::segment(y, x), y).coords - f.reflect(x, y).coords).norm() < 1e-10);
  for (int i = 0; i < 20; ++i) {
    const Point c = random_sphere(rng);
    const Point xs = sphere_near(rng, c, 0.8), ys = sphere_near(rng, c, 0.8), ws = sphere_near(rng, c, 0.8);
    const Point zs = random_sphere(rng);
    // g_{y,y} = id
    CHECK((translate(s, PathSpec::segment(ys, ys), zs).coords - zs.coords).norm() < 1e-14);
    // g_{x,y}(y) = s_x(y)
    const Point gy = translate(s, PathSpec::segment(ys, xs), ys);
    CHECK((gy.coords - s.reflect(xs, ys).coords).norm() < 1e-8);
    // two different paths agree
    const Point direct = translate(s, PathSpec::segment(ys, xs), zs);
    const Point detour = translate(s, PathSpec{{ys, ws, xs}}, zs);
    CHECK((direct.coords - detour.coords).norm() < 1e-6);
    // g_{x,y} g_{y,w} = g_{x,w}
    const Point composed = translate(s, PathSpec::segment(ys, xs), translate(s, PathSpec::segment(ws, ys), zs));
    const Point once = translate(s, PathSpec::segment(ws, xs), zs);
    CHECK((composed.coords - once.coords).norm() < 1e-7);
    // and g_{x,y} = s_x s_y
    CHECK((direct.coords - s.reflect(xs, s.reflect(ys, zs)).coords).norm() < 1e-8);
  }
}

TEST_CASE("ell_invert") {
  std::mt19937_64 rng(25);
  FlatModel f(1);
  SphereModel s;
  const Point x = p2(0.4, -0.2);
  CHECK((ell_invert(f, x, CotangentVector{x, Vec::Zero(2)}).coords - x.coords).norm() == 0.0);
  const Vec eta{{0.6, -1.1}};
  CHECK((ell_invert(f, x, CotangentVector{x, eta}).coords - (x.coords - 0.5 * f.J() * eta)).norm() < 1e-12);
  for (int i = 0; i < 50; ++i) {
    const Point xs = random_sphere(rng);
    const Vec e = random_tangent(rng, s, xs, 1.8);
    const Point z = ell_invert(s, xs, CotangentVector{xs, e});
    CHECK((s.ether_form(xs, z) - e).norm() < 1e-10);
    // closed form: z = cos t x + sin t (eta x x)/|eta|, sin t = |eta|/2
    const double t = std::asin(e.norm() / 2);
    const Vec oracle = std::cos(t) * xs.coords + std::sin(t) * cross3(e, xs.coords) / e.norm();
    CHECK((z.coords - oracle).norm() < 1e-10);
    const Point zm = ell_invert(s, xs, CotangentVector{xs, -e});
    CHECK((zm.coords - s.reflect(xs, z).coords).norm() < 1e-9);
  }
  CHECK_THROWS_AS(ell_invert(s, p3(0, 0, 1), CotangentVector{p3(0, 0, 1), Vec{{1.95, 0.0, 0.0}}}), DomainError);
}

TEST_CASE("lift_symbol") {
  std::mt19937_64 rng(26);
  FlatModel f(1);
  const Point x = p2(0.3, 0.7);
  const Vec eta{{0.2, -0.5}};
  const CotangentVector ce{x, eta};
  const FieldSymbol q = FieldSymbol::from_poly(PolySymbol::variable(2, 0));
  const Vec l = x.coords - 0.5 * f.J() * eta;
  CHECK(std::abs(lift_symbol(f, q, x, ce, 1, 0.3) - l(0)) < 1e-9);
  CHECK(std::abs(lift_symbol(f, q, x, CotangentVector{x, Vec::Zero(2)}, 0, 0.3) - x.coords(0)) < 1e-15);
  // corrections vanish on the flat model for any smooth f
  const FieldSymbol g = FieldSymbol::gaussian(Vec{{0.1, 0.4}}, 0.8, Complex(1.0, 0.5));
  const Complex l0 = lift_symbol(f, g, x, ce, 0, 0.3);
  const Complex l1 = lift_symbol(f, g, x, ce, 1, 0.3);
  CHECK(std::abs(l1 - l0) < 1e-9);
  CHECK(std::abs(l0 - g(Point{l})) < 1e-12);
  // sphere: order-one lift differs from the order-zero one by O(hbar)
  SphereModel s;
  const Point xs = p3(0.1, 0.2, 0.95);
  const CotangentVector es{xs, s.tangent_project(xs, Vec{{0.3, -0.2, 0.0}})};
  const FieldSymbol h = FieldSymbol::from_function([](const Vec& z) { return Complex(z(0) * z(2) + z(1) * z(1)); });
  const Complex d1 = lift_symbol(s, h, xs, es, 1, 1e-2) - lift_symbol(s, h, xs, es, 0, 1e-2);
  const Complex d2 = lift_symbol(s, h, xs, es, 1, 2e-2) - lift_symbol(s, h, xs, es, 0, 2e-2);
  CHECK(std::abs(d2 - 2.0 * d1) < 1e-7);
  CHECK_THROWS_AS(lift_symbol(f, q, x, ce, 2, 0.3), DomainError);
}

TEST_CASE("zero curvature") {
  std::mt19937_64 rng(27);
  FlatModel f(1);
  SphereModel s;
  for (int i = 0; i < 50; ++i) {
    CHECK(zero_curvature_residual(f, random_flat(rng), random_flat(rng)) < 1e-8);
    const Point x = random_sphere(rng);
    CHECK(zero_curvature_residual(s, x, random_sphere(rng)) < 1e-6);
    CHECK(zero_curvature_residual(s, x, x) < 1e-8);
  }
}

TEST_CASE("Ether geodesic invariants") {
  std::mt19937_64 rng(28);
  FlatModel f(1);
  SphereModel s;
  for (const ManifoldModel* m : {static_cast<const ManifoldModel*>(&f), static_cast<const ManifoldModel*>(&s)}) {
    for (int i = 0; i < 100; ++i) {
      const Point x = m->kind() == ModelKind::flat ? random_flat(rng) : random_sphere(rng);
      const Vec v = random_tangent(rng, *m, x, 1.2);
      const Point ep = exp_map(*m, x, TangentVector{x, v});
      const Point em = exp_map(*m, x, TangentVector{x, -v});
      // H_x(Exp(-v)) = -H_x(Exp(v))
      CHECK((m->ether_form(x, em) + m->ether_form(x, ep)).norm() < 1e-8);
      // s_x(Exp(v)) = Exp(-v)
      CHECK((m->reflect(x, ep).coords - em.coords).norm() < 1e-8);
    }
  }
}

TEST_CASE("fiber dynamics is perpendicular to the velocity") {
  std::mt19937_64 rng(29);
  SphereModel s;
  for (int i = 0; i < 20; ++i) {
    const Point x = random_sphere(rng);
    const Vec v = random_tangent(rng, s, x, 1.0);
    const auto eta = [&](double tau) { return s.ether_form(x, exp_map(s, x, TangentVector{x, 2 * tau * v})); };
    const double h = 1e-4;
    for (double tau : {0.1, 0.4, 0.7}) {
      const Vec d = (eta(tau + h) - eta(tau - h)) / (2 * h);
      CHECK(std::abs(v.dot(d)) < 1e-7);
    }
  }
}

TEST_CASE("dual fibration is in involution") {
  std::mt19937_64 rng(30);
  SphereModel s;
  for (int i = 0; i < 20; ++i) {
    const Point c = random_sphere(rng);
    const Point x = sphere_near(rng, c, 0.4);
    const Vec s0 = s.chart_coords(c, x);
    std::normal_distribution<double> g(0.0, 0.4);
    const Vec e0{{g(rng), g(rng)}};
    // (x, eta) -> chart coordinates of l(x, +-eta) about c
    const auto fib = [&](double sign, const Vec& sx, const Vec& eta) {
      const Point xp = s.chart_point(c, sx);
      return s.chart_coords(c, ell_invert(s, xp, CotangentVector{xp, covector_from_chart(s, c, sx, sign * eta)}));
    };
    const double h = 1e-5;
    Mat lx(2, 2), le(2, 2), rx(2, 2), re(2, 2);
    for (int k = 0; k < 2; ++k) {
      Vec dp = Vec::Zero(2);
      dp(k) = h;
      lx.col(k) = (fib(1, s0 + dp, e0) - fib(1, s0 - dp, e0)) / (2 * h);
      le.col(k) = (fib(1, s0, e0 + dp) - fib(1, s0, e0 - dp)) / (2 * h);
      rx.col(k) = (fib(-1, s0 + dp, e0) - fib(-1, s0 - dp, e0)) / (2 * h);
      re.col(k) = (fib(-1, s0, e0 + dp) - fib(-1, s0, e0 - dp)) / (2 * h);
    }
    const Mat bracket = rx * le.transpose() - re * lx.transpose();
    CHECK(bracket.cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("Ether form is linear in Exp coordinates up to cubic order") {
  SphereModel s;
  const Point x = p3(0.3, -0.4, 0.8);
  const Mat fr = s.frame(x);
  const Vec dir = fr * Vec{{0.6, 0.8}};
  const Mat w = omega_at(s, x).entries;
  const std::vector<double> radii{1e-2, 5e-3, 2.5e-3};
  Mat design(3, 2);
  Mat rem(3, 2);
  for (int i = 0; i < 3; ++i) {
    const double r = radii[i];
    const Vec comps = fr.transpose() * s.ether_form(x, exp_map(s, x, TangentVector{x, r * dir}));
    const Vec lin = 2.0 * w * (fr.transpose() * dir) * r;
    design(i, 0) = r * r;
    design(i, 1) = r * r * r;
    rem.row(i) = (comps - lin).transpose();
  }
  // least-squares fit remainder = q r^2 + c r^3, per component
  const Mat coef = design.colPivHouseholderQr().solve(rem);
  CHECK(coef.row(0).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(coef.row(1).norm() > 0.1);  // the cubic term is genuinely present
}
