#include <doctest.h>

#include <cmath>
#include <numbers>

#include "etherstar/evolution.hpp"
#include "etherstar/fit.hpp"
#include "support.hpp"

using namespace etherstar;
using namespace testsupport;

namespace {

PolySymbol oscillator() {
  PolySymbol h(2);
  h.add({2, 0}, 0.5);
  h.add({0, 2}, 0.5);
  return h;
}

// Flow of the oscillator: q' = p, p' = -q.
Mat rotation(double t) {
  Mat r(2, 2);
  r << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
  return r;
}

// Exact symbol of exp(-i t H / hbar) for H = (q^2 + p^2) / 2.
Complex oscillator_symbol(const Vec& x, double t, double hbar) {
  return std::polar(1.0 / std::cos(t / 2), -(2.0 / hbar) * std::tan(t / 2) * 0.5 * x.squaredNorm());
}

}  // namespace

TEST_CASE("hamilton flow") {
  const FieldSymbol h = FieldSymbol::from_poly(oscillator());
  const Point x0 = p2(0.7, -0.2);
  const FlowTrace full = hamilton_flow(h, x0, 2 * std::numbers::pi);
  CHECK((full.end.coords - x0.coords).norm() < 1e-8);
  CHECK(full.energy_drift < 1e-9 * 2 * std::numbers::pi);
  CHECK((hamilton_flow(h, x0, 0.0).end.coords - x0.coords).norm() == 0.0);

  const FlowTrace part = hamilton_flow(h, x0, 1.3);
  CHECK((part.end.coords - rotation(1.3) * x0.coords).norm() < 1e-10);
  CHECK((part.tangent - rotation(1.3)).norm() < 1e-10);

  // H = a q + b p translates by (b, -a) t
  PolySymbol lin(2);
  lin.add({1, 0}, 0.4);
  lin.add({0, 1}, -1.1);
  const FlowTrace tr = hamilton_flow(FieldSymbol::from_poly(lin), x0, 2.0);
  CHECK((tr.end.coords - (x0.coords + 2.0 * Vec{{-1.1, -0.4}})).norm() < 1e-12);
  CHECK_THROWS_AS(hamilton_flow(h, Point{Vec::Zero(3)}, 1.0), DomainError);
}

TEST_CASE("chord fixed point") {
  const FieldSymbol h = FieldSymbol::from_poly(oscillator());
  std::mt19937_64 rng(51);
  for (int i = 0; i < 10; ++i) {
    const Point x = random_flat(rng);
    CHECK((chord_fixed_point(h, x, 0.0).start.coords - x.coords).norm() < 1e-14);
    for (double t : {0.4, 1.5, 2.8}) {
      const FlowTrace tr = chord_fixed_point(h, x, t);
      // x = (x0 + R x0) / 2
      const Vec x0 = 2.0 * (Mat::Identity(2, 2) + rotation(t)).inverse() * x.coords;
      CHECK((tr.start.coords - x0).norm() < 1e-9);
      CHECK(((tr.start.coords + tr.end.coords) / 2 - x.coords).norm() < 1e-10);
    }
  }
  CHECK_THROWS_AS(chord_fixed_point(h, p2(0.3, 0.1), std::numbers::pi), FocalTime);
}

TEST_CASE("evolution symbol for the oscillator") {
  const FieldSymbol h = FieldSymbol::from_poly(oscillator());
  const double hbar = 0.2;
  const SymbolSample g0 = evolution_symbol(h, p2(0.4, 0.3), 0.0, hbar);
  CHECK(std::abs(g0.value - Complex(1.0)) < 1e-14);
  for (double t : {0.3, 1.0, 2.0, 3.0}) {
    for (const Point& x : {p2(0, 0), p2(0.3, -0.4), p2(-0.8, 0.5)}) {
      const SymbolSample s = evolution_symbol(h, x, t, hbar);
      CHECK(std::abs(s.amplitude - 1.0 / std::cos(t / 2)) < 1e-8);
      CHECK(std::abs(std::abs(s.value) - s.amplitude) < 1e-12);
      CHECK(std::abs(s.value - oscillator_symbol(x.coords, t, hbar)) < 1e-8 * std::abs(s.value));
    }
  }
  CHECK_THROWS_AS(evolution_symbol(h, p2(0.3, 0.1), std::numbers::pi, hbar), FocalTime);
  // past the focal time the continued branch is refused
  CHECK_THROWS_AS(evolution_symbol(h, p2(0.3, 0.1), 4.0, hbar), FocalTime);
}

TEST_CASE("oracle symbol") {
  const PolySymbol h = oscillator();
  const double hbar = 0.2;
  CHECK(std::abs(oracle_symbol(h, Vec{{0.3, -0.2}}, 0.0, hbar) - Complex(1.0)) < 1e-10);
  // rotation symmetry
  const Complex a = oracle_symbol(h, Vec{{0.5, 0.0}}, 1.0, hbar);
  const Complex b = oracle_symbol(h, Vec{{0.3, 0.4}}, 1.0, hbar);
  CHECK(std::abs(a - b) < 1e-8);
  CHECK(std::abs(a - oscillator_symbol(Vec{{0.5, 0.0}}, 1.0, hbar)) < 1e-8);
  // conj G_t = G_{-t}
  for (const Vec& x : {Vec{{0.2, 0.1}}, Vec{{-0.5, 0.6}}})
    CHECK(std::abs(std::conj(oracle_symbol(h, x, 0.7, hbar)) - oracle_symbol(h, x, -0.7, hbar)) < 1e-9);

  // H = q: exp(-i t q / hbar), also from the zero-area chord
  PolySymbol q(2);
  q.add({1, 0}, 1.0);
  for (const Vec& x : {Vec{{0.2, 0.1}}, Vec{{-0.5, 0.6}}}) {
    const Complex exact = std::polar(1.0, -0.8 * x(0) / hbar);
    CHECK(std::abs(oracle_symbol(q, x, 0.8, hbar) - exact) < 1e-8);
    const SymbolSample s = evolution_symbol(FieldSymbol::from_poly(q), Point{x}, 0.8, hbar);
    CHECK(std::abs(s.segment.area) < 1e-12);
    CHECK(std::abs(s.value - exact) < 1e-10);
  }
  CHECK_THROWS_AS(oracle_symbol(h, Vec{{0.0, 0.0}}, 1.0, hbar, OracleConfig{512}), DomainError);
}

TEST_CASE("semiclassical symbol: functions of q alone are exact") {
  // exp(-i t q^3 / hbar) is its own symbol; every chord has zero area
  PolySymbol c(2);
  c.add({3, 0}, 1.0);
  const FieldSymbol h = FieldSymbol::from_poly(c);
  for (const Point& x : {p2(0.5, 0.2), p2(-0.7, 1.0)}) {
    const SymbolSample s = evolution_symbol(h, x, 0.6, 0.1);
    CHECK(std::abs(s.value - std::polar(1.0, -0.6 * std::pow(x.coords(0), 3) / 0.1)) < 1e-9);
  }
}

TEST_CASE("semiclassical symbol: quadratic exactness against the oracle") {
  const PolySymbol h = oscillator();
  const double hbar = 0.2;
  for (double t : {0.5, 2.0})
    for (const Vec& x : {Vec{{0.0, 0.0}}, Vec{{0.5, -0.5}}, Vec{{-0.5, 0.25}}}) {
      const Complex o = oracle_symbol(h, x, t, hbar);
      const SymbolSample s = evolution_symbol(FieldSymbol::from_poly(h), Point{x}, t, hbar);
      CHECK(std::abs(s.value - o) < 1e-6 * std::abs(o));
      CHECK(std::abs(std::abs(s.value) - std::abs(o)) < 1e-6);
    }
}

TEST_CASE("semiclassical symbol: first-order error law") {
  OracleHamiltonian h;
  h.poly = oscillator();
  h.bumps.push_back({Vec{{0.3, 0.0}}, 1.0, 0.5});
  const FieldSymbol sym = h.symbol();
  const Vec x{{0.2, -0.3}};
  std::vector<double> hs{0.4, 0.2, 0.1}, err;
  for (double hbar : hs)
    err.push_back(std::abs(evolution_symbol(sym, Point{x}, 1.0, hbar).value - oracle_symbol(h, x, 1.0, hbar)));
  const double slope = order_slope(hs, err);
  CHECK(slope > 0.8);
  CHECK(slope < 1.5);
}

TEST_CASE("log-log fit") {
  const LineFit f = loglog_fit({1, 2, 4}, {3, 12, 48});
  CHECK(std::abs(f.slope - 2.0) < 1e-14);
  CHECK(std::abs(std::exp(f.intercept) - 3.0) < 1e-13);
  CHECK(std::isinf(order_slope({1, 2}, {0.0, 0.0}, 1e-12)));
  CHECK_THROWS_AS(loglog_fit({1}, {1}), DomainError);
}
