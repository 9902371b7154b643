#pragma once

// Semiclassical symbol of exp(-i t H / hbar) on flat R^2 and an operator
// oracle for it in the oscillator basis.

#include <vector>

#include "etherstar/newton.hpp"
#include "etherstar/ode.hpp"
#include "etherstar/symbols.hpp"

namespace etherstar {

struct EvolutionConfig {
  FlowConfig flow;
  NewtonOptions newton{};
  /// |det(I + D gamma^t)| at or below this is treated as a focal time.
  double focal_threshold = 1e-8;
  double midpoint_tol = 1e-10;
};

/// Hamilton trajectory with its tangent map and the action integral of p dq.
struct FlowTrace {
  Point start;
  Point end;
  Mat tangent;                  // D gamma^t at start
  double p_dq = 0.0;            // integral of p dq along the arc
  double energy_drift = 0.0;    // max |H - H(start)| over the samples
  std::vector<Point> arc;       // sampled trajectory, start and end included
  std::vector<double> focal_det;  // det(I + D gamma^s) along the arc
};

/// Integrates z' = J grad H (q' = H_p, p' = -H_q) together with its
/// variational equation. Flat n = 1.
FlowTrace hamilton_flow(const FieldSymbol& h, const Point& x0, double t, const FlowConfig& cfg = {});

/// Chord endpoint x0 with x the midpoint of [x0, gamma^t(x0)], by Newton from
/// x0 = x. Throws FocalTime when I + D gamma^t is singular.
FlowTrace chord_fixed_point(const FieldSymbol& h, const Point& x, double t, const EvolutionConfig& cfg = {});

struct EvolutionSegment {
  Point x;
  double t = 0.0;
  Point x0;
  std::vector<Point> arc;
  double area = 0.0;     // signed omega-area between the arc and the chord
  double h_arc = 0.0;    // H on the arc
};

struct SymbolSample {
  Complex value;
  double phase = 0.0;       // (area - t H) / hbar
  double amplitude = 1.0;
  int branch = 0;           // number of focal crossings (always 0 when returned)
  EvolutionSegment segment;
};

/// G_t(x) = exp(i (area - t H) / hbar) * 2 / sqrt(det(I + D gamma^t)).
SymbolSample evolution_symbol(const FieldSymbol& h, const Point& x, double t, double hbar,
                              const EvolutionConfig& cfg = {});

struct OracleConfig {
  int dim = 128;
  /// Accepted change when the basis is doubled (halved when 2 dim > 256).
  double truncation_tol = 1e-8;
  bool verify = true;
};

struct GaussianBump {
  Vec center;
  double sigma = 1.0;
  double weight = 1.0;
};

/// Polynomial plus Gaussian bumps on R^2: a Hamiltonian with both a symbol
/// and an exactly computable operator matrix.
struct OracleHamiltonian {
  PolySymbol poly{2};
  std::vector<GaussianBump> bumps;

  FieldSymbol symbol() const;
  /// Matrix of Op(H(. + x)) on the first dim oscillator states.
  CMat shifted_operator(const Vec& x, double hbar, int dim) const;
};

/// exp(-i t H / hbar) on the first dim oscillator states, reusable across x.
class OraclePropagator {
 public:
  OraclePropagator(const OracleHamiltonian& h, double t, double hbar, int dim);
  /// tr(S_x U) with a smooth cutoff in the number of quanta counted from x.
  Complex symbol(const Vec& x) const;
  const CMat& matrix() const { return u_; }

 private:
  double hbar_;
  int dim_;
  CMat u_;
};

/// tr(S_x exp(-i t H / hbar)) in the oscillator basis, checked against a
/// doubled (or halved) basis.
Complex oracle_symbol(const OracleHamiltonian& h, const Vec& x, double t, double hbar,
                      const OracleConfig& cfg = {});
Complex oracle_symbol(const PolySymbol& h, const Vec& x, double t, double hbar, const OracleConfig& cfg = {});

}  // namespace etherstar
