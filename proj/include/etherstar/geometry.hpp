#pragma once

// Symplectic manifold models: flat R^{2n} in Darboux coordinates and the unit
// sphere S^2 in ambient R^3 coordinates.
//
// Conventions (shared by every module):
//   * omega is J = [[0, I], [-I, 0]] in Darboux coordinates, and J in the
//     per-point orthonormal frame of the sphere (frame built so e2 = e1 x z).
//   * Psi = omega^{-1} = -J, Poisson bracket {f,g} = df . Psi . dg, so that
//     {q,p} = -1 and the order-hbar star-product term -(i hbar/2){f,g}
//     gives [q,p]_* = i hbar.
//   * Hamiltonian flow of h is dz^m/dt = d_l h Psi^{lm}, i.e. J grad h on the
//     flat model (q' = h_p, p' = -h_q) and z x grad h on the sphere.
//   * Ether 1-form H_x(z) = 2 omega (z - x) (flat) and 2 (x x z) (sphere),
//     so that 1/2 D_z H_x(z)|_{z=x} = omega(x).

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "etherstar/errors.hpp"

namespace etherstar {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;

/// A point given by its ambient coordinates: (q, p) for the flat model, a unit
/// 3-vector for the sphere.
struct Point {
  Vec coords;
};

/// Tangent vector in ambient components (sphere: v . base = 0).
struct TangentVector {
  Point base;
  Vec comps;
};

/// Covector in ambient representative form (sphere gauge: eta . base = 0).
struct CotangentVector {
  Point base;
  Vec comps;
};

/// 2n x 2n antisymmetric matrix of omega (or Psi) in the frame at a point.
struct FormMatrix {
  Mat entries;
};

/// Christoffel symbols of a chart: gamma[l](j, k) = Gamma^l_{jk}.
struct Connection {
  std::vector<Mat> gamma;

  double max_abs() const;
  double max_abs_diff(const Connection& other) const;
  double symmetry_defect() const;
};

enum class ModelKind { flat, sphere };

/// Chart-equipped symplectic manifold with analytic reflections and Ether form.
///
/// Every model carries one chart family: the chart centred at a point c is
/// s -> chart_point(c, s), with chart_point(c, 0) = c and coordinate basis
/// chart_basis(c, 0) = frame(c).
class ManifoldModel {
 public:
  virtual ~ManifoldModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::string id() const = 0;
  /// Degrees of freedom; the chart dimension is 2n.
  virtual int n() const = 0;
  int dim() const { return 2 * n(); }
  virtual int ambient_dim() const = 0;
  virtual bool has_analytic_reflection() const { return true; }
  virtual bool is_compact() const = 0;
  /// Integral of the first Chern class over the manifold (0 when H^2 is trivial).
  virtual int chern_integral() const = 0;
  /// Radius in covector norm inside which ell_invert is expected to converge.
  virtual double fibration_radius() const = 0;

  virtual double off_manifold(const Vec& coords) const = 0;
  void require_on(const Point& z) const;
  virtual Point project(const Vec& coords) const = 0;
  virtual Vec tangent_project(const Point& z, const Vec& w) const = 0;

  /// Orthonormal tangent frame (ambient x 2n) in which omega = J.
  virtual Mat frame(const Point& z) const = 0;
  /// omega_z(u, w) for ambient tangent vectors u, w.
  virtual double omega(const Point& z, const Vec& u, const Vec& w) const = 0;
  /// Hamiltonian vector field at z for a function with ambient gradient grad.
  virtual Vec hamiltonian_vector(const Point& z, const Vec& grad) const = 0;
  /// Poisson bracket of two functions given their ambient gradients at z.
  double poisson(const Point& z, const Vec& grad_f, const Vec& grad_g) const;

  virtual Point reflect(const Point& x, const Point& z) const = 0;
  /// Ambient Jacobian of z -> s_x(z) (maps T_z to T_{s_x(z)}).
  virtual Mat reflect_jacobian(const Point& x, const Point& z) const = 0;
  /// Ambient representative of the Ether form H_x(z).
  virtual Vec ether_form(const Point& x, const Point& z) const = 0;
  /// Ambient gradient in z of <v, H_x(z)>.
  virtual Vec ether_gradient(const Point& x, const Vec& v, const Point& z) const = 0;

  virtual Point chart_point(const Point& center, const Vec& s) const = 0;
  virtual Vec chart_coords(const Point& center, const Point& z) const = 0;
  /// Coordinate basis d chart_point / ds (ambient x 2n).
  virtual Mat chart_basis(const Point& center, const Vec& s) const = 0;
  /// Christoffel symbols of the symplectic connection in the chart.
  virtual Connection chart_christoffel(const Point& center, const Vec& s) const = 0;

  /// Frame components of an ambient vector or covector at z.
  Vec to_frame(const Point& z, const Vec& ambient) const { return frame(z).transpose() * ambient; }
  Vec from_frame(const Point& z, const Vec& comps) const { return frame(z) * comps; }
};

class FlatModel final : public ManifoldModel {
 public:
  explicit FlatModel(int n);

  ModelKind kind() const override { return ModelKind::flat; }
  std::string id() const override;
  int n() const override { return n_; }
  int ambient_dim() const override { return 2 * n_; }
  bool is_compact() const override { return false; }
  int chern_integral() const override { return 0; }
  double fibration_radius() const override { return 1e300; }

  double off_manifold(const Vec& coords) const override;
  Point project(const Vec& coords) const override { return Point{coords}; }
  Vec tangent_project(const Point&, const Vec& w) const override { return w; }

  Mat frame(const Point& z) const override;
  double omega(const Point& z, const Vec& u, const Vec& w) const override;
  Vec hamiltonian_vector(const Point& z, const Vec& grad) const override;

  Point reflect(const Point& x, const Point& z) const override;
  Mat reflect_jacobian(const Point& x, const Point& z) const override;
  Vec ether_form(const Point& x, const Point& z) const override;
  Vec ether_gradient(const Point& x, const Vec& v, const Point& z) const override;

  Point chart_point(const Point& center, const Vec& s) const override;
  Vec chart_coords(const Point& center, const Point& z) const override;
  Mat chart_basis(const Point& center, const Vec& s) const override;
  Connection chart_christoffel(const Point& center, const Vec& s) const override;

  /// The Darboux matrix J.
  const Mat& J() const { return j_; }

 private:
  int n_;
  Mat j_;
};

/// Unit sphere with symplectic form omega_z(u, w) = -z . (u x w).
///
/// Charts are gnomonic projections: chart_point(c, s) = (c + F_c s)/|c + F_c s|
/// where F_c is frame(c). Great circles are straight lines in these charts.
class SphereModel final : public ManifoldModel {
 public:
  ModelKind kind() const override { return ModelKind::sphere; }
  std::string id() const override { return "sphere"; }
  int n() const override { return 1; }
  int ambient_dim() const override { return 3; }
  bool is_compact() const override { return true; }
  int chern_integral() const override { return 2; }
  double fibration_radius() const override { return 1.9; }

  double off_manifold(const Vec& coords) const override;
  Point project(const Vec& coords) const override;
  Vec tangent_project(const Point& z, const Vec& w) const override;

  Mat frame(const Point& z) const override;
  double omega(const Point& z, const Vec& u, const Vec& w) const override;
  Vec hamiltonian_vector(const Point& z, const Vec& grad) const override;

  Point reflect(const Point& x, const Point& z) const override;
  Mat reflect_jacobian(const Point& x, const Point& z) const override;
  Vec ether_form(const Point& x, const Point& z) const override;
  Vec ether_gradient(const Point& x, const Vec& v, const Point& z) const override;

  Point chart_point(const Point& center, const Vec& s) const override;
  Vec chart_coords(const Point& center, const Point& z) const override;
  Mat chart_basis(const Point& center, const Vec& s) const override;
  Connection chart_christoffel(const Point& center, const Vec& s) const override;
};

using ModelPtr = std::shared_ptr<const ManifoldModel>;

/// Parses "flat:<n>" or "sphere".
ModelPtr make_model(const std::string& spec);

Vec cross3(const Vec& a, const Vec& b);

// ---- operations on a model ------------------------------------------------

FormMatrix omega_at(const ManifoldModel& m, const Point& z);
FormMatrix psi_at(const ManifoldModel& m, const Point& z);
Point reflect(const ManifoldModel& m, const Point& x, const Point& z);
CotangentVector ether_form(const ManifoldModel& m, const Point& x, const Point& z);

/// Symplectic connection at z in the chart centred at `center` (default: z).
Connection christoffel_at(const ManifoldModel& m, const Point& z);
Connection christoffel_at(const ManifoldModel& m, const Point& z, const Point& center);

/// Gamma(z) = -1/2 D^2 s_x(z)|_{x=z} by central second differences in the
/// chart centred at `center`.
Connection connection_from_reflections(const ManifoldModel& m, const Point& z,
                                       const Point& center, double step = 1e-3);
Connection connection_from_reflections(const ManifoldModel& m, const Point& z, double step = 1e-3);

/// max |d_i omega_jk - Gamma^l_{ji} omega_lk - Gamma^l_{ki} omega_jl| by
/// central differences in the chart centred at `center`.
double covariant_omega_residual(const ManifoldModel& m, const Point& z, const Point& center,
                                double step = 1e-4);

/// omega in the coordinate basis of the chart centred at `center`, at s.
Mat chart_omega(const ManifoldModel& m, const Point& center, const Vec& s);

/// Liouville density |Pf omega| relative to chart coordinates.
double liouville_density(const ManifoldModel& m, const Point& center, const Vec& s);

/// Ambient covector with coordinate components `eta` in the chart basis at s.
Vec covector_from_chart(const ManifoldModel& m, const Point& center, const Vec& s, const Vec& eta);

}  // namespace etherstar
