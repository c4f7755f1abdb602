#pragma once

// Conformal harmonic parametrizations x(t, theta) of free boundary minimal
// surfaces in the unit ball, and quadrature of the second variation forms
//   S(W, W) = int (|D^perp W|^2 - |A^W|^2) da - int_bdry |W|^2 ds   (normal W)
//   Q(V, W) = int <DV, DW> da - int_bdry V.W ds                    (V, W tangent to the sphere on the boundary)
// Annulus and Moebius surfaces live on [-T, T] x S^1 (the Moebius band as
// the quotient (t, theta) ~ (-t, theta + pi)); the flat disk uses r = e^t on
// [-T, 0] with T large enough that the puncture is below roundoff.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace steklov {

enum class SurfaceTopology { Annulus, Moebius, Disk };

const char* to_string(SurfaceTopology topology);

/// Position and coordinate derivatives up to second order; s stands for theta.
struct SurfaceJet {
  Eigen::VectorXd x, xt, xs, xtt, xts, xss;
};

struct SurfaceGrid {
  int nt = 64;       // Gauss-Legendre nodes in t per panel
  int ntheta = 128;  // trapezoid points in theta
};

struct ParametricSurface {
  SurfaceTopology topology = SurfaceTopology::Annulus;
  double T = 1.0;      // half-length; for the disk the depth of the log-polar strip
  int n = 3;           // ambient dimension
  double scale = 1.0;  // the raw parametrization is divided by this radius
  std::function<SurfaceJet(double t, double theta)> jet;
  SurfaceGrid grid;

  double t_min() const { return -T; }
  double t_max() const { return topology == SurfaceTopology::Disk ? 0.0 : T; }
};

/// Catenoid (cosh t cos theta, cosh t sin theta, t) / R on [-T, T] with
/// R = sqrt(cosh^2 T + T^2), so the boundary circles lie on the unit sphere.
ParametricSurface catenoid(double T);
/// catenoid(T0) with T0 tanh T0 = 1: the free boundary case.
ParametricSurface critical_catenoid();
/// (2 sinh t cos theta, 2 sinh t sin theta, cosh 2t cos 2theta, cosh 2t sin 2theta) / R.
ParametricSurface moebius_band(double T);
/// moebius_band(T0) with coth T0 = 2 tanh 2T0.
ParametricSurface critical_moebius();
/// Equatorial unit disk in R^3, x = (e^t cos theta, e^t sin theta, 0).
ParametricSurface flat_disk();

/// Same positions, derivatives replaced by fourth order central differences
/// with step h; used to cross-check the analytic jets.
ParametricSurface with_finite_differences(const ParametricSurface& surface, double h = 1e-3);

struct SurfaceGeometry {
  SurfaceJet jet;
  double lambda = 0.0;           // |x_t| = |x_theta|
  Eigen::MatrixXd tangent;       // n x 2 orthonormal frame x_t / lambda, x_theta / lambda
  Eigen::MatrixXd normal;        // n x (n - 2) orthonormal normal frame
  Eigen::VectorXd h11, h12, h22; // normal parts of the second derivatives
};

/// n = 3 uses the oriented normal x_t x x_theta; n = 4 completes the tangent
/// frame by Gram-Schmidt on the coordinate axes in a fixed order.
SurfaceGeometry geometry(const ParametricSurface& surface, double t, double theta);

struct FieldJet {
  Eigen::VectorXd w, wt, ws;
};

enum class FieldKind { Normal, Tangential, Mixed };

struct VariationField {
  std::function<FieldJet(double t, double theta)> eval;
  FieldKind kind = FieldKind::Mixed;
  bool boundary_tangent = false;  // x . W = 0 on the boundary
};

struct ScalarJet {
  double v = 0.0, vt = 0.0, vs = 0.0;
};
using ScalarField = std::function<ScalarJet(double t, double theta)>;

/// v^perp for a constant vector v.
VariationField normal_part(const ParametricSurface& surface, const Eigen::VectorXd& v);
/// psi nu for a scalar psi (n = 3).
VariationField scalar_normal_field(const ParametricSurface& surface, ScalarField psi);
/// X = x_theta, the rotation field.
VariationField rotation_field(const ParametricSurface& surface);
/// Z - (Z . x) x, tangent to the unit sphere wherever |x| = 1.
VariationField sphere_tangent_field(const ParametricSurface& surface, std::function<FieldJet(double, double)> Z);
VariationField scaled(const VariationField& field, double c);

/// Largest deviation of a field from its declared kind over the grid
/// (tangential part for Normal, normal part for Tangential, 0 for Mixed).
double kind_violation(const ParametricSurface& surface, const VariationField& field);
/// max |x . W| over the boundary circles.
double boundary_tangency_violation(const ParametricSurface& surface, const VariationField& field);

/// int f dt dtheta over the parameter domain (half the cylinder for Moebius).
double parameter_integral(const ParametricSurface& surface, const std::function<double(double, double)>& f);

double area(const ParametricSurface& surface);
double boundary_length(const ParametricSurface& surface);
/// int |W|^2 da
double l2_mass(const ParametricSurface& surface, const VariationField& field);
/// int |W|^2 ds
double boundary_mass(const ParametricSurface& surface, const VariationField& field);
/// int |DW|^2 da with the full ambient derivative.
double dirichlet_energy(const ParametricSurface& surface, const VariationField& field);
/// sqrt(int |DW|^2 da + int |W|^2 ds), the scale for null-form checks.
double field_norm(const ParametricSurface& surface, const VariationField& field);

/// Throws NotNormal when the field has a tangential part above 1e-8 relative.
double index_form_S(const ParametricSurface& surface, const VariationField& W);
/// Throws BoundaryTangencyViolated when x . V or x . W exceeds 1e-8 on the boundary.
double energy_form_Q(const ParametricSurface& surface, const VariationField& V, const VariationField& W);

struct FormReport {
  double S_value = 0.0;
  double Q_value = 0.0;
  double energy = 0.0;
  double area = 0.0;
  double boundary_length = 0.0;
  std::map<std::string, double> identity_residuals;
};

/// Residual names: harmonicity, conformality_length, conformality_angle,
/// boundary_sphericality, conormal_radiality, eigenfunction, and
/// moebius_identification for Moebius bands. Never throws.
FormReport verify_minimal_free_boundary(const ParametricSurface& surface);
/// area, boundary_length and the residual two_area_minus_length.
FormReport area_length_report(const ParametricSurface& surface);

struct IndexIdentity {
  double S = 0.0;                  // S(v^perp, v^perp)
  double mass = 0.0;               // int |v^perp|^2 da
  double boundary_formula = 0.0;   // int_bdry (-|v|^2 + 2 (v . x)^2) ds
  double relative_residual = 0.0;  // |S + 2 mass| / mass
};

/// Coordinate-direction test of the index bound on a free boundary surface.
IndexIdentity index_identity(const ParametricSurface& surface, const Eigen::VectorXd& v);

struct TriangleMesh {
  Eigen::MatrixXd vertices;  // rows are points in R^n
  std::vector<std::array<int, 3>> faces;
};

/// Uniform grid in (t, theta), two triangles per cell. The annulus wraps in
/// theta; the Moebius band is meshed on theta in [0, pi] with the seam
/// (t, pi) ~ (-t, 0) identified; the disk gets a center vertex.
TriangleMesh triangulate(const ParametricSurface& surface, int nt, int ntheta);

}  // namespace steklov
