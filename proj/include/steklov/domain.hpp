#pragma once

// Genus-zero conformal classes as circle domains (unit disk minus round
// holes) together with boundary measures mu = lambda ds on each circle.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace steklov {

using Complex = std::complex<double>;

inline constexpr double kHoleMargin = 1e-6;
inline constexpr int kDefaultBoundaryGrid = 256;

struct Hole {
  Complex center{0.0, 0.0};
  double radius = 0.0;
};

/// A boundary circle with its orientation: +1 for the outer unit circle whose
/// outward normal is radial, -1 for holes whose outward normal points inward.
struct Circle {
  Complex center{0.0, 0.0};
  double radius = 1.0;
  int orientation = 1;

  Complex point(double theta) const { return center + radius * std::polar(1.0, theta); }
};

struct CircleDomain {
  std::vector<Hole> holes;

  static CircleDomain disk() { return {}; }
  static CircleDomain concentric_annulus(double rho) { return {{Hole{{0.0, 0.0}, rho}}}; }

  /// Number of boundary components k.
  int components() const { return static_cast<int>(holes.size()) + 1; }

  /// Component 0 is the unit circle, component j >= 1 is hole j - 1.
  Circle circle(int component) const;

  bool contains(Complex z) const;
};

/// Throws Error{RadiusNonpositive | HoleOutsideDisk | Overlap}.
void validate(const CircleDomain& domain);

/// Per component, log lambda as a truncated real Fourier series in the
/// circle's angle: [c0, a1, b1, a2, b2, ...] meaning
/// c0 + sum_k (a_k cos k theta + b_k sin k theta).
struct BoundaryDensity {
  std::vector<Eigen::VectorXd> log_coeffs;

  static BoundaryDensity uniform(int components, double value = 1.0);

  int components() const { return static_cast<int>(log_coeffs.size()); }
  double log_value(int component, double theta) const;
  double value(int component, double theta) const;
};

/// Equispaced samples of dmu/dtheta = lambda * r on each circle (the density
/// times the euclidean arclength element).
struct BoundaryMeasureSamples {
  std::vector<Eigen::VectorXd> values;

  int components() const { return static_cast<int>(values.size()); }
  double total_mass() const;
  BoundaryMeasureSamples scaled(double factor) const;
};

BoundaryMeasureSamples sample(const CircleDomain& domain, const BoundaryDensity& density,
                              int grid = kDefaultBoundaryGrid);

/// Sum over components of the integral of lambda ds (trapezoid rule).
double boundary_length(const CircleDomain& domain, const BoundaryDensity& density, int grid = kDefaultBoundaryGrid);
double boundary_length(const BoundaryMeasureSamples& samples);

/// Heat-kernel smoothing with respect to euclidean arclength: on a circle of
/// radius r the Fourier coefficient of index n is damped by exp(-(n/r)^2 eps).
BoundaryMeasureSamples heat_smooth(const CircleDomain& domain, const BoundaryMeasureSamples& samples, double eps);
BoundaryMeasureSamples heat_smooth(const CircleDomain& domain, const BoundaryDensity& density, double eps,
                                   int grid = kDefaultBoundaryGrid);

/// Rescale lambda by one global constant so the boundary length is 1.
BoundaryDensity normalize(const CircleDomain& domain, const BoundaryDensity& density, int grid = kDefaultBoundaryGrid);

/// Density reproducing the measure dtheta on every circle (lambda = 1/r), the
/// image of the flat cylinder metric on a concentric annulus.
BoundaryDensity matched_cylinder_density(const CircleDomain& domain);

}  // namespace steklov
