#pragma once

// Maximization of sigma_1 L over heat-smoothed boundary measures on a fixed
// circle domain, over cyclic circle-domain moduli, and the extremality
// certificate (|u|^2 = 1 on the boundary, u conformal) at a candidate optimum.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "steklov/dtn.hpp"

namespace steklov {

struct AscentOptions {
  int degree = 16;          // harmonic basis degree M
  int density_degree = 8;   // Fourier degree of log(dmu/dtheta) per component
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4};
  int max_iters = 200;      // per smoothing phase
  double rel_improvement = 1e-9;
  double cluster_window = 1e-3;  // relative width of the reported sigma_1 cluster
  double model_window = 5e-2;    // eigenvalues kept in the ascent step model
  int max_backtracks = 40;
  double resolution_tol = 1e-5;  // max boundary residual of accepted sigma_1 eigenfunctions
};

struct TracePoint {
  int iteration = 0;
  double eps = 0.0;
  double value = 0.0;
};

struct AscentState {
  CircleDomain domain;
  BoundaryDensity density;  // the smoothed optimum, normalized to L = 1
  double eps = 0.0;
  double value = 0.0;       // sigma_1 L of `density`
  std::vector<TracePoint> trace;
  Eigen::MatrixXd eigenspace;
  int iterations = 0;
  int eigensolves = 0;
  bool stalled = false;  // the last phase ended without an ascent direction
  bool unresolved = false;  // the schedule stopped early: the basis no longer resolved the measure
};

/// First variation of sigma_1 under dmu -> (1 + psi) dmu, as a boundary
/// function per component on the basis quadrature grid:
/// -sigma_1 (u^2 - int u^2 dmu / int dmu). `u` holds basis coefficients and
/// is B-normalized internally. Throws NotAnEigenfunction when the relative
/// residual |A u - sigma B u| / |B u| exceeds tol.
std::vector<Eigen::VectorXd> density_gradient(const SteklovSolver& solver, const BoundaryMeasureSamples& measure,
                                              const Eigen::VectorXd& u, double tol = 1e-8);

/// Measure samples of exp(coefficients) per circle, on `grid` points. The
/// coefficients describe log(dmu/dtheta), so zero coefficients give dtheta.
BoundaryMeasureSamples angular_measure(const std::vector<Eigen::VectorXd>& log_coeffs, int grid);

/// Best fit of log(dmu/dtheta) by a real Fourier series of the given degree,
/// expressed as a BoundaryDensity (log lambda coefficients).
BoundaryDensity density_from_measure(const CircleDomain& domain, const BoundaryMeasureSamples& measure, int degree);

/// Ascent in log-density for each eps of the schedule, starting at `init`.
AscentState optimize_density(const CircleDomain& domain, const BoundaryDensity& init, const AscentOptions& opt = {});

/// Same, reusing a solver whose domain is fixed.
AscentState optimize_density(const SteklovSolver& solver, const BoundaryDensity& init, const AscentOptions& opt);

enum class Symmetry { None, Cyclic };

struct ConfigurationOptions {
  Symmetry symmetry = Symmetry::Cyclic;
  int budget = 20000;  // eigensolves spent on probes
  AscentOptions probe{
      .degree = 12, .density_degree = 6, .eps_schedule = {1e-3}, .max_iters = 60, .rel_improvement = 1e-7};
  AscentOptions polish{.degree = 16, .density_degree = 10, .max_iters = 300, .rel_improvement = 1e-11};
  double ring_radius = 0.55;
  double hole_radius_factor = 0.25;  // initial hole radius = factor / k
  double simplex_tol = 1e-9;
};

struct ConfigurationResult {
  CircleDomain domain;
  BoundaryDensity density;
  double value = 0.0;
  AscentState polished;
  int eigensolves = 0;
  int probes = 0;
  bool budget_exhausted = false;
};

/// Holes of a configuration under the given symmetry. Cyclic: k - 1 holes
/// of radius r on a ring of radius s, params = (s, log r). None: per hole
/// (cx, cy, log r).
CircleDomain configuration_domain(int k, Symmetry symmetry, const std::vector<double>& params);

/// Conformally equivalent representative used for evaluation: a one-hole
/// domain maps to the concentric annulus of the same modulus; domains with
/// more holes are returned unchanged.
CircleDomain conformal_normal_form(const CircleDomain& domain);

/// Derivative-free simplex search over moduli with an inner density ascent
/// at each probe, followed by a full-schedule polish at the best point.
ConfigurationResult optimize_configuration(int k, const ConfigurationOptions& opt = {},
                                           const std::function<void(const TracePoint&)>& on_probe = {});

struct SweepEntry {
  int k = 0;
  double value = 0.0;
  bool budget_exhausted = false;
  ConfigurationResult result;
};

/// optimize_configuration per k (k = 1 is the disk: density ascent only).
/// Entries may run concurrently on up to `threads` workers.
std::vector<SweepEntry> sweep_k(const std::vector<int>& ks, const ConfigurationOptions& opt = {}, int threads = 1);

struct Certificate {
  Eigen::MatrixXd coefficients;  // PSD over the eigenspace
  Eigen::MatrixXd maps;          // rows: coefficient vectors of u_i = sum_a R_ia u_a
  double residual_boundary = 0.0;
  double residual_conformal = 0.0;
  int n = 0;
  bool eigenspace_too_small = false;
};

/// Least squares over PSD C of the boundary condition sum C_ab u_a u_b = 1
/// (weighted by mu) plus the interior condition sum C_ab tau(u_a, u_b) = 0
/// on a polar grid (grid x grid points inside the domain).
Certificate extremality_certificate(const HarmonicBasis& basis, const BoundaryMeasureSamples& measure,
                                    const Eigen::MatrixXd& eigenspace, int grid = 64);

}  // namespace steklov
