#pragma once

// d-bar problem on the cylinder [-T, T] x S^1, z = t + i theta:
//   df/dzbar = (f_t + i f_theta) / 2 = k,   Re f = 0 at t = +-T,
// solvable iff int Re k dt dtheta = 0 and unique up to an imaginary
// constant. Used to complete psi nu to a conformal vector field
// Y = u x_t + v x_theta + psi nu on an annulus in B^3, with f = u + i v.

#include <array>
#include <complex>
#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "steklov/surfaces.hpp"

namespace steklov {

using Complex = std::complex<double>;

enum class DbarSymmetry {
  None,
  MoebiusOdd,  // f(-t, theta + pi) = -conj(f(t, theta))
};

struct DbarGrid {
  int nt = 128;      // Chebyshev order; nt + 1 Lobatto nodes in t
  int ntheta = 128;  // equispaced points in theta, modes |n| < ntheta / 2
};

struct DbarProblem {
  double T = 1.0;
  DbarGrid grid;
  Eigen::MatrixXcd rhs;  // (nt + 1) x ntheta samples of k at (t_j, theta_l)
  DbarSymmetry symmetry = DbarSymmetry::None;
};

/// Lobatto nodes T cos(pi j / nt), descending from T to -T.
Eigen::VectorXd dbar_t_nodes(double T, int nt);

/// Samples k on the grid of the problem.
DbarProblem make_dbar_problem(double T, const std::function<Complex(double t, double theta)>& k, DbarGrid grid = {},
                              DbarSymmetry symmetry = DbarSymmetry::None);

struct DbarJet {
  Complex f, ft, fs;
};

struct DbarSolution {
  double T = 1.0;
  Eigen::VectorXd t;             // Lobatto nodes, descending
  int ntheta = 0;
  Eigen::MatrixXcd f, ft, fs;    // values and derivatives at the grid points
  double solvability_residual = 0.0;  // |int Re k dt dtheta|
  double dbar_residual = 0.0;         // max |(f_t + i f_theta)/2 - k|
  double boundary_residual = 0.0;     // max |Re f| on t = +-T
  double tail_norm = 0.0;             // l2 norm of the upper half of k's theta spectrum
  double boundary_conditioning = 0.0; // worst condition number of the per-mode boundary systems

  /// Spectral interpolation at any (t, theta) in the cylinder.
  DbarJet evaluate(double t, double theta) const;

  /// Theta-mode coefficients of f and f_t at height t, reusable across theta.
  struct Modes {
    Eigen::VectorXcd f, ft;
  };
  Modes modes_at(double t) const;
  DbarJet evaluate(const Modes& modes, double theta) const;

 private:
  friend DbarSolution solve_dbar(const DbarProblem& problem);
  Eigen::MatrixXcd fhat_, fthat_;  // per node row, theta-mode coefficients in FFT order
};

/// Mode-by-mode Chebyshev collocation: the pair (n, -n) solves
/// f_n' - n f_n = 2 k_n with f_n + conj(f_{-n}) = 0 at both ends, closed by a
/// 2 x 2 complex boundary system; the imaginary constant is gauged to zero
/// mean of Im f. Throws Unsolvable when |int Re k| > 1e-8 int |k|.
DbarSolution solve_dbar(const DbarProblem& problem);

struct ConformalFieldSpace {
  std::array<ScalarField, 4> basis;  // nu_1, nu_2, nu_3, x . nu
  Eigen::RowVector4d constraints;    // int Re(psi (h11 + i h12)) / |x_t|^2 dt dtheta per basis function
  Eigen::MatrixXd kernel;            // 4 x dim(C_1), orthonormal coefficient vectors
  Eigen::Matrix4d gram;              // L^2(Sigma) Gram matrix of the basis
  double gram_min_eigenvalue = 0.0;
  int dimension = 0;                 // numerical rank of the Gram matrix

  int kernel_dimension() const { return static_cast<int>(kernel.cols()); }
  ScalarField element(const Eigen::Vector4d& coeffs) const;
};

/// Constraint row and its kernel (singular value threshold 1e-8) for an
/// annulus or disk in B^3 that passes verify_minimal_free_boundary at 1e-8.
ConformalFieldSpace conformal_field_space(const ParametricSurface& surface);

struct ConformalVariation {
  VariationField Y;
  DbarSolution dbar;
  double residual_angle = 0.0;   // max |D_e1 Y . e2 + D_e2 Y . e1|
  double residual_length = 0.0;  // max |D_e1 Y . e1 - D_e2 Y . e2|
  double boundary_tangency = 0.0;
};

/// Y = Y^t + psi nu with Y^t = u x_t + v x_theta from the d-bar solution
/// with k = psi (h11 + i h12) / |x_t|^2. Propagates Unsolvable when psi
/// violates the constraint.
ConformalVariation build_conformal_variation(const ParametricSurface& surface, const ScalarField& psi,
                                             DbarGrid grid = {});

struct AreaEnergyReport {
  double Q = 0.0;  // Q(Y, Y)
  double S = 0.0;  // S(psi nu, psi nu)
  double residual = 0.0;  // |Q - S| / (1 + |S|)
};

AreaEnergyReport verify_area_energy(const ParametricSurface& surface, const ScalarField& psi,
                                    const VariationField& Y);

}  // namespace steklov
