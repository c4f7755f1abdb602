#pragma once

// Discrete Dirichlet-to-Neumann spectrum: Rayleigh-Ritz on the harmonic
// basis, plus the coarse upper bound and multiplicity bounds as checkers.

#include <vector>

#include <Eigen/Dense>

#include "steklov/basis.hpp"
#include "steklov/domain.hpp"

namespace steklov {

inline constexpr double kClusterTol = 1e-6;
inline constexpr double kPivotTol = 1e-10;

struct SpectrumOptions {
  double cluster_tol = kClusterTol;
  double pivot_tol = kPivotTol;
};

struct SteklovSpectrum {
  Eigen::VectorXd eigenvalues;   // nondecreasing, eigenvalues(0) = 0
  Eigen::MatrixXd eigenvectors;  // basis coefficients, B-orthonormal columns
  std::vector<std::vector<int>> clusters;
  int degree = 0;
  int quadrature_points = 0;
  int dropped = 0;  // basis directions removed by the mass pivot threshold
  double boundary_length = 0.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double sigma1() const { return eigenvalues(1); }
  double sigma1L() const { return eigenvalues(1) * boundary_length; }
  /// Index of the cluster containing eigenvalue i.
  int cluster_index(int i) const;
};

/// Groups a sorted list into runs whose consecutive relative gaps are < tol.
std::vector<std::vector<int>> cluster_indices(const Eigen::VectorXd& sorted, double tol = kClusterTol);

/// Solves A x = sigma B x on the B-orthogonal complement of the constant
/// (basis element 0). n_eigs counts sigma_0; -1 returns every Ritz value.
SteklovSpectrum solve_generalized(const EigenSystemMatrices& sys, int n_eigs = -1, const SpectrumOptions& opt = {});

/// Holds the basis and the density-independent Dirichlet matrix of one
/// domain so repeated solves only reassemble B.
class SteklovSolver {
 public:
  SteklovSolver(CircleDomain domain, int degree, SpectrumOptions opt = {});

  const HarmonicBasis& basis() const { return basis_; }
  const CircleDomain& domain() const { return basis_.domain(); }
  const Eigen::MatrixXd& dirichlet() const { return A_; }
  const SpectrumOptions& options() const { return opt_; }

  EigenSystemMatrices matrices(const BoundaryMeasureSamples& measure) const;
  SteklovSpectrum solve(const BoundaryMeasureSamples& measure, int n_eigs = -1) const;

 private:
  HarmonicBasis basis_;
  Eigen::MatrixXd A_;
  SpectrumOptions opt_;
};

SteklovSpectrum steklov_spectrum(const CircleDomain& domain, const BoundaryDensity& density, int degree, int n_eigs,
                                 const SpectrumOptions& opt = {});

struct Sigma1Result {
  double sigma1 = 0.0;
  double sigma1L = 0.0;
  Eigen::MatrixXd eigenspace;  // B-orthonormal coefficient vectors of the sigma_1 cluster
};

Sigma1Result sigma1(const CircleDomain& domain, const BoundaryDensity& density, int degree,
                    const SpectrumOptions& opt = {});
Sigma1Result sigma1(const SteklovSpectrum& spectrum);

/// Pointwise boundary residual of an eigenpair, max |d_n u - sigma rho u| /
/// max |d_n u| with rho = (dmu/dtheta) / r the arclength density. Galerkin
/// solutions that resolve the measure give values near roundoff.
double steklov_residual(const HarmonicBasis& basis, const BoundaryMeasureSamples& measure, double sigma,
                        const Eigen::VectorXd& coeffs);

/// min{2(genus + k) pi, 8 pi floor((genus + 3)/2)}.
double coarse_bound(int genus, int k);

/// 4 genus + 2 i + 1 for orientable surfaces; 4 g + 4 i + 3 for
/// non-orientable ones where g = 1 - chi - k.
int multiplicity_bound(int genus, int i, bool orientable);

struct MultiplicityReport {
  int cluster_size = 0;
  int bound = 0;
  bool ok = false;
};

/// Size of the cluster containing eigenvalue i versus the applicable bound.
/// Throws IndexOutOfRange for i < 1 or i beyond the list.
MultiplicityReport multiplicity_check(const Eigen::VectorXd& sorted_eigenvalues, int i, int genus, bool orientable,
                                      double tol = kClusterTol);
MultiplicityReport multiplicity_check(const SteklovSpectrum& spectrum, int i, int genus, bool orientable);

}  // namespace steklov
