#include "steklov/dtn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "steklov/error.hpp"

namespace steklov {

namespace {

// Right-looking pivoted Cholesky with the first pivot forced to index 0.
// On return L is r x r lower triangular with B(piv, piv) = L L^T.
struct PivotedCholesky {
  Eigen::MatrixXd L;
  std::vector<int> pivots;
};

PivotedCholesky pivoted_cholesky(const Eigen::MatrixXd& B, double rel_tol) {
  const int n = static_cast<int>(B.rows());
  Eigen::MatrixXd W = B;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  const double scale = B.diagonal().maxCoeff();
  Eigen::MatrixXd Lfull = Eigen::MatrixXd::Zero(n, n);
  int r = 0;
  for (int j = 0; j < n; ++j) {
    int p = j;
    if (j > 0) W.diagonal().tail(n - j).maxCoeff(&p), p += j;
    if (!(W(p, p) > rel_tol * scale)) break;
    if (p != j) {
      W.row(j).swap(W.row(p));
      W.col(j).swap(W.col(p));
      Lfull.row(j).swap(Lfull.row(p));
      std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(p)]);
    }
    const double d = std::sqrt(W(j, j));
    Lfull(j, j) = d;
    const int rest = n - j - 1;
    if (rest > 0) {
      Lfull.col(j).tail(rest) = W.col(j).tail(rest) / d;
      const Eigen::VectorXd v = Lfull.col(j).tail(rest);
      W.bottomRightCorner(rest, rest).noalias() -= v * v.transpose();
    }
    ++r;
  }
  PivotedCholesky out;
  out.L = Lfull.topLeftCorner(r, r);
  out.pivots.assign(perm.begin(), perm.begin() + r);
  return out;
}

}  // namespace

std::vector<std::vector<int>> cluster_indices(const Eigen::VectorXd& sorted, double tol) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < sorted.size(); ++i) {
    const bool join = i > 0 && std::abs(sorted(i) - sorted(i - 1)) <=
                                   tol * std::max(std::abs(sorted(i)), std::abs(sorted(i - 1)));
    if (join) {
      clusters.back().push_back(i);
    } else {
      clusters.push_back({i});
    }
  }
  return clusters;
}

int SteklovSpectrum::cluster_index(int i) const {
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (std::find(clusters[c].begin(), clusters[c].end(), i) != clusters[c].end()) return static_cast<int>(c);
  }
  throw Error(ErrorCode::IndexOutOfRange, "eigenvalue index " + std::to_string(i) + " not in spectrum");
}

SteklovSpectrum solve_generalized(const EigenSystemMatrices& sys, int n_eigs, const SpectrumOptions& opt) {
  const int n = static_cast<int>(sys.B.rows());
  if (n < 2) throw Error(ErrorCode::DomainError, "basis too small for a nontrivial spectrum");

  const PivotedCholesky chol = pivoted_cholesky(sys.B, opt.pivot_tol);
  const int r = static_cast<int>(chol.pivots.size());
  if (r < 2) throw Error(ErrorCode::MassMatrixDegenerate, "weighted boundary mass matrix has rank < 2");

  Eigen::MatrixXd As(r, r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) As(a, b) = sys.A(chol.pivots[static_cast<std::size_t>(a)],
                                               chol.pivots[static_cast<std::size_t>(b)]);
  }
  const auto Lv = chol.L.triangularView<Eigen::Lower>();
  // C = L^{-1} A L^{-T}
  Eigen::MatrixXd C = Lv.solve(As);
  C = Lv.solve(C.transpose()).eval();
  C = (C + C.transpose()) / 2.0;
  if (!C.allFinite()) throw Error(ErrorCode::ConditioningFailure, "reduced stiffness matrix is not finite");

  // deflate the constant: it is pivot 0, so it spans the first reduced coordinate
  const Eigen::MatrixXd Cd = C.bottomRightCorner(r - 1, r - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Cd);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::ConditioningFailure, "symmetric eigensolver failed");
  const double cscale = std::max(1.0, Cd.cwiseAbs().maxCoeff());
  if (es.eigenvalues()(0) < -1e-8 * cscale) {
    throw Error(ErrorCode::ConditioningFailure, "negative Ritz value " + std::to_string(es.eigenvalues()(0)));
  }

  const int total = r;  // sigma_0 plus r - 1 Ritz values
  const int count = n_eigs < 0 ? total : std::min(n_eigs, total);
  if (count < 1) throw Error(ErrorCode::DomainError, "n_eigs must be positive");

  SteklovSpectrum s;
  s.eigenvalues.resize(count);
  s.eigenvectors = Eigen::MatrixXd::Zero(n, count);
  s.dropped = n - r;
  s.boundary_length = sys.m(0);

  s.eigenvalues(0) = 0.0;
  s.eigenvectors(0, 0) = 1.0 / std::sqrt(sys.B(0, 0));
  if (count > 1) {
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(r, count - 1);
    Y.bottomRows(r - 1) = es.eigenvectors().leftCols(count - 1);
    const Eigen::MatrixXd X = Lv.transpose().solve(Y);
    for (int a = 0; a < r; ++a) s.eigenvectors.row(chol.pivots[static_cast<std::size_t>(a)]).tail(count - 1) = X.row(a);
    s.eigenvalues.tail(count - 1) = es.eigenvalues().head(count - 1).cwiseMax(0.0);
  }
  s.clusters = cluster_indices(s.eigenvalues, opt.cluster_tol);
  return s;
}

SteklovSolver::SteklovSolver(CircleDomain domain, int degree, SpectrumOptions opt)
    : basis_(std::move(domain), degree), A_(dirichlet_matrix(basis_)), opt_(opt) {}

EigenSystemMatrices SteklovSolver::matrices(const BoundaryMeasureSamples& measure) const {
  auto bm = boundary_matrices(basis_, measure);
  return {A_, std::move(bm.B), std::move(bm.m)};
}

SteklovSpectrum SteklovSolver::solve(const BoundaryMeasureSamples& measure, int n_eigs) const {
  SteklovSpectrum s = solve_generalized(matrices(measure), n_eigs, opt_);
  s.degree = basis_.degree();
  s.quadrature_points = basis_.quadrature_points();
  return s;
}

SteklovSpectrum steklov_spectrum(const CircleDomain& domain, const BoundaryDensity& density, int degree, int n_eigs,
                                 const SpectrumOptions& opt) {
  SteklovSolver solver(domain, degree, opt);
  if (n_eigs < 1 || n_eigs > solver.basis().size() - 1) {
    throw Error(ErrorCode::DomainError, "n_eigs must be in [1, basis size - 1]");
  }
  return solver.solve(sample(domain, density), n_eigs);
}

Sigma1Result sigma1(const SteklovSpectrum& s) {
  if (s.size() < 2) throw Error(ErrorCode::IndexOutOfRange, "spectrum has no sigma_1");
  const auto& cl = s.clusters[static_cast<std::size_t>(s.cluster_index(1))];
  Sigma1Result out;
  out.sigma1 = s.sigma1();
  out.sigma1L = s.sigma1L();
  out.eigenspace.resize(s.eigenvectors.rows(), static_cast<Eigen::Index>(cl.size()));
  for (std::size_t j = 0; j < cl.size(); ++j) out.eigenspace.col(static_cast<Eigen::Index>(j)) = s.eigenvectors.col(cl[j]);
  return out;
}

Sigma1Result sigma1(const CircleDomain& domain, const BoundaryDensity& density, int degree,
                    const SpectrumOptions& opt) {
  SteklovSolver solver(domain, degree, opt);
  return sigma1(solver.solve(sample(domain, density)));
}

double steklov_residual(const HarmonicBasis& basis, const BoundaryMeasureSamples& measure, double sigma,
                        const Eigen::VectorXd& coeffs) {
  const auto w = quadrature_weights(basis, measure);
  const double h = 2.0 * std::numbers::pi / basis.quadrature_points();
  double num = 0.0, den = 0.0;
  for (int c = 0; c < basis.domain().components(); ++c) {
    const CircleTrace& tr = basis.trace(c);
    const Eigen::VectorXd dn = tr.normal * coeffs;
    const Eigen::VectorXd rho = w[static_cast<std::size_t>(c)] / (h * basis.domain().circle(c).radius);
    const Eigen::VectorXd u = tr.values * coeffs;
    num = std::max(num, (dn.array() - sigma * rho.array() * u.array()).abs().maxCoeff());
    den = std::max(den, dn.cwiseAbs().maxCoeff());
  }
  if (!(den > 0.0)) throw Error(ErrorCode::NotAnEigenfunction, "function has zero normal derivative");
  return num / den;
}

double coarse_bound(int genus, int k) {
  if (genus < 0 || k < 1) throw Error(ErrorCode::DomainError, "coarse_bound needs genus >= 0 and k >= 1");
  const double a = 2.0 * (genus + k) * std::numbers::pi;
  const double b = 8.0 * std::numbers::pi * ((genus + 3) / 2);
  return std::min(a, b);
}

int multiplicity_bound(int genus, int i, bool orientable) {
  return orientable ? 4 * genus + 2 * i + 1 : 4 * genus + 4 * i + 3;
}

MultiplicityReport multiplicity_check(const Eigen::VectorXd& sorted, int i, int genus, bool orientable, double tol) {
  if (i < 1 || i >= sorted.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "eigenvalue index " + std::to_string(i) + " out of range");
  }
  const auto clusters = cluster_indices(sorted, tol);
  MultiplicityReport rep;
  for (const auto& c : clusters) {
    if (std::find(c.begin(), c.end(), i) != c.end()) rep.cluster_size = static_cast<int>(c.size());
  }
  rep.bound = multiplicity_bound(genus, i, orientable);
  rep.ok = rep.cluster_size <= rep.bound;
  return rep;
}

MultiplicityReport multiplicity_check(const SteklovSpectrum& s, int i, int genus, bool orientable) {
  if (i < 1 || i >= s.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "eigenvalue index " + std::to_string(i) + " out of range");
  }
  MultiplicityReport rep;
  rep.cluster_size = static_cast<int>(s.clusters[static_cast<std::size_t>(s.cluster_index(i))].size());
  rep.bound = multiplicity_bound(genus, i, orientable);
  rep.ok = rep.cluster_size <= rep.bound;
  return rep;
}

}  // namespace steklov
