#pragma once

// Harmonic trial functions on a circle domain and the Galerkin matrices of
// the Steklov problem: Dirichlet energy A, weighted boundary mass B, and the
// boundary means m that encode the constraint int u dmu = 0.

#include <vector>

#include <Eigen/Dense>

#include "steklov/domain.hpp"

namespace steklov {

inline constexpr int kMaxBasisDegree = 64;

/// Values and outward normal derivatives of every basis element at the
/// equispaced quadrature points of one boundary circle.
struct CircleTrace {
  Eigen::MatrixXd values;  // quadrature points x basis size
  Eigen::MatrixXd normal;  // outward (from the domain) normal derivative
};

/// Elements, in order: 1; Re z^m, Im z^m (m = 1..M); then per hole j:
/// log|z - c_j|, Re (r_j/(z - c_j))^m, Im (r_j/(z - c_j))^m (m = 1..M).
class HarmonicBasis {
 public:
  HarmonicBasis(CircleDomain domain, int degree);

  const CircleDomain& domain() const { return domain_; }
  int degree() const { return degree_; }
  int size() const { return size_; }
  /// Quadrature points per circle, max(256, 8M) rounded up to a power of two.
  int quadrature_points() const { return quadrature_points_; }

  const CircleTrace& trace(int component) const { return traces_[static_cast<std::size_t>(component)]; }

  /// All element values at z.
  Eigen::VectorXd values(Complex z) const;
  /// All element values and gradient components at z.
  void evaluate(Complex z, Eigen::Ref<Eigen::VectorXd> values, Eigen::Ref<Eigen::VectorXd> grad_x,
                Eigen::Ref<Eigen::VectorXd> grad_y) const;

  /// Boundary values of sum_i coeffs(i) phi_i on circle `component`.
  Eigen::VectorXd trace_of(int component, const Eigen::VectorXd& coeffs) const {
    return trace(component).values * coeffs;
  }

 private:
  CircleDomain domain_;
  int degree_;
  int size_;
  int quadrature_points_;
  std::vector<CircleTrace> traces_;
};

struct EigenSystemMatrices {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd m;
};

/// A_ij = boundary integral of phi_i d(phi_j)/d(eta) ds, symmetrized.
Eigen::MatrixXd dirichlet_matrix(const HarmonicBasis& basis);

struct BoundaryMatrices {
  Eigen::MatrixXd B;
  Eigen::VectorXd m;
};

/// B_ij = int phi_i phi_j dmu, m_i = int phi_i dmu. Samples are resampled to
/// the basis quadrature grid; they must be strictly positive.
BoundaryMatrices boundary_matrices(const HarmonicBasis& basis, const BoundaryMeasureSamples& measure);

/// Measure samples resampled to the basis quadrature grid, weighted by the
/// trapezoid step: sum_q f(q) w(q) approximates the integral of f dmu.
std::vector<Eigen::VectorXd> quadrature_weights(const HarmonicBasis& basis, const BoundaryMeasureSamples& measure);

EigenSystemMatrices assemble(const HarmonicBasis& basis, const BoundaryMeasureSamples& measure);

}  // namespace steklov
