#include "steklov/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "steklov/error.hpp"
#include "steklov/fourier.hpp"

namespace steklov {

namespace {

// Writes Re F, Im F and their gradients for analytic F with derivative dF.
inline void put_pair(Eigen::Ref<Eigen::VectorXd> v, Eigen::Ref<Eigen::VectorXd> gx, Eigen::Ref<Eigen::VectorXd> gy,
                     int idx, Complex F, Complex dF) {
  v(idx) = F.real();
  gx(idx) = dF.real();
  gy(idx) = -dF.imag();
  v(idx + 1) = F.imag();
  gx(idx + 1) = dF.imag();
  gy(idx + 1) = dF.real();
}

}  // namespace

HarmonicBasis::HarmonicBasis(CircleDomain domain, int degree) : domain_(std::move(domain)), degree_(degree) {
  if (degree < 1 || degree > kMaxBasisDegree) {
    throw Error(ErrorCode::DegreeTooLarge, "basis degree must be in [1, " + std::to_string(kMaxBasisDegree) +
                                               "], got " + std::to_string(degree));
  }
  validate(domain_);
  size_ = (1 + 2 * degree_) * domain_.components();
  quadrature_points_ = fourier::next_power_of_two(std::max(256, 8 * degree_));

  const int nq = quadrature_points_;
  Eigen::VectorXd v(size_), gx(size_), gy(size_);
  for (int c = 0; c < domain_.components(); ++c) {
    const Circle circ = domain_.circle(c);
    CircleTrace tr{Eigen::MatrixXd(nq, size_), Eigen::MatrixXd(nq, size_)};
    for (int q = 0; q < nq; ++q) {
      const double theta = 2.0 * std::numbers::pi * q / nq;
      const Complex e = std::polar(1.0, theta);
      const Complex z = circ.center + circ.radius * e;
      evaluate(z, v, gx, gy);
      const double nx = circ.orientation * e.real();
      const double ny = circ.orientation * e.imag();
      tr.values.row(q) = v.transpose();
      tr.normal.row(q) = (gx * nx + gy * ny).transpose();
    }
    traces_.push_back(std::move(tr));
  }
}

Eigen::VectorXd HarmonicBasis::values(Complex z) const {
  Eigen::VectorXd v(size_), gx(size_), gy(size_);
  evaluate(z, v, gx, gy);
  return v;
}

void HarmonicBasis::evaluate(Complex z, Eigen::Ref<Eigen::VectorXd> v, Eigen::Ref<Eigen::VectorXd> gx,
                             Eigen::Ref<Eigen::VectorXd> gy) const {
  const int M = degree_;
  v(0) = 1.0;
  gx(0) = 0.0;
  gy(0) = 0.0;

  Complex zpow(1.0, 0.0);  // z^{m-1}
  for (int m = 1; m <= M; ++m) {
    const Complex dF = static_cast<double>(m) * zpow;
    zpow *= z;
    put_pair(v, gx, gy, 1 + 2 * (m - 1), zpow, dF);
  }

  for (std::size_t j = 0; j < domain_.holes.size(); ++j) {
    const Hole& h = domain_.holes[j];
    const int off = static_cast<int>((1 + 2 * M) * (j + 1));
    const Complex d = z - h.center;
    v(off) = std::log(std::abs(d));
    const Complex inv = 1.0 / d;
    gx(off) = inv.real();
    gy(off) = -inv.imag();
    const Complex w = h.radius * inv;
    Complex wpow = w;  // w^m
    for (int m = 1; m <= M; ++m) {
      // d/dz w^m = -m w^{m+1} / r
      const Complex dF = -static_cast<double>(m) * wpow * w / h.radius;
      put_pair(v, gx, gy, off + 1 + 2 * (m - 1), wpow, dF);
      wpow *= w;
    }
  }
}

Eigen::MatrixXd dirichlet_matrix(const HarmonicBasis& basis) {
  const int n = basis.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  const double h = 2.0 * std::numbers::pi / basis.quadrature_points();
  for (int c = 0; c < basis.domain().components(); ++c) {
    const CircleTrace& tr = basis.trace(c);
    const double ds = basis.domain().circle(c).radius * h;
    A.noalias() += ds * tr.values.transpose() * tr.normal;
  }
  return (A + A.transpose()) / 2.0;
}

std::vector<Eigen::VectorXd> quadrature_weights(const HarmonicBasis& basis, const BoundaryMeasureSamples& measure) {
  const int k = basis.domain().components();
  if (measure.components() != k) {
    throw Error(ErrorCode::DomainError, "measure has " + std::to_string(measure.components()) +
                                            " components, domain has " + std::to_string(k));
  }
  const int nq = basis.quadrature_points();
  const double h = 2.0 * std::numbers::pi / nq;
  std::vector<Eigen::VectorXd> w;
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd mu = fourier::resample(measure.values[static_cast<std::size_t>(c)], nq);
    if (!(mu.minCoeff() > 0.0) || !mu.allFinite()) {
      throw Error(ErrorCode::NonPositiveDensity, "boundary density must be strictly positive on component " +
                                                     std::to_string(c));
    }
    w.push_back(mu * h);
  }
  return w;
}

BoundaryMatrices boundary_matrices(const HarmonicBasis& basis, const BoundaryMeasureSamples& measure) {
  const int n = basis.size();
  const auto weights = quadrature_weights(basis, measure);
  BoundaryMatrices out{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  for (int c = 0; c < basis.domain().components(); ++c) {
    const Eigen::MatrixXd& V = basis.trace(c).values;
    const Eigen::VectorXd& w = weights[static_cast<std::size_t>(c)];
    const Eigen::MatrixXd WV = V.array().colwise() * w.array();
    out.B.noalias() += V.transpose() * WV;
    out.m.noalias() += V.transpose() * w;
  }
  out.B = (out.B + out.B.transpose()) / 2.0;
  return out;
}

EigenSystemMatrices assemble(const HarmonicBasis& basis, const BoundaryMeasureSamples& measure) {
  auto bm = boundary_matrices(basis, measure);
  return {dirichlet_matrix(basis), std::move(bm.B), std::move(bm.m)};
}

}  // namespace steklov
