#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "steklov/closedform.hpp"
#include "steklov/dtn.hpp"
#include "steklov/error.hpp"

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryDensity cosine_density(int components, double a) {
  BoundaryDensity d = BoundaryDensity::uniform(components);
  for (auto& c : d.log_coeffs) c = Eigen::Vector3d(0.0, a, 0.0);
  return d;
}

// Measure f(T) dtheta on both circles of the annulus conformal to [-T, T] x S^1.
BoundaryDensity cylinder_density(const CircleDomain& annulus, double fT) {
  BoundaryDensity d = matched_cylinder_density(annulus);
  for (auto& c : d.log_coeffs) c(0) += std::log(fT);
  return d;
}

}  // namespace

TEST_CASE("disk spectrum") {
  const SteklovSpectrum s = steklov_spectrum(CircleDomain::disk(), BoundaryDensity::uniform(1), 16, 7);
  const double expected[] = {0, 1, 1, 2, 2, 3, 3};
  REQUIRE(s.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK(std::abs(s.eigenvalues(i) - expected[i]) < 1e-8);
  CHECK(s.boundary_length == doctest::Approx(2.0 * kPi));
  CHECK(s.clusters.size() == 4);

  const Sigma1Result r = sigma1(CircleDomain::disk(), BoundaryDensity::uniform(1), 16);
  CHECK(std::abs(r.sigma1 - 1.0) < 1e-8);
  CHECK(r.eigenspace.cols() == 2);
}

TEST_CASE("concentric annulus matches the cylinder closed form") {
  const double T = 1.0;
  const CircleDomain annulus = CircleDomain::concentric_annulus(std::exp(-2.0 * T));
  const SteklovSpectrum s = steklov_spectrum(annulus, cylinder_density(annulus, 1.0), 24, 12);
  const auto exact = closedform::annulus_spectrum(T, 1.0, 8).expanded();
  for (int i = 0; i < 12; ++i) CHECK(std::abs(s.eigenvalues(i) - exact[static_cast<std::size_t>(i)]) < 1e-7);
}

TEST_CASE("random cylinder parameters agree with the closed form on eight eigenvalues") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> UT(0.3, 1.6), Uf(0.5, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double T = UT(rng), fT = Uf(rng);
    const CircleDomain annulus = CircleDomain::concentric_annulus(std::exp(-2.0 * T));
    const SteklovSpectrum s = steklov_spectrum(annulus, cylinder_density(annulus, fT), 24, 8);
    const auto exact = closedform::annulus_spectrum(T, fT, 8).expanded();
    for (int i = 0; i < 8; ++i) CHECK(std::abs(s.eigenvalues(i) - exact[static_cast<std::size_t>(i)]) < 1e-6);
  }
}

TEST_CASE("critical annulus sigma_1 L") {
  const double T0 = closedform::critical_parameter(closedform::Topology::Annulus);
  const CircleDomain annulus = CircleDomain::concentric_annulus(std::exp(-2.0 * T0));
  const Sigma1Result r = sigma1(annulus, matched_cylinder_density(annulus), 24);
  CHECK(std::abs(r.sigma1L - 4.0 * kPi / T0) < 1e-5);
  CHECK(r.eigenspace.cols() == 3);
}

TEST_CASE("Rayleigh-Ritz values decrease with the degree") {
  const BoundaryDensity rho = cosine_density(1, 0.3);
  const double s8 = sigma1(CircleDomain::disk(), rho, 8).sigma1;
  const double s16 = sigma1(CircleDomain::disk(), rho, 16).sigma1;
  const double s24 = sigma1(CircleDomain::disk(), rho, 24).sigma1;
  CHECK(s8 >= s16 - 1e-12);
  CHECK(s16 >= s24 - 1e-12);
}

TEST_CASE("Weinstock: a nonuniform density on the disk stays below 2 pi") {
  CHECK(sigma1(CircleDomain::disk(), cosine_density(1, 0.5), 24).sigma1L < 2.0 * kPi);
}

TEST_CASE("eigenpair invariants") {
  const CircleDomain d{{Hole{{0.3, 0.2}, 0.2}, Hole{{-0.35, -0.1}, 0.15}}};
  BoundaryDensity rho = cosine_density(3, 0.2);
  const int M = 14;
  SteklovSolver solver(d, M);
  const auto measure = sample(d, rho, solver.basis().quadrature_points());
  const EigenSystemMatrices sys = solver.matrices(measure);
  const SteklovSpectrum s = solver.solve(measure);
  CHECK(std::abs(s.eigenvalues(0)) <= 1e-8);
  for (int i = 1; i < s.size(); ++i) CHECK(s.eigenvalues(i) >= s.eigenvalues(i - 1));
  const Eigen::MatrixXd G = s.eigenvectors.transpose() * sys.B * s.eigenvectors;
  CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-8);
  for (int i = 1; i < std::min(12, s.size()); ++i) {
    const Eigen::VectorXd x = s.eigenvectors.col(i);
    const Eigen::VectorXd Bx = sys.B * x;
    CHECK((sys.A * x - s.eigenvalues(i) * Bx).norm() / Bx.norm() < 1e-8);
    CHECK(std::abs(sys.m.dot(x)) < 1e-8);
  }
  CHECK(s.sigma1L() <= coarse_bound(0, 3) + 1e-6);
}

TEST_CASE("sigma_1 L is invariant under density scaling and rotation") {
  const CircleDomain d{{Hole{{0.3, 0.2}, 0.2}}};
  BoundaryDensity rho = BoundaryDensity::uniform(2);
  rho.log_coeffs[0] = Eigen::Vector3d(0.0, 0.3, 0.1);
  rho.log_coeffs[1] = Eigen::Vector3d(0.2, -0.2, 0.25);
  const double base = sigma1(d, rho, 16).sigma1L;

  BoundaryDensity scaled = rho;
  for (auto& c : scaled.log_coeffs) c(0) += std::log(7.0);
  CHECK(std::abs(sigma1(d, scaled, 16).sigma1L - base) < 1e-10 * base);

  // rotate centers by alpha; each circle's density rotates with it
  const double alpha = 0.7;
  CircleDomain rd = d;
  for (auto& h : rd.holes) h.center *= std::polar(1.0, alpha);
  BoundaryDensity rr = rho;
  for (auto& c : rr.log_coeffs) {
    const double a = c(1), b = c(2);
    c(1) = a * std::cos(alpha) - b * std::sin(alpha);
    c(2) = a * std::sin(alpha) + b * std::cos(alpha);
  }
  CHECK(std::abs(sigma1(rd, rr, 16).sigma1L - base) < 1e-8);
}

TEST_CASE("the Steklov boundary residual is small for resolved eigenfunctions") {
  SteklovSolver solver(CircleDomain::disk(), 16);
  const auto measure = sample(CircleDomain::disk(), cosine_density(1, 0.2), solver.basis().quadrature_points());
  const SteklovSpectrum s = solver.solve(measure);
  CHECK(steklov_residual(solver.basis(), measure, s.eigenvalues(1), s.eigenvectors.col(1)) < 1e-8);
  CHECK(steklov_residual(solver.basis(), measure, 2.0 * s.eigenvalues(1), s.eigenvectors.col(1)) > 0.1);
}

TEST_CASE("coarse bound") {
  CHECK(coarse_bound(0, 1) == doctest::Approx(2.0 * kPi));
  CHECK(coarse_bound(0, 2) == doctest::Approx(4.0 * kPi));
  CHECK(coarse_bound(2, 10) == doctest::Approx(16.0 * kPi));
}

TEST_CASE("multiplicity checks") {
  const SteklovSpectrum disk = steklov_spectrum(CircleDomain::disk(), BoundaryDensity::uniform(1), 16, 7);
  const MultiplicityReport r1 = multiplicity_check(disk, 1, 0, true);
  CHECK(r1.cluster_size == 2);
  CHECK(r1.bound == 3);
  CHECK(r1.ok);

  using namespace closedform;
  const auto annulus = annulus_spectrum(critical_parameter(Topology::Annulus), 1.0, 3).expanded();
  const MultiplicityReport r2 =
      multiplicity_check(Eigen::Map<const Eigen::VectorXd>(annulus.data(), static_cast<Eigen::Index>(annulus.size())), 1, 0, true);
  CHECK(r2.cluster_size == 3);
  CHECK(r2.bound == 3);
  CHECK(r2.ok);

  // Moebius band: chi = 0, k = 1, so the genus-like parameter 1 - chi - k is 0
  const auto moebius = moebius_spectrum(critical_parameter(Topology::Moebius), 1.0, 3).expanded();
  const MultiplicityReport r3 =
      multiplicity_check(Eigen::Map<const Eigen::VectorXd>(moebius.data(), static_cast<Eigen::Index>(moebius.size())), 1, 0, false);
  CHECK(r3.cluster_size == 4);
  CHECK(r3.bound == 7);
  CHECK(r3.ok);

  CHECK_THROWS_AS(multiplicity_check(disk, 0, 0, true), Error);
  CHECK_THROWS_AS(multiplicity_check(disk, 7, 0, true), Error);
}

TEST_CASE("cluster grouping") {
  Eigen::VectorXd v(6);
  v << 0.0, 1.0, 1.0 + 1e-9, 2.0, 3.0, 3.0 + 1e-3;
  const auto c = cluster_indices(v);
  REQUIRE(c.size() == 5);
  CHECK(c[1] == std::vector<int>{1, 2});
}
