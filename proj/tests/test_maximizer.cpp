#include <doctest.h>

#include <cmath>
#include <numbers>

#include "steklov/closedform.hpp"
#include "steklov/error.hpp"
#include "steklov/maximizer.hpp"

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryDensity cosine_density(double a) {
  BoundaryDensity d = BoundaryDensity::uniform(1);
  d.log_coeffs[0] = Eigen::Vector3d(0.0, a, 0.0);
  return d;
}

double critical_annulus_value() { return closedform::critical_sigma1L(closedform::Topology::Annulus); }

}  // namespace

TEST_CASE("density gradient on the uniform disk") {
  SteklovSolver solver(CircleDomain::disk(), 8);
  const auto measure = sample(CircleDomain::disk(), BoundaryDensity::uniform(1), solver.basis().quadrature_points());
  const SteklovSpectrum s = solver.solve(measure);
  const int N = solver.basis().quadrature_points();

  SUBCASE("u = cos theta gives a multiple of cos^2 - 1/2") {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(solver.basis().size());
    u(1) = 1.0 / std::sqrt(kPi);  // Re z
    const auto g = density_gradient(solver, measure, u);
    REQUIRE(g.size() == 1);
    Eigen::VectorXd shape(N);
    for (int q = 0; q < N; ++q) shape(q) = std::pow(std::cos(2.0 * kPi * q / N), 2) - 0.5;
    const double c = g[0].dot(shape) / shape.squaredNorm();
    CHECK(c < 0.0);
    CHECK((g[0] - c * shape).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("constant |u|^2 on the boundary is stationary") {
    // u = cos theta + sin theta has u^2 = 1 + sin 2 theta; the pair sum is the constant
    Eigen::VectorXd c = Eigen::VectorXd::Zero(solver.basis().size()), s2 = c;
    c(1) = 1.0;
    s2(2) = 1.0;
    const auto gc = density_gradient(solver, measure, c);
    const auto gs = density_gradient(solver, measure, s2);
    CHECK((gc[0] + gs[0]).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("the sign of u does not matter") {
    const Eigen::VectorXd u = s.eigenvectors.col(1);
    const auto a = density_gradient(solver, measure, u);
    const auto b = density_gradient(solver, measure, -u);
    CHECK((a[0] - b[0]).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("non-eigenvectors are rejected") {
    Eigen::VectorXd u = s.eigenvectors.col(1) + s.eigenvectors.col(3);
    CHECK_THROWS_AS(density_gradient(solver, measure, u), Error);
  }
}

TEST_CASE("angular measures and their Fourier fit") {
  std::vector<Eigen::VectorXd> coeffs{Eigen::VectorXd::Zero(5)};
  const auto flat = angular_measure(coeffs, 64);
  CHECK((flat.values[0].array() - 1.0).abs().maxCoeff() < 1e-15);

  coeffs[0] << 0.1, 0.3, -0.2, 0.05, 0.0;
  const auto m = angular_measure(coeffs, 128);
  const BoundaryDensity d = density_from_measure(CircleDomain::disk(), m, 2);
  const auto back = sample(CircleDomain::disk(), d, 128);
  CHECK((back.values[0] - m.values[0]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("density ascent on the disk reaches Weinstock's bound") {
  AscentOptions opt;
  opt.degree = 12;
  opt.density_degree = 4;
  const AscentState st = optimize_density(CircleDomain::disk(), cosine_density(0.4), opt);
  CHECK(st.value >= 2.0 * kPi - 1e-5);
  CHECK(st.value <= 2.0 * kPi + 1e-8);
  // Maximizers are unique only up to disk automorphisms: the optimal measure
  // is the pullback of dtheta, a Poisson kernel (1 - |a|^2) / |e^{i theta} - a|^2.
  const int n = 256;
  const Eigen::VectorXd m = sample(CircleDomain::disk(), st.density, n).values[0];
  Complex c1(0.0, 0.0);
  for (int q = 0; q < n; ++q) c1 += m(q) * std::polar(1.0, -2.0 * kPi * q / n);
  const Complex a = std::conj(c1 / m.sum());
  CHECK(std::abs(a) < 1.0);
  double err = 0.0;
  for (int q = 0; q < n; ++q) {
    const double poisson = (1.0 - std::norm(a)) / std::norm(std::polar(1.0, 2.0 * kPi * q / n) - a);
    err = std::max(err, std::abs(m(q) / m.mean() - poisson));
  }
  CHECK(err < 1e-2);

  SUBCASE("trace is monotone within each phase and eps never grows") {
    for (std::size_t i = 1; i < st.trace.size(); ++i) {
      CHECK(st.trace[i].eps <= st.trace[i - 1].eps);
      if (st.trace[i].eps == st.trace[i - 1].eps) CHECK(st.trace[i].value >= st.trace[i - 1].value - 1e-12);
    }
  }

  SUBCASE("a start at the optimum stays put") {
    const AscentState again = optimize_density(CircleDomain::disk(), BoundaryDensity::uniform(1), opt);
    CHECK(again.iterations <= 2 * static_cast<int>(opt.eps_schedule.size()));
    CHECK(std::abs(again.value - 2.0 * kPi) < 1e-10);
  }
}

TEST_CASE("density ascent on the critical annulus keeps the catenoid value") {
  const double T0 = closedform::critical_parameter(closedform::Topology::Annulus);
  const CircleDomain annulus = CircleDomain::concentric_annulus(std::exp(-2.0 * T0));
  AscentOptions opt;
  opt.degree = 16;
  opt.density_degree = 4;
  opt.eps_schedule = {1e-3};
  const AscentState st = optimize_density(annulus, matched_cylinder_density(annulus), opt);
  CHECK(st.value >= critical_annulus_value() - 1e-4);
}

TEST_CASE("extremality certificate") {
  SUBCASE("the identity map of the uniform disk") {
    const HarmonicBasis b(CircleDomain::disk(), 8);
    const auto measure = sample(CircleDomain::disk(), BoundaryDensity::uniform(1), b.quadrature_points());
    const SteklovSpectrum s = SteklovSolver(CircleDomain::disk(), 8).solve(measure);
    const Certificate cert = extremality_certificate(b, measure, s.eigenvectors.middleCols(1, 2));
    CHECK(cert.n == 2);
    CHECK(cert.residual_boundary < 1e-8);
    CHECK(cert.residual_conformal < 1e-8);
    // eigenfunctions are B-normalized, cos theta / sqrt(pi), so C = pi I
    CHECK((cert.coefficients - kPi * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("a non-maximizing density fails the boundary condition") {
    const HarmonicBasis b(CircleDomain::disk(), 12);
    const auto measure = sample(CircleDomain::disk(), cosine_density(0.4), b.quadrature_points());
    const Sigma1Result r = sigma1(CircleDomain::disk(), cosine_density(0.4), 12);
    const Certificate cert = extremality_certificate(b, measure, r.eigenspace);
    CHECK(cert.residual_boundary >= 1e-2);
  }

  SUBCASE("a one-dimensional eigenspace is reported, not raised") {
    const HarmonicBasis b(CircleDomain::disk(), 8);
    const auto measure = sample(CircleDomain::disk(), BoundaryDensity::uniform(1), b.quadrature_points());
    const SteklovSpectrum s = SteklovSolver(CircleDomain::disk(), 8).solve(measure);
    CHECK(extremality_certificate(b, measure, s.eigenvectors.middleCols(1, 1)).eigenspace_too_small);
  }
}

TEST_CASE("configuration domains and conformal normal form") {
  const CircleDomain ring = configuration_domain(4, Symmetry::Cyclic, {0.5, std::log(0.1)});
  REQUIRE(ring.holes.size() == 3);
  for (const auto& h : ring.holes) {
    CHECK(std::abs(std::abs(h.center) - 0.5) < 1e-14);
    CHECK(std::abs(h.radius - 0.1) < 1e-14);
  }
  const CircleDomain free = configuration_domain(3, Symmetry::None, {0.3, 0.1, std::log(0.1), -0.3, 0.0, std::log(0.2)});
  REQUIRE(free.holes.size() == 2);
  CHECK(std::abs(free.holes[1].radius - 0.2) < 1e-14);
  CHECK_THROWS_AS(validate(configuration_domain(3, Symmetry::Cyclic, {0.5, std::log(0.6)})), Error);

  // the inversive distance between the two circles is a conformal invariant
  const CircleDomain off{{Hole{{0.3, -0.2}, 0.25}}};
  const CircleDomain nf = conformal_normal_form(off);
  REQUIRE(nf.holes.size() == 1);
  CHECK(std::abs(nf.holes[0].center) < 1e-14);
  const double rho = nf.holes[0].radius, r = 0.25, a2 = std::norm(Complex(0.3, -0.2));
  CHECK(std::abs((1.0 + rho * rho) / (2.0 * rho) - (1.0 + r * r - a2) / (2.0 * r)) < 1e-12);
  CHECK(conformal_normal_form(ring).holes.size() == 3);
}

TEST_CASE("k = 2 maximization recovers the critical catenoid") {
  const ConfigurationResult r = optimize_configuration(2);
  CHECK(r.value >= 0.99 * critical_annulus_value());
  CHECK(r.value <= critical_annulus_value() + 1e-6);
  CHECK_FALSE(r.budget_exhausted);

  SUBCASE("the value is a lower bound robust to refinement") {
    SteklovSolver finer(r.domain, ConfigurationOptions{}.polish.degree + 8);
    const double v = finer.solve(sample(r.domain, r.density, finer.basis().quadrature_points())).sigma1L();
    CHECK(std::abs(v - r.value) < 1e-4);
  }

  SUBCASE("the certificate holds at the optimum") {
    const HarmonicBasis b(r.domain, ConfigurationOptions{}.polish.degree);
    const Certificate cert =
        extremality_certificate(b, sample(r.domain, r.density, b.quadrature_points()), r.polished.eigenspace, 64);
    CHECK(cert.residual_boundary <= 1e-3);
    CHECK(cert.residual_conformal <= 1e-3);
    CHECK(cert.n >= 2);
    CHECK(cert.n <= multiplicity_bound(0, 1, true));
  }
}

TEST_CASE("k = 1 is the disk and sweeps run entries independently") {
  ConfigurationOptions opt;
  opt.polish.degree = 10;
  opt.polish.density_degree = 4;
  const auto entries = sweep_k({1, 2}, opt, 2);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].k == 1);
  CHECK(std::abs(entries[0].value - 2.0 * kPi) < 1e-6);
  CHECK(entries[1].value > entries[0].value);
  const auto serial = sweep_k({1, 2}, opt, 1);
  CHECK(serial[1].value == entries[1].value);
}

TEST_CASE("a third boundary component raises the optimum") {
  ConfigurationOptions opt;
  opt.budget = 1500;
  const ConfigurationResult r3 = optimize_configuration(3, opt);
  CHECK(r3.value > critical_annulus_value() + 1e-3);
  CHECK(r3.value <= coarse_bound(0, 3));
}
