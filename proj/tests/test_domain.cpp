#include <doctest.h>

#include <cmath>
#include <numbers>

#include "steklov/domain.hpp"
#include "steklov/error.hpp"

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryDensity cosine_density(int components, double a) {
  BoundaryDensity d = BoundaryDensity::uniform(components);
  for (auto& c : d.log_coeffs) {
    c.conservativeResize(3);
    c(1) = a;
    c(2) = 0.0;
  }
  return d;
}

double max_diff(const BoundaryMeasureSamples& a, const BoundaryMeasureSamples& b) {
  double d = 0.0;
  for (int c = 0; c < a.components(); ++c) d = std::max(d, (a.values[c] - b.values[c]).cwiseAbs().maxCoeff());
  return d;
}

// Narrow positive bump, a smooth stand-in for a point mass.
BoundaryMeasureSamples spike(int n) {
  BoundaryMeasureSamples s;
  s.values.push_back(Eigen::VectorXd(n));
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * kPi * j / n;
    s.values[0](j) = std::exp(40.0 * (std::cos(th - 1.0) - 1.0)) + 1e-3;
  }
  return s;
}

}  // namespace

TEST_CASE("validate accepts disks and annuli and rejects bad holes") {
  CHECK_NOTHROW(validate(CircleDomain::disk()));
  CHECK_NOTHROW(validate(CircleDomain::concentric_annulus(0.3)));

  CircleDomain overlap{{Hole{{0.4, 0.0}, 0.45}, Hole{{-0.4, 0.0}, 0.45}}};
  try {
    validate(overlap);
    FAIL("overlap accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overlap);
  }
  try {
    validate(CircleDomain{{Hole{{0.8, 0.0}, 0.3}}});
    FAIL("hole outside accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HoleOutsideDisk);
  }
  try {
    validate(CircleDomain{{Hole{{0.0, 0.0}, 0.0}}});
    FAIL("zero radius accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RadiusNonpositive);
  }
}

TEST_CASE("boundary length") {
  CHECK(boundary_length(CircleDomain::disk(), BoundaryDensity::uniform(1)) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(boundary_length(CircleDomain::concentric_annulus(0.3), BoundaryDensity::uniform(2)) ==
        doctest::Approx(2.6 * kPi).epsilon(1e-14));
  // 2 pi I_0(1)
  CHECK(boundary_length(CircleDomain::disk(), cosine_density(1, 1.0)) == doctest::Approx(7.954926521012845).epsilon(1e-13));
  SUBCASE("linear in a global scale") {
    const CircleDomain d{{Hole{{0.2, 0.1}, 0.2}}};
    BoundaryDensity rho = cosine_density(2, 0.3);
    const double L = boundary_length(d, rho);
    for (auto& c : rho.log_coeffs) c(0) += std::log(3.0);
    CHECK(boundary_length(d, rho) == doctest::Approx(3.0 * L).epsilon(1e-14));
  }
}

TEST_CASE("heat smoothing") {
  const CircleDomain annulus = CircleDomain::concentric_annulus(0.4);
  const BoundaryDensity rho = cosine_density(2, 0.7);
  const BoundaryMeasureSamples s = sample(annulus, rho);

  SUBCASE("zero time is the identity") { CHECK(max_diff(heat_smooth(annulus, s, 0.0), s) < 1e-14); }

  SUBCASE("uniform measures are fixed") {
    const auto u = sample(annulus, BoundaryDensity::uniform(2));
    CHECK(max_diff(heat_smooth(annulus, u, 0.37), u) < 1e-13);
  }

  SUBCASE("mass is preserved for every time") {
    for (const double eps : {1e-4, 1e-2, 1.0, 100.0}) {
      CHECK(std::abs(heat_smooth(annulus, s, eps).total_mass() - s.total_mass()) < 1e-12 * s.total_mass());
    }
  }

  SUBCASE("semigroup") {
    const auto ab = heat_smooth(annulus, heat_smooth(annulus, s, 0.013), 0.021);
    const auto c = heat_smooth(annulus, s, 0.034);
    CHECK(max_diff(ab, c) < 1e-10);
  }

  SUBCASE("multiplier matches direct convolution with the theta-function kernel") {
    const int n = 256;
    const CircleDomain disk = CircleDomain::disk();
    const auto sp = spike(n);
    const double eps = 0.02;
    const auto fast = heat_smooth(disk, sp, eps);
    double err = 0.0;
    for (int i = 0; i < n; i += 17) {
      double v = 0.0;
      for (int j = 0; j < n; ++j) {
        double kernel = 1.0;
        for (int m = 1; m <= 256; ++m) kernel += 2.0 * std::exp(-m * m * eps) * std::cos(m * 2.0 * kPi * (i - j) / n);
        v += kernel * sp.values[0](j) / n;
      }
      err = std::max(err, std::abs(v - fast.values[0](i)));
    }
    CHECK(err < 1e-12);
  }

  SUBCASE("a spike flattens to its mean for long times and stays positive") {
    const auto sp = spike(256);
    const auto flat = heat_smooth(CircleDomain::disk(), sp, 50.0);
    const double mean = sp.values[0].mean();
    CHECK((flat.values[0].array() - mean).abs().maxCoeff() < 1e-12);
    CHECK(std::abs(flat.total_mass() - sp.total_mass()) < 1e-12 * sp.total_mass());
    const auto mild = heat_smooth(CircleDomain::disk(), sp, 1e-3);
    CHECK(mild.values[0].minCoeff() > 0.0);
  }

  SUBCASE("smaller circles smooth faster at the same time") {
    const auto out = heat_smooth(annulus, s, 0.01);
    const double spread_outer = out.values[0].maxCoeff() - out.values[0].minCoeff();
    const double spread_inner = out.values[1].maxCoeff() - out.values[1].minCoeff();
    const double raw_outer = s.values[0].maxCoeff() - s.values[0].minCoeff();
    const double raw_inner = s.values[1].maxCoeff() - s.values[1].minCoeff();
    CHECK(spread_inner / raw_inner < spread_outer / raw_outer);
  }
}

TEST_CASE("normalize") {
  const CircleDomain disk = CircleDomain::disk();
  const BoundaryDensity n1 = normalize(disk, BoundaryDensity::uniform(1));
  CHECK(n1.value(0, 0.3) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));

  const CircleDomain annulus = CircleDomain::concentric_annulus(0.3);
  const BoundaryDensity n2 = normalize(annulus, BoundaryDensity::uniform(2));
  CHECK(n2.value(0, 1.0) == doctest::Approx(1.0 / (2.6 * kPi)).epsilon(1e-14));
  CHECK(n2.value(1, 2.0) == doctest::Approx(1.0 / (2.6 * kPi)).epsilon(1e-14));

  const BoundaryDensity rho = cosine_density(2, 0.5);
  const BoundaryDensity once = normalize(annulus, rho);
  const BoundaryDensity twice = normalize(annulus, once);
  CHECK(boundary_length(annulus, once) == doctest::Approx(1.0).epsilon(1e-14));
  for (int c = 0; c < 2; ++c) CHECK((once.log_coeffs[c] - twice.log_coeffs[c]).norm() < 1e-14);
}

TEST_CASE("matched cylinder density gives dtheta on every circle") {
  const CircleDomain annulus = CircleDomain::concentric_annulus(0.25);
  const auto s = sample(annulus, matched_cylinder_density(annulus), 64);
  CHECK((s.values[0].array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK((s.values[1].array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("negative smoothing time is rejected") {
  const auto s = sample(CircleDomain::disk(), BoundaryDensity::uniform(1), 64);
  CHECK_THROWS_AS(heat_smooth(CircleDomain::disk(), s, -0.1), Error);
}
