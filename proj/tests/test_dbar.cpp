#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "steklov/dbar.hpp"
#include "steklov/error.hpp"
#include "steklov/quadrature.hpp"

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

template <class F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::DomainError;
}

// k(t, theta) = sum c_pn t^p e^{i n theta}, with the exact value of int Re k.
struct RandomRhs {
  std::vector<std::tuple<int, int, Complex>> terms;
  double T = 1.0;

  Complex operator()(double t, double th) const {
    Complex k(0.0, 0.0);
    for (const auto& [p, n, c] : terms) k += c * std::pow(t, p) * std::polar(1.0, n * th);
    return k;
  }
  double real_integral() const {
    double s = 0.0;
    for (const auto& [p, n, c] : terms) {
      if (n == 0 && p % 2 == 0) s += c.real() * 2.0 * std::pow(T, p + 1) / (p + 1) * 2.0 * kPi;
    }
    return s;
  }
};

RandomRhs random_rhs(std::mt19937& rng, double T) {
  std::normal_distribution<double> N;
  std::uniform_int_distribution<int> P(0, 4), M(-5, 5);
  RandomRhs r;
  r.T = T;
  for (int i = 0; i < 8; ++i) r.terms.emplace_back(P(rng), M(rng), Complex(N(rng), N(rng)));
  r.terms.emplace_back(0, 0, Complex(N(rng), N(rng)));
  return r;
}

double max_relative_residual(const ConformalVariation& cv) {
  return std::max(cv.residual_angle, cv.residual_length);
}

}  // namespace

TEST_CASE("closed-form d-bar solutions") {
  const double T = 0.8;
  SUBCASE("zero right-hand side") {
    const DbarSolution s = solve_dbar(make_dbar_problem(T, [](double, double) { return Complex(0.0, 0.0); }));
    CHECK(s.f.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("a real constant violates solvability") {
    const ErrorCode c = error_code_of([&] { solve_dbar(make_dbar_problem(T, [](double, double) { return Complex(1.0, 0.0); })); });
    CHECK(c == ErrorCode::Unsolvable);
  }
  SUBCASE("an imaginary constant i c gives f = 2 i c t") {
    const double c = 0.7;
    const DbarSolution s = solve_dbar(make_dbar_problem(T, [&](double, double) { return Complex(0.0, c); }));
    double err = 0.0;
    for (int j = 0; j < s.t.size(); ++j) err = std::max(err, (s.f.row(j).array() - 2.0 * c * s.t(j) * kI).abs().maxCoeff());
    CHECK(err < 1e-12);
    const DbarJet mid = s.evaluate(0.3, 1.1);
    CHECK(std::abs(mid.f - 2.0 * c * 0.3 * kI) < 1e-12);
    CHECK(std::abs(mid.ft - 2.0 * c * kI) < 1e-10);
    CHECK(std::abs(mid.fs) < 1e-10);
  }
}

TEST_CASE("random solvable right-hand sides") {
  const double T = 1.1;
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    RandomRhs r = random_rhs(rng, T);
    const double mean = r.real_integral() / (2.0 * T * 2.0 * kPi);
    const bool rejected = error_code_of([&] { solve_dbar(make_dbar_problem(T, r)); }) == ErrorCode::Unsolvable;
    CHECK(rejected);
    // Fredholm alternative: removing the mean of Re k restores solvability
    r.terms.emplace_back(0, 0, Complex(-mean, 0.0));
    const DbarSolution s = solve_dbar(make_dbar_problem(T, r));
    CHECK(s.dbar_residual <= 1e-8);
    CHECK(s.boundary_residual <= 1e-10);
    // gauge: zero mean of Im f, so the solution is unique
    const Eigen::VectorXd w = T * quad::clenshaw_curtis_weights<double>(static_cast<int>(s.t.size()) - 1);
    CHECK(std::abs(w.dot(s.f.imag().rowwise().mean())) < 1e-12 * (1.0 + s.f.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("the solution operator is linear") {
  const double T = 0.9;
  std::mt19937 rng(41);
  auto solvable = [&] {
    RandomRhs r = random_rhs(rng, T);
    r.terms.emplace_back(0, 0, Complex(-r.real_integral() / (4.0 * T * kPi), 0.0));
    return r;
  };
  const RandomRhs a = solvable(), b = solvable();
  const double alpha = 1.7, beta = -0.4;
  const DbarSolution fa = solve_dbar(make_dbar_problem(T, a));
  const DbarSolution fb = solve_dbar(make_dbar_problem(T, b));
  const DbarSolution fab = solve_dbar(make_dbar_problem(T, [&](double t, double th) { return alpha * a(t, th) + beta * b(t, th); }));
  const double scale = std::max(1.0, fab.f.cwiseAbs().maxCoeff());
  CHECK((fab.f - alpha * fa.f - beta * fb.f).cwiseAbs().maxCoeff() <= 1e-9 * scale);
}

TEST_CASE("Moebius-odd symmetry is preserved") {
  const double T = 0.6;
  std::mt19937 rng(53);
  RandomRhs r = random_rhs(rng, T);
  r.terms.emplace_back(0, 0, Complex(-r.real_integral() / (4.0 * T * kPi), 0.0));
  // symmetrize: k(t, theta) = conj k(-t, theta + pi)
  const auto k = [&](double t, double th) { return (r(t, th) + std::conj(r(-t, th + kPi))) / 2.0; };
  const DbarSolution s = solve_dbar(make_dbar_problem(T, k, DbarGrid{64, 64}, DbarSymmetry::MoebiusOdd));
  CHECK(s.dbar_residual <= 1e-8);
  CHECK(s.boundary_residual <= 1e-10);
  double err = 0.0;
  for (const double t : {-0.5, -0.1, 0.2, 0.55}) {
    for (const double th : {0.0, 0.7, 2.9, 4.4}) err = std::max(err, std::abs(s.evaluate(-t, th + kPi).f + std::conj(s.evaluate(t, th).f)));
  }
  CHECK(err <= 1e-10);
}

TEST_CASE("conformal field space of the critical catenoid") {
  const ParametricSurface s = critical_catenoid();
  const ConformalFieldSpace C = conformal_field_space(s);
  CHECK(C.dimension == 4);
  CHECK(C.gram_min_eigenvalue > 1e-6);
  CHECK(C.kernel_dimension() == 3);
  CHECK((C.kernel.transpose() * C.kernel - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((C.constraints * C.kernel).cwiseAbs().maxCoeff() < 1e-8);
  // the support function x . nu carries the only nonzero constraint
  CHECK(std::abs(C.constraints(3)) > 1.0);

  SUBCASE("the support function is unsolvable") {
    CHECK(error_code_of([&] { build_conformal_variation(s, C.basis[3]); }) == ErrorCode::Unsolvable);
  }

  SUBCASE("S vanishes on the support function field") {
    const VariationField W = scalar_normal_field(s, C.basis[3]);
    CHECK(std::abs(index_form_S(s, W)) <= 1e-8 * l2_mass(s, W));
  }

  SUBCASE("psi = 0 gives Y = 0") {
    const ConformalVariation cv = build_conformal_variation(s, C.element(Eigen::Vector4d::Zero()), DbarGrid{32, 64});
    CHECK(field_norm(s, cv.Y) == 0.0);
  }
}

TEST_CASE("conformal variations for the constraint kernel") {
  const ParametricSurface s = critical_catenoid();
  const ConformalFieldSpace C = conformal_field_space(s);
  for (int e = 0; e < C.kernel_dimension(); ++e) {
    const Eigen::Vector4d coeffs = C.kernel.col(e);
    const ScalarField psi = C.element(coeffs);
    const ConformalVariation cv = build_conformal_variation(s, psi, DbarGrid{64, 64});
    CHECK(max_relative_residual(cv) <= 1e-6);
    CHECK(cv.boundary_tangency <= 1e-6);
    const AreaEnergyReport r = verify_area_energy(s, psi, cv.Y);
    CHECK(r.residual <= 1e-5);
    // Q per unit L^2 mass of psi
    const double mass = coeffs.dot(C.gram * coeffs);
    CHECK(r.Q / mass < -1e-3);

    SUBCASE("scaling psi scales Q quadratically") {
      const ScalarField psi2 = C.element(2.0 * coeffs);
      const ConformalVariation cv2 = build_conformal_variation(s, psi2, DbarGrid{64, 64});
      const AreaEnergyReport r2 = verify_area_energy(s, psi2, cv2.Y);
      CHECK(std::abs(r2.Q - 4.0 * r.Q) <= 1e-8 * std::abs(r.Q));
    }
  }
}

TEST_CASE("the flat disk has a one-dimensional field space") {
  const ParametricSurface s = flat_disk();
  const ConformalFieldSpace C = conformal_field_space(s);
  CHECK(C.dimension == 1);
  CHECK(C.kernel_dimension() == 1);
}
