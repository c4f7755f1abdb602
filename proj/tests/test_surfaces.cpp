#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "steklov/closedform.hpp"
#include "steklov/error.hpp"
#include "steklov/surfaces.hpp"

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;

double annulus_T0() { return closedform::critical_parameter(closedform::Topology::Annulus); }

double max_residual(const FormReport& r) {
  double m = 0.0;
  for (const auto& [name, v] : r.identity_residuals) m = std::max(m, v);
  return m;
}

// Random smooth ambient field Z(x) = a + B x + c |x|^2 restricted to the surface.
std::function<FieldJet(double, double)> random_ambient_field(const ParametricSurface& s, std::mt19937& rng) {
  std::normal_distribution<double> N;
  const int n = s.n;
  Eigen::VectorXd a(n), c(n);
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i) {
    a(i) = N(rng);
    c(i) = N(rng);
    for (int j = 0; j < n; ++j) B(i, j) = N(rng);
  }
  const auto jet = s.jet;
  return [jet, a, B, c](double t, double th) {
    const SurfaceJet j = jet(t, th);
    FieldJet f;
    f.w = a + B * j.x + c * j.x.squaredNorm();
    f.wt = B * j.xt + c * (2.0 * j.x.dot(j.xt));
    f.ws = B * j.xs + c * (2.0 * j.x.dot(j.xs));
    return f;
  };
}

// Edges used by exactly one face, grouped into connected loops.
int boundary_loops(const TriangleMesh& m, int& boundary_edges, int& euler) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& f : m.faces) {
    for (int e = 0; e < 3; ++e) {
      int a = f[e], b = f[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  }
  euler = static_cast<int>(m.vertices.rows()) - static_cast<int>(count.size()) + static_cast<int>(m.faces.size());
  std::map<int, std::vector<int>> adj;
  boundary_edges = 0;
  for (const auto& [e, c] : count) {
    if (c != 1) continue;
    ++boundary_edges;
    adj[e.first].push_back(e.second);
    adj[e.second].push_back(e.first);
  }
  std::set<int> seen;
  int loops = 0;
  for (const auto& [v, nb] : adj) {
    if (seen.count(v)) continue;
    ++loops;
    std::vector<int> stack{v};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (!seen.insert(u).second) continue;
      for (int w : adj[u]) stack.push_back(w);
    }
  }
  return loops;
}

}  // namespace

TEST_CASE("critical catenoid") {
  const ParametricSurface s = critical_catenoid();
  const FormReport r = verify_minimal_free_boundary(s);
  for (const char* key : {"harmonicity", "conformality_length", "conformality_angle", "boundary_sphericality",
                          "conormal_radiality", "eigenfunction"}) {
    REQUIRE(r.identity_residuals.count(key) == 1);
    CHECK(r.identity_residuals.at(key) <= 1e-10);
  }
  const double T0 = annulus_T0();
  CHECK(r.boundary_length == doctest::Approx(4.0 * kPi / T0).epsilon(1e-12));
  CHECK(r.area == doctest::Approx(2.0 * kPi / T0).epsilon(1e-12));
  const FormReport al = area_length_report(s);
  CHECK(al.identity_residuals.at("two_area_minus_length") <= 1e-8);
  CHECK(al.area < 2.0 * kPi);
}

TEST_CASE("critical Moebius band") {
  const ParametricSurface s = critical_moebius();
  CHECK(s.n == 4);
  const FormReport r = verify_minimal_free_boundary(s);
  CHECK(max_residual(r) <= 1e-10);
  CHECK(r.identity_residuals.at("moebius_identification") <= 1e-12);
  CHECK(std::abs(r.boundary_length - 2.0 * kPi * std::sqrt(3.0)) <= 1e-10);
  CHECK(area_length_report(s).identity_residuals.at("two_area_minus_length") <= 1e-8);
  double maxnorm = 0.0;
  for (int i = 0; i <= 16; ++i) {
    for (int j = 0; j < 32; ++j) maxnorm = std::max(maxnorm, s.jet(-s.T + s.T * i / 8.0, 2.0 * kPi * j / 32).x.norm());
  }
  CHECK(maxnorm <= 1.0 + 1e-12);
}

TEST_CASE("flat disk") {
  const ParametricSurface s = flat_disk();
  const FormReport r = verify_minimal_free_boundary(s);
  CHECK(max_residual(r) <= 1e-10);
  CHECK(r.area == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(r.boundary_length == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  CHECK(area_length_report(s).identity_residuals.at("two_area_minus_length") <= 1e-12);
}

TEST_CASE("a catenoid cut at the wrong height is not free boundary") {
  const FormReport r = verify_minimal_free_boundary(catenoid(annulus_T0() + 0.1));
  CHECK(r.identity_residuals.at("conormal_radiality") >= 1e-2);
  CHECK(r.identity_residuals.at("boundary_sphericality") <= 1e-12);
}

TEST_CASE("finite-difference jets reproduce the analytic checks") {
  for (ParametricSurface s : {critical_catenoid(), critical_moebius()}) {
    s.grid = SurfaceGrid{64, 256};
    CHECK(max_residual(verify_minimal_free_boundary(with_finite_differences(s))) <= 1e-6);
  }
}

TEST_CASE("index identity on the critical catenoid") {
  const ParametricSurface s = critical_catenoid();
  for (int c = 0; c < 3; ++c) {
    const IndexIdentity id = index_identity(s, Eigen::Vector3d::Unit(c));
    CHECK(id.relative_residual <= 1e-6);
    CHECK(std::abs(id.S - id.boundary_formula) <= 1e-6 * id.mass);
    CHECK(id.S < 0.0);  // Morse index at least 3
  }
  SUBCASE("the area form agrees with the direct normal field") {
    const VariationField W = normal_part(s, Eigen::Vector3d::UnitZ());
    CHECK(kind_violation(s, W) < 1e-12);
    CHECK(std::abs(index_form_S(s, W) + 2.0 * l2_mass(s, W)) <= 1e-6 * l2_mass(s, W));
  }
}

TEST_CASE("index identity on the critical Moebius band") {
  const ParametricSurface s = critical_moebius();
  for (int c = 0; c < 4; ++c) CHECK(index_identity(s, Eigen::Vector4d::Unit(c)).relative_residual <= 1e-6);
}

TEST_CASE("the flat disk is stable for normal variations vanishing on the boundary") {
  const ParametricSurface s = flat_disk();
  std::mt19937 rng(5);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 5; ++trial) {
    const double a = N(rng), b1 = N(rng), b2 = N(rng), c1 = N(rng), c2 = N(rng), eps = 0.1;
    // f = eps (1 - r^2)(a + Re((b1 - i b2) z) + Re((c1 - i c2) z^2)), z = e^{t + i theta}
    ScalarField psi = [=](double t, double th) {
      const double r = std::exp(t);
      const double g = a + r * (b1 * std::cos(th) + b2 * std::sin(th)) + r * r * (c1 * std::cos(2 * th) + c2 * std::sin(2 * th));
      const double gr = b1 * std::cos(th) + b2 * std::sin(th) + 2 * r * (c1 * std::cos(2 * th) + c2 * std::sin(2 * th));
      const double gs = r * (-b1 * std::sin(th) + b2 * std::cos(th)) + r * r * (-2 * c1 * std::sin(2 * th) + 2 * c2 * std::cos(2 * th));
      const double h = 1.0 - r * r;
      return ScalarJet{eps * h * g, eps * r * (-2.0 * r * g + h * gr), eps * h * gs};
    };
    CHECK(index_form_S(s, scalar_normal_field(s, psi)) >= 0.0);
  }
}

TEST_CASE("form preconditions") {
  const ParametricSurface s = critical_catenoid();
  CHECK_THROWS_AS(index_form_S(s, rotation_field(s)), Error);
  VariationField e1;
  e1.eval = [](double, double) { return FieldJet{Eigen::Vector3d::UnitX(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()}; };
  CHECK(boundary_tangency_violation(s, e1) > 1e-2);
  CHECK_THROWS_AS(energy_form_Q(s, e1, e1), Error);
}

TEST_CASE("the rotation field is in the null space of Q") {
  const ParametricSurface s = critical_catenoid();
  const VariationField X = rotation_field(s);
  CHECK(boundary_tangency_violation(s, X) < 1e-12);
  CHECK(std::abs(energy_form_Q(s, X, X)) <= 1e-8);
  std::mt19937 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const VariationField Y = sphere_tangent_field(s, random_ambient_field(s, rng));
    CHECK(boundary_tangency_violation(s, Y) < 1e-12);
    const double scale = field_norm(s, X) * field_norm(s, Y);
    CHECK(std::abs(energy_form_Q(s, X, Y)) <= 1e-7 * scale);
  }
}

TEST_CASE("Q is bilinear and symmetric") {
  const ParametricSurface s = critical_catenoid();
  std::mt19937 rng(23);
  const VariationField V = sphere_tangent_field(s, random_ambient_field(s, rng));
  const VariationField W = sphere_tangent_field(s, random_ambient_field(s, rng));
  const double vw = energy_form_Q(s, V, W);
  CHECK(std::abs(vw - energy_form_Q(s, W, V)) <= 1e-12 * std::abs(vw));
  CHECK(std::abs(energy_form_Q(s, scaled(V, 3.0), W) - 3.0 * vw) <= 1e-12 * std::abs(vw));
}

TEST_CASE("doubling the grid leaves the quadrature unchanged") {
  ParametricSurface coarse = critical_catenoid();
  ParametricSurface fine = coarse;
  fine.grid = SurfaceGrid{2 * coarse.grid.nt, 2 * coarse.grid.ntheta};
  CHECK(std::abs(area(coarse) - area(fine)) < 1e-9);
  CHECK(std::abs(boundary_length(coarse) - boundary_length(fine)) < 1e-9);
  const Eigen::Vector3d v(0.3, -0.5, 0.8);
  CHECK(std::abs(index_form_S(coarse, normal_part(coarse, v)) - index_form_S(fine, normal_part(fine, v))) < 1e-9);
}

TEST_CASE("triangulations have the right topology") {
  int bedges = 0, euler = 0;
  SUBCASE("annulus") {
    const TriangleMesh m = triangulate(critical_catenoid(), 9, 16);
    CHECK(m.vertices.rows() == 9 * 16);
    CHECK(m.faces.size() == 2u * 8 * 16);
    CHECK(boundary_loops(m, bedges, euler) == 2);
    CHECK(bedges == 32);
    CHECK(euler == 0);
  }
  SUBCASE("Moebius band: one boundary loop") {
    const TriangleMesh m = triangulate(critical_moebius(), 9, 16);
    CHECK(m.vertices.cols() == 4);
    CHECK(boundary_loops(m, bedges, euler) == 1);
    CHECK(bedges == 32);
    CHECK(euler == 0);
  }
  SUBCASE("disk") {
    const TriangleMesh m = triangulate(flat_disk(), 9, 16);
    CHECK(m.vertices.row(0).norm() < 1e-12);
    CHECK(boundary_loops(m, bedges, euler) == 1);
    CHECK(euler == 1);
  }
  SUBCASE("deterministic") {
    const TriangleMesh a = triangulate(critical_catenoid(), 5, 8), b = triangulate(critical_catenoid(), 5, 8);
    CHECK(a.vertices == b.vertices);
    CHECK(a.faces == b.faces);
  }
}
