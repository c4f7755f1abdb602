#include "steklov/dbar.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "steklov/error.hpp"
#include "steklov/fourier.hpp"
#include "steklov/quadrature.hpp"

namespace steklov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};
constexpr double kSolvabilityTol = 1e-8;
constexpr double kKernelTol = 1e-8;

// Row-wise theta transform: each row of `values` is a periodic signal.
Eigen::MatrixXcd theta_coefficients(const Eigen::MatrixXcd& values) {
  Eigen::MatrixXcd out(values.rows(), values.cols());
  for (Eigen::Index j = 0; j < values.rows(); ++j) {
    out.row(j) = fourier::coefficients(Eigen::VectorXcd(values.row(j).transpose())).transpose();
  }
  return out;
}

Eigen::MatrixXcd theta_synthesize(const Eigen::MatrixXcd& coeffs) {
  Eigen::MatrixXcd out(coeffs.rows(), coeffs.cols());
  for (Eigen::Index j = 0; j < coeffs.rows(); ++j) {
    out.row(j) = fourier::synthesize(Eigen::VectorXcd(coeffs.row(j).transpose())).transpose();
  }
  return out;
}

// i n c_n with the Nyquist slot dropped.
Eigen::MatrixXcd theta_derivative_coefficients(const Eigen::MatrixXcd& coeffs) {
  const int M = static_cast<int>(coeffs.cols());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(coeffs.rows(), M);
  for (int m = 0; m < M; ++m) {
    if (2 * m == M) continue;
    out.col(m) = kI * static_cast<double>(fourier::frequency(m, M)) * coeffs.col(m);
  }
  return out;
}

// f(t, theta) -> -conj(f(-t, theta + pi)) on the Lobatto x equispaced grid
Eigen::MatrixXcd moebius_partner(const Eigen::MatrixXcd& f) {
  const Eigen::Index N = f.rows() - 1, M = f.cols();
  Eigen::MatrixXcd g(f.rows(), M);
  for (Eigen::Index j = 0; j <= N; ++j)
    for (Eigen::Index l = 0; l < M; ++l) g(j, l) = -std::conj(f(N - j, (l + M / 2) % M));
  return g;
}

}  // namespace

Eigen::VectorXd dbar_t_nodes(double T, int nt) { return T * quad::chebyshev_lobatto<double>(nt); }

DbarProblem make_dbar_problem(double T, const std::function<Complex(double, double)>& k, DbarGrid grid,
                              DbarSymmetry symmetry) {
  DbarProblem p;
  p.T = T;
  p.grid = grid;
  p.symmetry = symmetry;
  const Eigen::VectorXd t = dbar_t_nodes(T, grid.nt);
  p.rhs.resize(grid.nt + 1, grid.ntheta);
  for (int j = 0; j <= grid.nt; ++j)
    for (int l = 0; l < grid.ntheta; ++l) p.rhs(j, l) = k(t(j), 2.0 * kPi * l / grid.ntheta);
  return p;
}

DbarSolution::Modes DbarSolution::modes_at(double tq) const {
  const int N = static_cast<int>(t.size()) - 1;
  const Eigen::VectorXd x = quad::chebyshev_lobatto<double>(N);
  const Eigen::VectorXd w = quad::chebyshev_barycentric_weights<double>(N);
  const Eigen::RowVectorXcd row = quad::barycentric_row<double>(x, w, tq / T).cast<Complex>();
  return {(row * fhat_).transpose(), (row * fthat_).transpose()};
}

DbarJet DbarSolution::evaluate(const Modes& modes, double theta) const {
  DbarJet j{0.0, 0.0, 0.0};
  for (int m = 0; m < ntheta; ++m) {
    if (2 * m == ntheta) continue;
    const double n = fourier::frequency(m, ntheta);
    const Complex e = std::polar(1.0, n * theta);
    j.f += modes.f(m) * e;
    j.ft += modes.ft(m) * e;
    j.fs += kI * n * modes.f(m) * e;
  }
  return j;
}

DbarJet DbarSolution::evaluate(double tq, double theta) const { return evaluate(modes_at(tq), theta); }

DbarSolution solve_dbar(const DbarProblem& p) {
  const int N = p.grid.nt, M = p.grid.ntheta;
  if (!(p.T > 0.0)) throw Error(ErrorCode::DomainError, "cylinder half-length must be positive");
  if (!fourier::is_power_of_two(N) || !fourier::is_power_of_two(M) || M < 4) {
    throw Error(ErrorCode::DomainError, "d-bar grid sizes must be powers of two");
  }
  if (p.rhs.rows() != N + 1 || p.rhs.cols() != M) {
    throw Error(ErrorCode::DomainError, "rhs must be sampled on the (nt + 1) x ntheta grid");
  }
  if (!p.rhs.allFinite()) throw Error(ErrorCode::DomainError, "rhs must be finite");

  Eigen::MatrixXcd k = p.rhs;
  if (p.symmetry == DbarSymmetry::MoebiusOdd) {
    // the problem commutes with f -> -conj f(-t, theta + pi) once k = conj k(-t, theta + pi)
    k = ((k - moebius_partner(k)) / 2.0).eval();
  }

  DbarSolution sol;
  sol.T = p.T;
  sol.t = dbar_t_nodes(p.T, N);
  sol.ntheta = M;
  const Eigen::VectorXd wt = p.T * quad::clenshaw_curtis_weights<double>(N);
  const double wth = 2.0 * kPi / M;

  double integral = 0.0, norm1 = 0.0;
  for (int j = 0; j <= N; ++j) {
    integral += wt(j) * k.row(j).real().sum();
    norm1 += wt(j) * k.row(j).cwiseAbs().sum();
  }
  integral *= wth;
  norm1 *= wth;
  sol.solvability_residual = std::abs(integral);
  if (sol.solvability_residual > kSolvabilityTol * norm1) {
    throw Error(ErrorCode::Unsolvable, "int Re k dt dtheta = " + std::to_string(integral) + " is not zero");
  }

  const Eigen::MatrixXcd khat = theta_coefficients(k);
  double tail = 0.0;
  for (int j = 0; j <= N; ++j) {
    double row = 0.0;
    for (int m = 0; m < M; ++m)
      if (std::abs(fourier::frequency(m, M)) >= M / 4) row += std::norm(khat(j, m));
    tail = std::max(tail, row);
  }
  sol.tail_norm = std::sqrt(tail);

  const Eigen::MatrixXd D = quad::chebyshev_diff_matrix<double>(N) / p.T;
  // (D - n) p = 2 k_n with p = 0 where the homogeneous solution e^{n t} is largest
  auto particular = [&](int n, int slot) -> Eigen::VectorXcd {
    Eigen::MatrixXd A = D;
    A.diagonal().array() -= n;
    const int anchor = n > 0 ? 0 : N;
    A.row(anchor).setZero();
    A(anchor, anchor) = 1.0;
    Eigen::MatrixXd rhs(N + 1, 2);
    rhs.col(0) = 2.0 * khat.col(slot).real();
    rhs.col(1) = 2.0 * khat.col(slot).imag();
    rhs.row(anchor).setZero();
    const Eigen::MatrixXd X = A.partialPivLu().solve(rhs);
    return X.col(0).cast<Complex>() + kI * X.col(1).cast<Complex>();
  };

  Eigen::MatrixXcd fhat = Eigen::MatrixXcd::Zero(N + 1, M);
  {
    const Eigen::VectorXcd p0 = particular(0, 0);
    const double mean_im = wt.dot(p0.imag()) / wt.sum();
    fhat.col(0) = p0 - kI * mean_im * Eigen::VectorXcd::Ones(N + 1);
  }
  sol.boundary_conditioning = 1.0;
  for (int n = 1; 2 * n < M; ++n) {
    const int sp = n, sn = M - n;
    const Eigen::VectorXcd pp = particular(n, sp), pn = particular(-n, sn);
    const double E = std::exp(-2.0 * n * p.T);
    const double det = 1.0 - E * E;
    if (!(det > std::numeric_limits<double>::epsilon())) {
      throw Error(ErrorCode::BoundarySystemSingular, "boundary system of mode " + std::to_string(n) + " is singular");
    }
    sol.boundary_conditioning = std::max(sol.boundary_conditioning, (1.0 + E) / (1.0 - E));
    // a + E conj(b) = -conj(p_{-n}(T)),  E a + conj(b) = -p_n(-T)
    const Complex r1 = -std::conj(pn(0)), r2 = -pp(N);
    const Complex a = (r1 - E * r2) / det;
    const Complex b = std::conj((r2 - E * r1) / det);
    const Eigen::ArrayXd hp = (n * (sol.t.array() - p.T)).exp();
    const Eigen::ArrayXd hn = (-n * (sol.t.array() + p.T)).exp();
    fhat.col(sp) = pp + a * hp.matrix().cast<Complex>();
    fhat.col(sn) = pn + b * hn.matrix().cast<Complex>();
  }

  sol.f = theta_synthesize(fhat);
  if (p.symmetry == DbarSymmetry::MoebiusOdd) {
    sol.f = (sol.f + moebius_partner(sol.f)) / 2.0;
    fhat = theta_coefficients(sol.f);
  }
  sol.fhat_ = fhat;
  sol.fthat_ = D.cast<Complex>() * fhat;
  sol.ft = theta_synthesize(sol.fthat_);
  sol.fs = theta_synthesize(theta_derivative_coefficients(fhat));

  sol.dbar_residual = ((sol.ft + kI * sol.fs) / 2.0 - k).cwiseAbs().maxCoeff();
  sol.boundary_residual = std::max(sol.f.row(0).real().cwiseAbs().maxCoeff(), sol.f.row(N).real().cwiseAbs().maxCoeff());
  return sol;
}

ScalarField ConformalFieldSpace::element(const Eigen::Vector4d& coeffs) const {
  const auto b = basis;
  return [b, coeffs](double t, double th) {
    ScalarJet out;
    for (int a = 0; a < 4; ++a) {
      if (coeffs(a) == 0.0) continue;
      const ScalarJet j = b[static_cast<std::size_t>(a)](t, th);
      out.v += coeffs(a) * j.v;
      out.vt += coeffs(a) * j.vt;
      out.vs += coeffs(a) * j.vs;
    }
    return out;
  };
}

namespace {

struct NormalJet {
  Eigen::Vector3d nu, nut, nus;
  double h11, h12, h22, mu;  // mu = |x_t|^2
  SurfaceJet jet;
};

NormalJet normal_jet(const ParametricSurface& s, double t, double th) {
  NormalJet n;
  n.jet = s.jet(t, th);
  const Eigen::Vector3d xt = n.jet.xt, xs = n.jet.xs;
  n.nu = xt.cross(xs).normalized();
  n.mu = xt.squaredNorm();
  n.h11 = n.jet.xtt.dot(n.nu);
  n.h12 = n.jet.xts.dot(n.nu);
  n.h22 = n.jet.xss.dot(n.nu);
  n.nut = -(n.h11 * xt + n.h12 * xs) / n.mu;
  n.nus = -(n.h12 * xt + n.h22 * xs) / n.mu;
  return n;
}

}  // namespace

ConformalFieldSpace conformal_field_space(const ParametricSurface& surface) {
  if (surface.n != 3 || surface.topology == SurfaceTopology::Moebius) {
    throw Error(ErrorCode::DomainError, "conformal fields are built on annuli and disks in B^3");
  }
  const FormReport check = verify_minimal_free_boundary(surface);
  for (const auto& [name, value] : check.identity_residuals) {
    if (!(value <= 1e-8)) throw Error(ErrorCode::DomainError, "surface fails the free boundary check: " + name);
  }

  ConformalFieldSpace C;
  const ParametricSurface s = surface;
  for (int a = 0; a < 3; ++a) {
    C.basis[static_cast<std::size_t>(a)] = [s, a](double t, double th) {
      const NormalJet n = normal_jet(s, t, th);
      return ScalarJet{n.nu(a), n.nut(a), n.nus(a)};
    };
  }
  C.basis[3] = [s](double t, double th) {
    const NormalJet n = normal_jet(s, t, th);
    const Eigen::Vector3d x = n.jet.x;
    return ScalarJet{x.dot(n.nu), x.dot(n.nut), x.dot(n.nus)};
  };

  for (int a = 0; a < 4; ++a) {
    const auto& psi = C.basis[static_cast<std::size_t>(a)];
    C.constraints(a) = parameter_integral(surface, [&](double t, double th) {
      const NormalJet n = normal_jet(s, t, th);
      return psi(t, th).v * n.h11 / n.mu;
    });
    for (int b = 0; b <= a; ++b) {
      const auto& phi = C.basis[static_cast<std::size_t>(b)];
      C.gram(a, b) = C.gram(b, a) = parameter_integral(
          surface, [&](double t, double th) { return psi(t, th).v * phi(t, th).v * s.jet(t, th).xt.squaredNorm(); });
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(C.gram);
  C.gram_min_eigenvalue = es.eigenvalues()(0);
  const double gmax = es.eigenvalues()(3);
  C.dimension = static_cast<int>((es.eigenvalues().array() > kKernelTol * gmax).count());

  // Kernel of the constraint row inside the span of the non-degenerate basis directions.
  const Eigen::MatrixXd range = es.eigenvectors().rightCols(C.dimension);
  const Eigen::RowVectorXd row = C.constraints * range;
  if (row.norm() <= kKernelTol) {
    C.kernel = range;
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(row), Eigen::ComputeFullV);
    C.kernel = range * svd.matrixV().rightCols(C.dimension - 1);
  }
  return C;
}

ConformalVariation build_conformal_variation(const ParametricSurface& surface, const ScalarField& psi, DbarGrid grid) {
  if (surface.n != 3 || surface.topology != SurfaceTopology::Annulus) {
    throw Error(ErrorCode::DomainError, "conformal variations are built on annuli in B^3");
  }
  const ParametricSurface s = surface;
  auto k = [&](double t, double th) {
    const NormalJet n = normal_jet(s, t, th);
    return psi(t, th).v * Complex(n.h11, n.h12) / n.mu;
  };
  ConformalVariation out;
  out.dbar = solve_dbar(make_dbar_problem(surface.T, k, grid));

  auto assemble = [](const NormalJet& n, const ScalarJet& p, const DbarJet& f) {
    const double u = f.f.real(), v = f.f.imag();
    FieldJet y;
    y.w = u * n.jet.xt + v * n.jet.xs + p.v * n.nu;
    y.wt = f.ft.real() * n.jet.xt + u * n.jet.xtt + f.ft.imag() * n.jet.xs + v * n.jet.xts + p.vt * n.nu + p.v * n.nut;
    y.ws = f.fs.real() * n.jet.xt + u * n.jet.xts + f.fs.imag() * n.jet.xs + v * n.jet.xss + p.vs * n.nu + p.v * n.nus;
    return y;
  };

  // conformality on the collocation grid, where f and its derivatives are exact samples
  const DbarSolution& d = out.dbar;
  for (int j = 0; j < d.t.size(); ++j) {
    for (int l = 0; l < d.ntheta; ++l) {
      const double th = 2.0 * kPi * l / d.ntheta;
      const NormalJet n = normal_jet(s, d.t(j), th);
      const FieldJet y = assemble(n, psi(d.t(j), th), {d.f(j, l), d.ft(j, l), d.fs(j, l)});
      out.residual_angle = std::max(out.residual_angle, std::abs(y.wt.dot(n.jet.xs) + y.ws.dot(n.jet.xt)) / n.mu);
      out.residual_length = std::max(out.residual_length, std::abs(y.wt.dot(n.jet.xt) - y.ws.dot(n.jet.xs)) / n.mu);
    }
  }

  struct Cache {
    std::mutex m;
    double t = std::numeric_limits<double>::quiet_NaN();
    DbarSolution::Modes modes;
  };
  auto sol = std::make_shared<const DbarSolution>(out.dbar);
  auto cache = std::make_shared<Cache>();
  out.Y.kind = FieldKind::Mixed;
  out.Y.boundary_tangent = true;
  out.Y.eval = [s, psi, sol, cache, assemble](double t, double th) {
    DbarSolution::Modes md;
    {
      std::lock_guard<std::mutex> lock(cache->m);
      if (!(cache->t == t)) {
        cache->modes = sol->modes_at(t);
        cache->t = t;
      }
      md = cache->modes;
    }
    return assemble(normal_jet(s, t, th), psi(t, th), sol->evaluate(md, th));
  };
  out.boundary_tangency = boundary_tangency_violation(surface, out.Y);
  return out;
}

AreaEnergyReport verify_area_energy(const ParametricSurface& surface, const ScalarField& psi, const VariationField& Y) {
  AreaEnergyReport r;
  r.Q = energy_form_Q(surface, Y, Y);
  r.S = index_form_S(surface, scalar_normal_field(surface, psi));
  r.residual = std::abs(r.Q - r.S) / (1.0 + std::abs(r.S));
  return r;
}

}  // namespace steklov
