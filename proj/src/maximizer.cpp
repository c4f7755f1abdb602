#include "steklov/maximizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <string>

#include "steklov/error.hpp"
#include "steklov/fourier.hpp"

namespace steklov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double trig_basis(int j, double theta) {
  if (j == 0) return 1.0;
  const int n = (j + 1) / 2;
  return (j % 2 == 1) ? std::cos(n * theta) : std::sin(n * theta);
}

// Euclidean projection of eigenvalues onto {x >= 0, sum x = 1}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cum += s[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (s[i] - t > 0.0) tau = t;
  }
  return (v.array() - tau).cwiseMax(0.0);
}

Eigen::MatrixXd project_spectraplex(const Eigen::MatrixXd& C) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((C + C.transpose()) / 2.0);
  return es.eigenvectors() * project_simplex(es.eigenvalues()).asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& C) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((C + C.transpose()) / 2.0);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
}

struct BundleStep {
  Eigen::VectorXd d;
  double predicted = 0.0;
};

// Proximal step for the smallest eigenvalue of the model matrix
// diag(offsets) + sum_j d_j H_j: by duality d = t sum_ab C_ab H_ab where C
// minimizes <C, diag(offsets)> + t/2 |sum C_ab H_ab|^2 over the spectraplex.
BundleStep bundle_step(const std::vector<std::vector<Eigen::VectorXd>>& H, const Eigen::VectorXd& offsets, double t) {
  const int p = static_cast<int>(H.size());
  if (p == 1) return {t * H[0][0], t * H[0][0].squaredNorm()};
  Eigen::MatrixXd F(H[0][0].size(), p * p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) F.col(a * p + b) = H[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  const Eigen::MatrixXd G = F.transpose() * F;
  const double lip = t * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const Eigen::MatrixXd D = offsets.asDiagonal();
  auto vec = [p](const Eigen::MatrixXd& C) { return Eigen::Map<const Eigen::VectorXd>(C.data(), p * p).eval(); };
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, p);
  C(0, 0) = 1.0;
  if (lip > 0.0) {
    Eigen::MatrixXd Y = C;
    double tk = 1.0;
    for (int it = 0; it < 500; ++it) {
      const Eigen::VectorXd g = t * G * vec(Y);
      const Eigen::MatrixXd Cn = project_spectraplex(Y - (D + Eigen::Map<const Eigen::MatrixXd>(g.data(), p, p)) / lip);
      const double tn = (1.0 + std::sqrt(1.0 + 4.0 * tk * tk)) / 2.0;
      Y = Cn + ((tk - 1.0) / tn) * (Cn - C);
      const double change = (Cn - C).norm();
      C = Cn;
      tk = tn;
      if (change < 1e-13) break;
    }
  }
  const Eigen::VectorXd g = F * vec(C);
  return {t * g, (C.cwiseProduct(D)).sum() + t * g.squaredNorm()};
}

struct Probe {
  double value = 0.0;
  double residual = 0.0;  // boundary residual of the sigma_1 eigenfunctions
  SteklovSpectrum spectrum;
  BoundaryMeasureSamples raw;
  BoundaryMeasureSamples smoothed;
};

// Log-density ascent state for one fixed domain. Variables are the Fourier
// coefficients of log(dmu/dtheta), concatenated over components.
class DensityAscent {
 public:
  DensityAscent(const SteklovSolver& solver, const AscentOptions& opt)
      : solver_(solver), opt_(opt), k_(solver.domain().components()), width_(2 * opt.density_degree + 1),
        nq_(solver.basis().quadrature_points()) {
    table_.resize(nq_, width_);
    for (int q = 0; q < nq_; ++q)
      for (int j = 0; j < width_; ++j) table_(q, j) = trig_basis(j, kTwoPi * q / nq_);
  }

  int width() const { return width_; }
  int solves() const { return solves_; }

  BoundaryMeasureSamples raw_measure(const Eigen::VectorXd& x) const {
    BoundaryMeasureSamples s;
    for (int c = 0; c < k_; ++c) s.values.push_back((table_ * x.segment(c * width_, width_)).array().exp().matrix());
    return s;
  }

  // shift every c0 so that the total mass is 1
  void normalize(Eigen::VectorXd& x) const {
    const double L = raw_measure(x).total_mass();
    for (int c = 0; c < k_; ++c) x(c * width_) -= std::log(L);
  }

  Probe evaluate(const Eigen::VectorXd& x, double eps) {
    Probe p;
    p.raw = raw_measure(x);
    p.smoothed = heat_smooth(solver_.domain(), p.raw, eps);
    p.spectrum = solver_.solve(p.smoothed);
    ++solves_;
    p.value = p.spectrum.sigma1() * p.smoothed.total_mass();
    const auto& ev = p.spectrum.eigenvalues;
    for (int i = 1; i < ev.size() && ev(i) <= ev(1) * (1.0 + opt_.model_window); ++i) {
      p.residual = std::max(p.residual, steklov_residual(solver_.basis(), p.smoothed, ev(i), p.spectrum.eigenvectors.col(i)));
    }
    return p;
  }

  struct Model {
    std::vector<std::vector<Eigen::VectorXd>> H;
    Eigen::VectorXd offsets;  // L (sigma_a - sigma_1)
  };

  // First-order model of the value matrix L diag(sigma_a) over the
  // eigenvalues within `window` of sigma_1: gradients H_ab in coefficient space.
  Model gradients(const Probe& p, double eps, double window) const {
    const auto& ev = p.spectrum.eigenvalues;
    const double s1 = ev(1);
    std::vector<int> idx;
    for (int i = 1; i < ev.size() && ev(i) <= s1 * (1.0 + window); ++i) idx.push_back(i);
    const int m = static_cast<int>(idx.size());
    const double L = p.smoothed.total_mass();
    const double h = kTwoPi / nq_;

    std::vector<Eigen::MatrixXd> U(static_cast<std::size_t>(k_));
    for (int c = 0; c < k_; ++c) {
      Eigen::MatrixXd E(p.spectrum.eigenvectors.rows(), m);
      for (int a = 0; a < m; ++a) E.col(a) = p.spectrum.eigenvectors.col(idx[static_cast<std::size_t>(a)]);
      U[static_cast<std::size_t>(c)] = solver_.basis().trace(c).values * E;
    }
    const auto mu = fourier_weights(p.raw);

    Model model;
    model.offsets.resize(m);
    auto& H = model.H;
    H.assign(static_cast<std::size_t>(m), std::vector<Eigen::VectorXd>(static_cast<std::size_t>(m)));
    for (int a = 0; a < m; ++a) {
      const double sa = ev(idx[static_cast<std::size_t>(a)]);
      model.offsets(a) = L * (sa - s1);
      for (int b = a; b < m; ++b) {
        const double sb = ev(idx[static_cast<std::size_t>(b)]);
        BoundaryMeasureSamples G;
        for (int c = 0; c < k_; ++c) {
          const auto& Uc = U[static_cast<std::size_t>(c)];
          Eigen::VectorXd g = (-0.5 * (sa + sb) * L) * Uc.col(a).cwiseProduct(Uc.col(b));
          if (a == b) g.array() += sa;
          G.values.push_back(std::move(g));
        }
        const BoundaryMeasureSamples KG = heat_smooth(solver_.domain(), G, eps);
        Eigen::VectorXd grad(k_ * width_);
        for (int c = 0; c < k_; ++c) {
          const Eigen::VectorXd w = mu[static_cast<std::size_t>(c)].cwiseProduct(KG.values[static_cast<std::size_t>(c)]);
          grad.segment(c * width_, width_) = h * (table_.transpose() * w);
        }
        H[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = grad;
        H[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = grad;
      }
    }
    return model;
  }

 private:
  std::vector<Eigen::VectorXd> fourier_weights(const BoundaryMeasureSamples& raw) const {
    std::vector<Eigen::VectorXd> out;
    for (const auto& v : raw.values) out.push_back(fourier::resample(v, nq_));
    return out;
  }

  const SteklovSolver& solver_;
  AscentOptions opt_;
  int k_;
  int width_;
  int nq_;
  Eigen::MatrixXd table_;
  int solves_ = 0;
};

struct AscentRun {
  AscentState state;
  Eigen::VectorXd coeffs;  // final unsmoothed log(dmu/dtheta) coefficients
};

AscentRun run_ascent(const SteklovSolver& solver, Eigen::VectorXd x, const AscentOptions& opt) {
  DensityAscent asc(solver, opt);
  if (x.size() != solver.domain().components() * asc.width()) {
    throw Error(ErrorCode::DomainError, "initial coefficient vector has the wrong size");
  }
  for (double e : opt.eps_schedule) {
    if (!(e > 0.0)) throw Error(ErrorCode::DomainError, "smoothing schedule must be positive");
  }
  asc.normalize(x);

  AscentState st;
  st.domain = solver.domain();
  int iteration = 0;
  Probe cur;
  for (double eps : opt.eps_schedule) {
    Probe start = asc.evaluate(x, eps);
    if (start.residual > opt.resolution_tol && cur.spectrum.size() > 0) {
      st.unresolved = true;
      break;
    }
    cur = std::move(start);
    st.trace.push_back({iteration, eps, cur.value});
    st.eps = eps;
    st.stalled = false;
    double step = -1.0;
    for (int it = 0; it < opt.max_iters; ++it) {
      const auto model = asc.gradients(cur, eps, opt.model_window);
      const double gmax = [&] {
        double g = 0.0;
        for (const auto& row : model.H)
          for (const auto& h : row) g = std::max(g, h.cwiseAbs().maxCoeff());
        return g;
      }();
      if (!(gmax > 1e-12 * cur.value)) break;  // stationary
      double t = step > 0.0 ? 4.0 * step : 0.25 / gmax;
      bool accepted = false;
      double gain = 0.0;
      for (int bt = 0; bt < opt.max_backtracks && !accepted; ++bt, t /= 2.0) {
        const BundleStep bs = bundle_step(model.H, model.offsets, t);
        if (!(bs.predicted > 1e-15 * cur.value)) break;  // stationary
        const double dmax = bs.d.cwiseAbs().maxCoeff();
        if (dmax > 1.0) continue;  // keep log-density changes moderate
        Eigen::VectorXd xn = x + bs.d;
        asc.normalize(xn);
        Probe trial;
        try {
          trial = asc.evaluate(xn, eps);
        } catch (const Error&) {
          continue;  // trial density lost positivity after smoothing
        }
        if (trial.residual > opt.resolution_tol) continue;
        if (trial.value > cur.value && trial.value - cur.value >= 1e-3 * bs.predicted) {
          gain = trial.value - cur.value;
          x = std::move(xn);
          cur = std::move(trial);
          step = t;
          accepted = true;
          st.trace.push_back({++iteration, eps, cur.value});
        }
      }
      if (!accepted) {
        st.stalled = true;
        break;
      }
      if (gain <= opt.rel_improvement * std::abs(cur.value)) break;
    }
  }
  st.iterations = iteration;
  st.eigensolves = asc.solves();

  // report the smoothed optimum as an ordinary log-density
  const int nq = solver.basis().quadrature_points();
  st.density = density_from_measure(solver.domain(), cur.smoothed, std::min(64, nq / 2 - 1));
  const auto final_spec = solver.solve(sample(solver.domain(), st.density, nq));
  ++st.eigensolves;
  st.value = final_spec.sigma1L();
  Eigen::MatrixXd space;
  const auto& ev = final_spec.eigenvalues;
  int m = 0;
  while (1 + m < ev.size() && ev(1 + m) <= ev(1) * (1.0 + opt.cluster_window)) ++m;
  st.eigenspace = final_spec.eigenvectors.middleCols(1, m);
  return {std::move(st), std::move(x)};
}

Eigen::VectorXd coeffs_from_density(const CircleDomain& domain, const BoundaryDensity& d, int width) {
  const int k = domain.components();
  if (d.components() != k) throw Error(ErrorCode::DomainError, "density and domain component counts differ");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(k * width);
  for (int c = 0; c < k; ++c) {
    const Eigen::VectorXd& lc = d.log_coeffs[static_cast<std::size_t>(c)];
    const int n = static_cast<int>(std::min<Eigen::Index>(lc.size(), width));
    x.segment(c * width, n) = lc.head(n);
    x(c * width) += std::log(domain.circle(c).radius);
  }
  return x;
}

int density_degree_of(const BoundaryDensity& d) {
  Eigen::Index w = 1;
  for (const auto& c : d.log_coeffs) w = std::max(w, c.size());
  return static_cast<int>(w / 2);
}

}  // namespace

std::vector<Eigen::VectorXd> density_gradient(const SteklovSolver& solver, const BoundaryMeasureSamples& measure,
                                              const Eigen::VectorXd& u, double tol) {
  const EigenSystemMatrices sys = solver.matrices(measure);
  const double unorm2 = u.dot(sys.B * u);
  if (!(unorm2 > 0.0)) throw Error(ErrorCode::NotAnEigenfunction, "function has zero boundary trace");
  const Eigen::VectorXd x = u / std::sqrt(unorm2);
  const double sigma = x.dot(sys.A * x);
  const Eigen::VectorXd Bx = sys.B * x;
  const double res = (sys.A * x - sigma * Bx).norm() / Bx.norm();
  if (!(res <= tol)) {
    throw Error(ErrorCode::NotAnEigenfunction, "eigen-residual " + std::to_string(res) + " exceeds tolerance");
  }
  const auto w = quadrature_weights(solver.basis(), measure);
  double mass = 0.0, u2 = 0.0;
  std::vector<Eigen::VectorXd> sq;
  for (int c = 0; c < solver.domain().components(); ++c) {
    const Eigen::VectorXd tr = solver.basis().trace(c).values * x;
    sq.push_back(tr.array().square().matrix());
    mass += w[static_cast<std::size_t>(c)].sum();
    u2 += sq.back().dot(w[static_cast<std::size_t>(c)]);
  }
  for (auto& s : sq) s = -sigma * (s.array() - u2 / mass).matrix();
  return sq;
}

BoundaryMeasureSamples angular_measure(const std::vector<Eigen::VectorXd>& log_coeffs, int grid) {
  BoundaryMeasureSamples s;
  for (const auto& c : log_coeffs) {
    Eigen::VectorXd v(grid);
    for (int q = 0; q < grid; ++q) {
      double acc = 0.0;
      for (int j = 0; j < c.size(); ++j) acc += c(j) * trig_basis(j, kTwoPi * q / grid);
      v(q) = std::exp(acc);
    }
    s.values.push_back(std::move(v));
  }
  return s;
}

BoundaryDensity density_from_measure(const CircleDomain& domain, const BoundaryMeasureSamples& measure, int degree) {
  BoundaryDensity d;
  for (int c = 0; c < measure.components(); ++c) {
    const Eigen::VectorXd& v = measure.values[static_cast<std::size_t>(c)];
    if (!(v.minCoeff() > 0.0)) throw Error(ErrorCode::NonPositiveDensity, "measure must be positive to take logs");
    const int N = static_cast<int>(v.size());
    const Eigen::VectorXcd f = fourier::coefficients(Eigen::VectorXd(v.array().log().matrix()));
    const int D = std::min(degree, (N - 1) / 2);
    Eigen::VectorXd lc(2 * D + 1);
    lc(0) = f(0).real() - std::log(domain.circle(c).radius);
    for (int n = 1; n <= D; ++n) {
      lc(2 * n - 1) = 2.0 * f(n).real();
      lc(2 * n) = -2.0 * f(n).imag();
    }
    d.log_coeffs.push_back(std::move(lc));
  }
  return d;
}

AscentState optimize_density(const SteklovSolver& solver, const BoundaryDensity& init, const AscentOptions& opt) {
  AscentOptions o = opt;
  o.density_degree = std::max(opt.density_degree, density_degree_of(init));
  return run_ascent(solver, coeffs_from_density(solver.domain(), init, 2 * o.density_degree + 1), o).state;
}

AscentState optimize_density(const CircleDomain& domain, const BoundaryDensity& init, const AscentOptions& opt) {
  SteklovSolver solver(domain, opt.degree);
  return optimize_density(solver, init, opt);
}

CircleDomain configuration_domain(int k, Symmetry symmetry, const std::vector<double>& p) {
  CircleDomain d;
  if (k < 2) return d;
  if (symmetry == Symmetry::Cyclic) {
    if (p.size() != 2) throw Error(ErrorCode::DomainError, "cyclic configuration takes (ring radius, log hole radius)");
    for (int j = 0; j < k - 1; ++j) {
      d.holes.push_back({std::polar(p[0], kTwoPi * j / (k - 1)), std::exp(p[1])});
    }
  } else {
    if (p.size() != static_cast<std::size_t>(3 * (k - 1))) {
      throw Error(ErrorCode::DomainError, "configuration takes (cx, cy, log r) per hole");
    }
    for (int j = 0; j < k - 1; ++j) {
      const std::size_t o = static_cast<std::size_t>(3 * j);
      d.holes.push_back({{p[o], p[o + 1]}, std::exp(p[o + 2])});
    }
  }
  return d;
}

CircleDomain conformal_normal_form(const CircleDomain& d) {
  if (d.holes.size() != 1) return d;
  const double s = std::abs(d.holes[0].center);
  const double r = d.holes[0].radius;
  if (s == 0.0) return d;
  // disk automorphism z -> (z - a)/(1 - a z), a real, centering the image of the hole
  auto phi = [](double a, double x) { return (x - a) / (1.0 - a * x); };
  double lo = 0.0, hi = s + r;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double a = 0.5 * (lo + hi);
    (phi(a, s - r) + phi(a, s + r) > 0.0 ? lo : hi) = a;
  }
  const double a = 0.5 * (lo + hi);
  return CircleDomain::concentric_annulus(0.5 * (phi(a, s + r) - phi(a, s - r)));
}

namespace {

// Hole separation slack; negative when the configuration is infeasible.
double feasibility(const CircleDomain& d) {
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.holes.size(); ++i) {
    const Hole& a = d.holes[i];
    slack = std::min(slack, 1.0 - 1e-3 - std::abs(a.center) - a.radius);
    for (std::size_t j = i + 1; j < d.holes.size(); ++j) {
      const Hole& b = d.holes[j];
      slack = std::min(slack, std::abs(a.center - b.center) - a.radius - b.radius - 1e-3);
    }
    slack = std::min(slack, a.radius - 1e-3);
  }
  return slack;
}

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  bool converged = false;
};

// Nelder-Mead minimization; `f` returns nullopt-like NaN once the budget is gone.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const std::vector<double>& steps, double tol, const std::function<bool()>& exhausted) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts{x0};
  for (std::size_t i = 0; i < n; ++i) {
    auto x = x0;
    x[i] += steps[i];
    pts.push_back(x);
  }
  std::vector<double> fv;
  for (const auto& p : pts) fv.push_back(f(p));

  auto combine = [n](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
  };

  bool converged = false;
  while (!exhausted()) {
    std::vector<std::size_t> order(n + 1);
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> sp;
    std::vector<double> sf;
    for (auto i : order) sp.push_back(pts[i]), sf.push_back(fv[i]);
    pts = std::move(sp);
    fv = std::move(sf);

    double size = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(pts[i][j] - pts[0][j]));
    if (std::abs(fv[n] - fv[0]) <= tol * std::abs(fv[0]) && size < 1e-6) {
      converged = true;
      break;
    }
    if (size < 1e-9) {
      converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

    const auto xr = combine(centroid, pts[n], -1.0);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const auto xe = combine(centroid, pts[n], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe, fv[n] = fe;
      } else {
        pts[n] = xr, fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      pts[n] = xr, fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      const auto xc = outside ? combine(centroid, xr, 0.5) : combine(centroid, pts[n], 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fv[n])) {
        pts[n] = xc, fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          pts[i] = combine(pts[0], pts[i], 0.5);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
  return {pts[static_cast<std::size_t>(best)], fv[static_cast<std::size_t>(best)], converged};
}

}  // namespace

ConfigurationResult optimize_configuration(int k, const ConfigurationOptions& opt,
                                           const std::function<void(const TracePoint&)>& on_probe) {
  if (k < 1) throw Error(ErrorCode::DomainError, "k must be at least 1");
  ConfigurationResult res;
  if (k == 1) {
    SteklovSolver solver(CircleDomain::disk(), opt.polish.degree);
    res.polished = optimize_density(solver, BoundaryDensity::uniform(1), opt.polish);
    res.domain = res.polished.domain;
    res.density = res.polished.density;
    res.value = res.polished.value;
    res.eigensolves = res.polished.eigensolves;
    return res;
  }

  std::vector<double> x0, steps;
  const double r0 = opt.hole_radius_factor / k;
  if (opt.symmetry == Symmetry::Cyclic) {
    x0 = {opt.ring_radius, std::log(r0)};
    steps = {0.1, 0.3};
  } else {
    for (int j = 0; j < k - 1; ++j) {
      const Complex c = std::polar(opt.ring_radius, kTwoPi * j / (k - 1));
      x0.insert(x0.end(), {c.real(), c.imag(), std::log(r0)});
      steps.insert(steps.end(), {0.05, 0.05, 0.2});
    }
  }

  const int width = 2 * opt.probe.density_degree + 1;
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(k * width);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_x = x0;
  int solves = 0;

  auto objective = [&](const std::vector<double>& p) -> double {
    const CircleDomain d = configuration_domain(k, opt.symmetry, p);
    const double slack = feasibility(d);
    if (slack < 0.0) return 1.0 - slack;  // sigma_1 L > 0 at every feasible point
    SteklovSolver solver(conformal_normal_form(d), opt.probe.degree);
    AscentRun run;
    try {
      run = run_ascent(solver, warm, opt.probe);
    } catch (const Error&) {
      ++solves;
      return 1.0;  // warm start not representable here; treat like an infeasible point
    }
    solves += run.state.eigensolves;
    ++res.probes;
    if (on_probe) on_probe({res.probes, run.state.eps, run.state.value});
    if (run.state.value > best) {
      best = run.state.value;
      best_x = p;
      warm = run.coeffs;
    }
    return -run.state.value;
  };
  auto exhausted = [&] { return solves >= opt.budget; };

  SimplexResult sr = nelder_mead(objective, x0, steps, opt.simplex_tol, exhausted);
  // restart once from the best point with a smaller simplex to refine
  if (!exhausted()) {
    std::vector<double> small = steps;
    for (auto& s : small) s *= 0.1;
    sr = nelder_mead(objective, best_x, small, opt.simplex_tol, exhausted);
  }
  res.budget_exhausted = exhausted() && !sr.converged;

  res.domain = conformal_normal_form(configuration_domain(k, opt.symmetry, best_x));
  SteklovSolver solver(res.domain, opt.polish.degree);
  Eigen::VectorXd init = Eigen::VectorXd::Zero(k * (2 * opt.polish.density_degree + 1));
  const int pw = 2 * opt.polish.density_degree + 1;
  for (int c = 0; c < k; ++c) {
    const int n = std::min(width, pw);
    init.segment(c * pw, n) = warm.segment(c * width, n);
  }
  AscentRun polished = run_ascent(solver, init, opt.polish);
  res.polished = polished.state;
  res.density = polished.state.density;
  res.value = polished.state.value;
  res.eigensolves = solves + polished.state.eigensolves;
  return res;
}

std::vector<SweepEntry> sweep_k(const std::vector<int>& ks, const ConfigurationOptions& opt, int threads) {
  std::vector<SweepEntry> out(ks.size());
  auto run = [&](std::size_t i) {
    SweepEntry e;
    e.k = ks[i];
    e.result = optimize_configuration(ks[i], opt);
    e.value = e.result.value;
    e.budget_exhausted = e.result.budget_exhausted;
    return e;
  };
  const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t start = 0; start < ks.size(); start += workers) {
    std::vector<std::future<SweepEntry>> batch;
    const std::size_t stop = std::min(ks.size(), start + workers);
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, run, i));
    }
    for (std::size_t i = start; i < stop; ++i) out[i] = batch[i - start].get();
  }
  return out;
}

Certificate extremality_certificate(const HarmonicBasis& basis, const BoundaryMeasureSamples& measure,
                                    const Eigen::MatrixXd& eigenspace, int grid) {
  Certificate cert;
  const int p = static_cast<int>(eigenspace.cols());
  cert.eigenspace_too_small = p < 2;
  if (p < 1) return cert;
  const int npair = p * (p + 1) / 2;
  const CircleDomain& dom = basis.domain();

  // feature rows: boundary condition and interior conformality
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  const auto w = quadrature_weights(basis, measure);
  double L = 0.0;
  for (const auto& wc : w) L += wc.sum();

  auto pair_features = [p, npair](const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y, bool symmetric_sum) {
    Eigen::RowVectorXd f(npair);
    int idx = 0;
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) {
        const double v = symmetric_sum ? x(a) * y(b) + x(b) * y(a) : x(a) * y(b);
        f(idx++) = (a == b) ? v / (symmetric_sum ? 2.0 : 1.0) : (symmetric_sum ? v : 2.0 * v);
      }
    return f;
  };

  std::vector<Eigen::MatrixXd> U;
  for (int c = 0; c < dom.components(); ++c) {
    U.push_back(basis.trace(c).values * eigenspace);
    const Eigen::MatrixXd& Uc = U.back();
    for (int q = 0; q < Uc.rows(); ++q) {
      const double sw = std::sqrt(w[static_cast<std::size_t>(c)](q) / L);
      rows.push_back(sw * pair_features(Uc.row(q), Uc.row(q), false));
      rhs.push_back(sw);
    }
  }

  // interior polar grid: gradients of the eigenspace basis
  struct GradPoint {
    Eigen::RowVectorXd gx, gy;
  };
  std::vector<GradPoint> pts;
  {
    const int n = basis.size();
    Eigen::VectorXd v(n), gx(n), gy(n);
    for (int i = 0; i < grid; ++i) {
      const double r = (i + 0.5) / grid;
      for (int j = 0; j < grid; ++j) {
        const Complex z = std::polar(r, kTwoPi * j / grid);
        if (!dom.contains(z)) continue;
        basis.evaluate(z, v, gx, gy);
        pts.push_back({gx.transpose() * eigenspace, gy.transpose() * eigenspace});
      }
    }
  }
  const double iw = pts.empty() ? 0.0 : std::sqrt(1.0 / static_cast<double>(pts.size()));
  for (const auto& g : pts) {
    const double e = 0.5 * (g.gx.squaredNorm() + g.gy.squaredNorm());
    if (!(e > 0.0)) continue;
    // traceless parts of du (x) du: (ux vx - uy vy)/2 and (ux vy + uy vx)/2
    const Eigen::RowVectorXd t11 = 0.5 * (pair_features(g.gx, g.gx, false) - pair_features(g.gy, g.gy, false));
    const Eigen::RowVectorXd t12 = pair_features(g.gx, g.gy, true);
    rows.push_back(iw * std::sqrt(2.0) * t11 / e);
    rhs.push_back(0.0);
    rows.push_back(iw * std::sqrt(2.0) * t12 / e);
    rhs.push_back(0.0);
  }

  Eigen::MatrixXd F(static_cast<Eigen::Index>(rows.size()), npair);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    F.row(static_cast<Eigen::Index>(i)) = rows[i];
    y(static_cast<Eigen::Index>(i)) = rhs[i];
  }
  const Eigen::MatrixXd Q = F.transpose() * F;
  const Eigen::VectorXd bq = F.transpose() * y;

  auto to_matrix = [p](const Eigen::VectorXd& c) {
    Eigen::MatrixXd C(p, p);
    int idx = 0;
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) C(a, b) = C(b, a) = c(idx++);
    return C;
  };
  auto to_pairs = [p, npair](const Eigen::MatrixXd& C) {
    Eigen::VectorXd c(npair);
    int idx = 0;
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) c(idx++) = C(a, b);
    return c;
  };

  // unconstrained fit, then projected gradient over the psd cone
  Eigen::MatrixXd C = project_psd(to_matrix(Q.ldlt().solve(bq)));
  {
    // the pair gradient g maps to the matrix gradient with g/2 off the diagonal
    const double lip = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q, Eigen::EigenvaluesOnly)
                                 .eigenvalues()
                                 .maxCoeff();
    Eigen::MatrixXd X = C, Y = C;
    double tk = 1.0;
    for (int it = 0; it < 3000 && lip > 0.0; ++it) {
      const Eigen::VectorXd g = 2.0 * (Q * to_pairs(Y) - bq);
      Eigen::MatrixXd Gm = to_matrix(g);
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
          if (a != b) Gm(a, b) *= 0.5;
      const Eigen::MatrixXd Xn = project_psd(Y - Gm / lip);
      const double tn = (1.0 + std::sqrt(1.0 + 4.0 * tk * tk)) / 2.0;
      Y = Xn + ((tk - 1.0) / tn) * (Xn - X);
      const double change = (Xn - X).norm();
      X = Xn;
      tk = tn;
      if (change < 1e-15 * std::max(1.0, X.norm())) break;
    }
    const auto fval = [&](const Eigen::MatrixXd& M) { return (F * to_pairs(M) - y).squaredNorm(); };
    if (fval(X) < fval(C)) C = X;
  }
  cert.coefficients = C;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  std::vector<int> keep;
  for (int a = 0; a < p; ++a)
    if (es.eigenvalues()(a) > 1e-10 * top) keep.push_back(a);
  cert.n = static_cast<int>(keep.size());
  Eigen::MatrixXd R(cert.n, p);
  for (int i = 0; i < cert.n; ++i) {
    const int a = keep[static_cast<std::size_t>(i)];
    R.row(i) = std::sqrt(es.eigenvalues()(a)) * es.eigenvectors().col(a).transpose();
  }
  cert.maps = R * eigenspace.transpose();

  for (const auto& Uc : U) {
    for (int q = 0; q < Uc.rows(); ++q) {
      const double s = Uc.row(q) * C * Uc.row(q).transpose();
      cert.residual_boundary = std::max(cert.residual_boundary, std::abs(s - 1.0));
    }
  }
  double emax = 0.0;
  std::vector<double> energy, tau;
  for (const auto& g : pts) {
    const double e = 0.5 * ((g.gx * C * g.gx.transpose())(0) + (g.gy * C * g.gy.transpose())(0));
    const double t11 = 0.5 * ((g.gx * C * g.gx.transpose())(0) - (g.gy * C * g.gy.transpose())(0));
    const double t12 = (g.gx * C * g.gy.transpose())(0);
    energy.push_back(e);
    tau.push_back(std::sqrt(2.0 * (t11 * t11 + t12 * t12)));
    emax = std::max(emax, e);
  }
  for (std::size_t i = 0; i < energy.size(); ++i) {
    if (energy[i] > 1e-8 * emax) cert.residual_conformal = std::max(cert.residual_conformal, tau[i] / energy[i]);
  }
  return cert;
}

}  // namespace steklov
