#include "steklov/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "steklov/closedform.hpp"
#include "steklov/error.hpp"
#include "steklov/quadrature.hpp"

namespace steklov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDiskDepth = 36.0;  // e^{-72} is far below roundoff in area integrands
constexpr int kDiskPanels = 8;
constexpr double kKindTol = 1e-8;

Eigen::VectorXd vec3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }
Eigen::VectorXd vec4(double a, double b, double c, double d) { return Eigen::Vector4d(a, b, c, d); }

struct TensorRule {
  Eigen::VectorXd t, wt;
  int ntheta = 0;
  double wtheta = 0.0;  // includes the Moebius half factor
};

TensorRule tensor_rule(const ParametricSurface& s) {
  TensorRule r;
  const int panels = s.topology == SurfaceTopology::Disk ? kDiskPanels : 1;
  const auto gl = quad::gauss_legendre<double>(s.grid.nt, s.t_min(), s.t_max(), panels);
  r.t = gl.nodes;
  r.wt = gl.weights;
  r.ntheta = s.grid.ntheta;
  r.wtheta = 2.0 * kPi / r.ntheta;
  if (s.topology == SurfaceTopology::Moebius) r.wtheta /= 2.0;
  return r;
}

double theta_at(const TensorRule& r, int j) { return 2.0 * kPi * j / r.ntheta; }

struct BoundaryCircle {
  double t;
  double outward;  // +1 when increasing t leaves the surface
  double weight;   // Moebius: both circles cover the single boundary once together
};

std::vector<BoundaryCircle> boundary_circles(const ParametricSurface& s) {
  switch (s.topology) {
    case SurfaceTopology::Disk:
      return {{0.0, 1.0, 1.0}};
    case SurfaceTopology::Moebius:
      return {{s.T, 1.0, 0.5}, {-s.T, -1.0, 0.5}};
    case SurfaceTopology::Annulus:
      break;
  }
  return {{s.T, 1.0, 1.0}, {-s.T, -1.0, 1.0}};
}

// sum over the interior quadrature of f(t, theta) dt dtheta
template <typename F>
double integrate(const ParametricSurface& s, F&& f) {
  const TensorRule r = tensor_rule(s);
  double acc = 0.0;
  for (int i = 0; i < r.t.size(); ++i) {
    double row = 0.0;
    for (int j = 0; j < r.ntheta; ++j) row += f(r.t(i), theta_at(r, j));
    acc += r.wt(i) * row;
  }
  return acc * r.wtheta;
}

// sum over the boundary circles of f(t, theta, outward) dtheta (caller supplies ds)
template <typename F>
double integrate_boundary(const ParametricSurface& s, F&& f) {
  const int nth = s.grid.ntheta;
  const double w = 2.0 * kPi / nth;
  double acc = 0.0;
  for (const auto& c : boundary_circles(s)) {
    double row = 0.0;
    for (int j = 0; j < nth; ++j) row += f(c.t, 2.0 * kPi * j / nth, c.outward);
    acc += c.weight * row;
  }
  return acc * w;
}

template <typename F>
void for_each_grid_point(const ParametricSurface& s, F&& f) {
  const TensorRule r = tensor_rule(s);
  for (int i = 0; i < r.t.size(); ++i)
    for (int j = 0; j < r.ntheta; ++j) f(r.t(i), theta_at(r, j));
}

// Tangential projection of a vector given the coordinate frame.
Eigen::VectorXd tangential(const SurfaceJet& j, const Eigen::VectorXd& w) {
  const double mu = j.xt.squaredNorm();
  return (w.dot(j.xt) * j.xt + w.dot(j.xs) * j.xs) / mu;
}

}  // namespace

const char* to_string(SurfaceTopology topology) {
  switch (topology) {
    case SurfaceTopology::Annulus:
      return "annulus";
    case SurfaceTopology::Moebius:
      return "moebius";
    case SurfaceTopology::Disk:
      return "disk";
  }
  return "unknown";
}

ParametricSurface catenoid(double T) {
  if (!(T > 0.0)) throw Error(ErrorCode::DomainError, "catenoid half-length must be positive");
  ParametricSurface s;
  s.topology = SurfaceTopology::Annulus;
  s.T = T;
  s.n = 3;
  s.scale = std::sqrt(std::cosh(T) * std::cosh(T) + T * T);
  const double R = s.scale;
  s.jet = [R](double t, double th) {
    const double ch = std::cosh(t) / R, sh = std::sinh(t) / R, c = std::cos(th), sn = std::sin(th);
    return SurfaceJet{vec3(ch * c, ch * sn, t / R), vec3(sh * c, sh * sn, 1.0 / R), vec3(-ch * sn, ch * c, 0.0),
                      vec3(ch * c, ch * sn, 0.0),   vec3(-sh * sn, sh * c, 0.0),  vec3(-ch * c, -ch * sn, 0.0)};
  };
  return s;
}

ParametricSurface critical_catenoid() { return catenoid(closedform::critical_parameter(closedform::Topology::Annulus)); }

ParametricSurface moebius_band(double T) {
  if (!(T > 0.0)) throw Error(ErrorCode::DomainError, "Moebius half-length must be positive");
  ParametricSurface s;
  s.topology = SurfaceTopology::Moebius;
  s.T = T;
  s.n = 4;
  s.scale = std::sqrt(4.0 * std::sinh(T) * std::sinh(T) + std::cosh(2.0 * T) * std::cosh(2.0 * T));
  const double R = s.scale;
  s.jet = [R](double t, double th) {
    const double sh = std::sinh(t) / R, ch = std::cosh(t) / R;
    const double sh2 = std::sinh(2.0 * t) / R, ch2 = std::cosh(2.0 * t) / R;
    const double c = std::cos(th), sn = std::sin(th), c2 = std::cos(2.0 * th), s2 = std::sin(2.0 * th);
    return SurfaceJet{vec4(2 * sh * c, 2 * sh * sn, ch2 * c2, ch2 * s2),
                      vec4(2 * ch * c, 2 * ch * sn, 2 * sh2 * c2, 2 * sh2 * s2),
                      vec4(-2 * sh * sn, 2 * sh * c, -2 * ch2 * s2, 2 * ch2 * c2),
                      vec4(2 * sh * c, 2 * sh * sn, 4 * ch2 * c2, 4 * ch2 * s2),
                      vec4(-2 * ch * sn, 2 * ch * c, -4 * sh2 * s2, 4 * sh2 * c2),
                      vec4(-2 * sh * c, -2 * sh * sn, -4 * ch2 * c2, -4 * ch2 * s2)};
  };
  return s;
}

ParametricSurface critical_moebius() { return moebius_band(closedform::critical_parameter(closedform::Topology::Moebius)); }

ParametricSurface flat_disk() {
  ParametricSurface s;
  s.topology = SurfaceTopology::Disk;
  s.T = kDiskDepth;
  s.n = 3;
  s.jet = [](double t, double th) {
    const double r = std::exp(t), c = std::cos(th), sn = std::sin(th);
    const Eigen::VectorXd x = vec3(r * c, r * sn, 0.0), xs = vec3(-r * sn, r * c, 0.0);
    return SurfaceJet{x, x, xs, x, xs, -x};
  };
  return s;
}

ParametricSurface with_finite_differences(const ParametricSurface& surface, double h) {
  ParametricSurface s = surface;
  const auto base = surface.jet;
  s.jet = [base, h](double t, double th) {
    auto x = [&](double a, double b) { return base(a, b).x; };
    static constexpr double c1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};      // / 12 h
    static constexpr double c2[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};  // / 12 h^2
    SurfaceJet j;
    j.x = x(t, th);
    const int n = static_cast<int>(j.x.size());
    j.xt = j.xs = j.xtt = j.xss = j.xts = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < 5; ++k) {
      const double d = (k - 2) * h;
      const Eigen::VectorXd xt = x(t + d, th), xs = x(t, th + d);
      j.xt += c1[k] * xt;
      j.xs += c1[k] * xs;
      j.xtt += c2[k] * xt;
      j.xss += c2[k] * xs;
      for (int l = 0; l < 5; ++l) {
        if (c1[k] == 0.0 || c1[l] == 0.0) continue;
        j.xts += c1[k] * c1[l] * x(t + d, th + (l - 2) * h);
      }
    }
    j.xt /= 12.0 * h;
    j.xs /= 12.0 * h;
    j.xtt /= 12.0 * h * h;
    j.xss /= 12.0 * h * h;
    j.xts /= 144.0 * h * h;
    return j;
  };
  return s;
}

SurfaceGeometry geometry(const ParametricSurface& surface, double t, double theta) {
  SurfaceGeometry g;
  g.jet = surface.jet(t, theta);
  const auto& j = g.jet;
  const int n = static_cast<int>(j.x.size());
  g.lambda = j.xt.norm();
  g.tangent.resize(n, 2);
  g.tangent.col(0) = j.xt / g.lambda;
  g.tangent.col(1) = j.xs / j.xs.norm();
  g.normal.resize(n, n - 2);
  if (n == 3) {
    const Eigen::Vector3d a = j.xt, b = j.xs;
    const Eigen::Vector3d nu = a.cross(b);
    g.normal.col(0) = nu / nu.norm();
  } else {
    Eigen::MatrixXd frame = g.tangent;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int c = 0; c < n - 2; ++c) {
      int best = -1;
      double best_norm = -1.0;
      Eigen::VectorXd best_vec;
      for (int a = 0; a < n; ++a) {
        if (used[static_cast<std::size_t>(a)]) continue;
        Eigen::VectorXd e = Eigen::VectorXd::Unit(n, a);
        e -= frame * (frame.transpose() * e);
        e -= frame * (frame.transpose() * e);  // second pass for orthogonality
        if (e.norm() > best_norm) best = a, best_norm = e.norm(), best_vec = e;
      }
      used[static_cast<std::size_t>(best)] = true;
      g.normal.col(c) = best_vec / best_norm;
      frame.conservativeResize(Eigen::NoChange, frame.cols() + 1);
      frame.col(frame.cols() - 1) = g.normal.col(c);
    }
  }
  auto nproj = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return g.normal * (g.normal.transpose() * v); };
  g.h11 = nproj(j.xtt);
  g.h12 = nproj(j.xts);
  g.h22 = nproj(j.xss);
  return g;
}

VariationField normal_part(const ParametricSurface& surface, const Eigen::VectorXd& v) {
  if (v.size() != surface.n) throw Error(ErrorCode::DomainError, "vector dimension differs from the ambient space");
  VariationField f;
  f.kind = FieldKind::Normal;
  const auto jet = surface.jet;
  f.eval = [jet, v](double t, double th) {
    const SurfaceJet j = jet(t, th);
    const double mu = j.xt.squaredNorm();
    const double a = v.dot(j.xt), b = v.dot(j.xs);
    const Eigen::VectorXd P = a * j.xt + b * j.xs;
    auto dP = [&](const Eigen::VectorXd& dxt, const Eigen::VectorXd& dxs, double dmu) -> Eigen::VectorXd {
      const Eigen::VectorXd num = v.dot(dxt) * j.xt + a * dxt + v.dot(dxs) * j.xs + b * dxs;
      return -(num * mu - P * dmu) / (mu * mu);
    };
    FieldJet out;
    out.w = v - P / mu;
    out.wt = dP(j.xtt, j.xts, 2.0 * j.xt.dot(j.xtt));
    out.ws = dP(j.xts, j.xss, 2.0 * j.xt.dot(j.xts));
    return out;
  };
  return f;
}

VariationField scalar_normal_field(const ParametricSurface& surface, ScalarField psi) {
  if (surface.n != 3) throw Error(ErrorCode::DomainError, "scalar normal fields need a hypersurface in R^3");
  VariationField f;
  f.kind = FieldKind::Normal;
  const ParametricSurface s = surface;
  f.eval = [s, psi](double t, double th) {
    const SurfaceGeometry g = geometry(s, t, th);
    const Eigen::VectorXd nu = g.normal.col(0);
    const double mu = g.lambda * g.lambda;
    const double h11 = g.jet.xtt.dot(nu), h12 = g.jet.xts.dot(nu), h22 = g.jet.xss.dot(nu);
    // Weingarten: nu_i = -h_ij x_j / lambda^2
    const Eigen::VectorXd nut = -(h11 * g.jet.xt + h12 * g.jet.xs) / mu;
    const Eigen::VectorXd nus = -(h12 * g.jet.xt + h22 * g.jet.xs) / mu;
    const ScalarJet p = psi(t, th);
    return FieldJet{p.v * nu, p.vt * nu + p.v * nut, p.vs * nu + p.v * nus};
  };
  return f;
}

VariationField rotation_field(const ParametricSurface& surface) {
  VariationField f;
  f.kind = FieldKind::Tangential;
  f.boundary_tangent = true;
  const auto jet = surface.jet;
  f.eval = [jet](double t, double th) {
    const SurfaceJet j = jet(t, th);
    return FieldJet{j.xs, j.xts, j.xss};
  };
  return f;
}

VariationField sphere_tangent_field(const ParametricSurface& surface, std::function<FieldJet(double, double)> Z) {
  VariationField f;
  f.kind = FieldKind::Mixed;
  f.boundary_tangent = true;
  const auto jet = surface.jet;
  f.eval = [jet, Z](double t, double th) {
    const SurfaceJet j = jet(t, th);
    const FieldJet z = Z(t, th);
    const double zx = z.w.dot(j.x);
    FieldJet out;
    out.w = z.w - zx * j.x;
    out.wt = z.wt - (z.wt.dot(j.x) + z.w.dot(j.xt)) * j.x - zx * j.xt;
    out.ws = z.ws - (z.ws.dot(j.x) + z.w.dot(j.xs)) * j.x - zx * j.xs;
    return out;
  };
  return f;
}

VariationField scaled(const VariationField& field, double c) {
  VariationField f = field;
  const auto base = field.eval;
  f.eval = [base, c](double t, double th) {
    FieldJet j = base(t, th);
    j.w *= c;
    j.wt *= c;
    j.ws *= c;
    return j;
  };
  return f;
}

double kind_violation(const ParametricSurface& surface, const VariationField& field) {
  if (field.kind == FieldKind::Mixed) return 0.0;
  double worst = 0.0;
  for_each_grid_point(surface, [&](double t, double th) {
    const SurfaceJet j = surface.jet(t, th);
    const Eigen::VectorXd w = field.eval(t, th).w;
    const Eigen::VectorXd tan = tangential(j, w);
    worst = std::max(worst, field.kind == FieldKind::Normal ? tan.norm() : (w - tan).norm());
  });
  return worst;
}

double boundary_tangency_violation(const ParametricSurface& surface, const VariationField& field) {
  double worst = 0.0;
  const int nth = surface.grid.ntheta;
  for (const auto& c : boundary_circles(surface)) {
    for (int j = 0; j < nth; ++j) {
      const double th = 2.0 * kPi * j / nth;
      worst = std::max(worst, std::abs(surface.jet(c.t, th).x.dot(field.eval(c.t, th).w)));
    }
  }
  return worst;
}

double parameter_integral(const ParametricSurface& surface, const std::function<double(double, double)>& f) {
  return integrate(surface, f);
}

double area(const ParametricSurface& surface) {
  return integrate(surface, [&](double t, double th) { return surface.jet(t, th).xt.squaredNorm(); });
}

double boundary_length(const ParametricSurface& surface) {
  return integrate_boundary(surface, [&](double t, double th, double) { return surface.jet(t, th).xs.norm(); });
}

double l2_mass(const ParametricSurface& surface, const VariationField& field) {
  return integrate(surface, [&](double t, double th) {
    return field.eval(t, th).w.squaredNorm() * surface.jet(t, th).xt.squaredNorm();
  });
}

double boundary_mass(const ParametricSurface& surface, const VariationField& field) {
  return integrate_boundary(surface, [&](double t, double th, double) {
    return field.eval(t, th).w.squaredNorm() * surface.jet(t, th).xs.norm();
  });
}

double dirichlet_energy(const ParametricSurface& surface, const VariationField& field) {
  // conformal invariance: |DW|^2 da = (|W_t|^2 + |W_theta|^2) dt dtheta
  return integrate(surface, [&](double t, double th) {
    const FieldJet f = field.eval(t, th);
    return f.wt.squaredNorm() + f.ws.squaredNorm();
  });
}

double field_norm(const ParametricSurface& surface, const VariationField& field) {
  return std::sqrt(dirichlet_energy(surface, field) + boundary_mass(surface, field));
}

double index_form_S(const ParametricSurface& surface, const VariationField& W) {
  double wmax = 0.0, tmax = 0.0;
  for_each_grid_point(surface, [&](double t, double th) {
    const Eigen::VectorXd w = W.eval(t, th).w;
    wmax = std::max(wmax, w.norm());
    tmax = std::max(tmax, tangential(surface.jet(t, th), w).norm());
  });
  if (tmax > kKindTol * std::max(1.0, wmax)) {
    throw Error(ErrorCode::NotNormal, "field has tangential part " + std::to_string(tmax));
  }
  const double interior = integrate(surface, [&](double t, double th) {
    const SurfaceGeometry g = geometry(surface, t, th);
    const FieldJet f = W.eval(t, th);
    auto perp = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return g.normal * (g.normal.transpose() * v); };
    const double grad = perp(f.wt).squaredNorm() + perp(f.ws).squaredNorm();
    const double a11 = f.w.dot(g.h11), a12 = f.w.dot(g.h12), a22 = f.w.dot(g.h22);
    const double shape = (a11 * a11 + 2.0 * a12 * a12 + a22 * a22) / (g.lambda * g.lambda);
    return grad - shape;
  });
  return interior - boundary_mass(surface, W);
}

double energy_form_Q(const ParametricSurface& surface, const VariationField& V, const VariationField& W) {
  for (const VariationField* f : {&V, &W}) {
    double scale = 1.0;
    for_each_grid_point(surface, [&](double t, double th) { scale = std::max(scale, f->eval(t, th).w.norm()); });
    const double viol = boundary_tangency_violation(surface, *f);
    if (viol > kKindTol * scale) {
      throw Error(ErrorCode::BoundaryTangencyViolated, "x . V = " + std::to_string(viol) + " on the boundary");
    }
  }
  const double interior = integrate(surface, [&](double t, double th) {
    const FieldJet a = V.eval(t, th), b = W.eval(t, th);
    return a.wt.dot(b.wt) + a.ws.dot(b.ws);
  });
  const double bdry = integrate_boundary(surface, [&](double t, double th, double) {
    return V.eval(t, th).w.dot(W.eval(t, th).w) * surface.jet(t, th).xs.norm();
  });
  return interior - bdry;
}

FormReport verify_minimal_free_boundary(const ParametricSurface& surface) {
  FormReport rep;
  double harm = 0.0, conf_len = 0.0, conf_ang = 0.0, sph = 0.0, rad = 0.0, eig = 0.0, ident = 0.0;
  auto interior_point = [&](double t, double th) {
    const SurfaceJet j = surface.jet(t, th);
    harm = std::max(harm, (j.xtt + j.xss).cwiseAbs().maxCoeff());
    conf_len = std::max(conf_len, std::abs(j.xt.squaredNorm() - j.xs.squaredNorm()));
    conf_ang = std::max(conf_ang, std::abs(j.xt.dot(j.xs)));
    if (surface.topology == SurfaceTopology::Moebius) {
      ident = std::max(ident, (j.x - surface.jet(-t, th + kPi).x).cwiseAbs().maxCoeff());
    }
  };
  for_each_grid_point(surface, interior_point);
  const int nth = surface.grid.ntheta;
  for (const auto& c : boundary_circles(surface)) {
    for (int k = 0; k < nth; ++k) {
      const double th = 2.0 * kPi * k / nth;
      interior_point(c.t, th);
      const SurfaceJet j = surface.jet(c.t, th);
      const Eigen::VectorXd dn = c.outward * j.xt / j.xt.norm();  // derivative along the unit conormal
      sph = std::max(sph, std::abs(1.0 - j.x.norm()));
      rad = std::max(rad, (dn / dn.norm() - j.x).cwiseAbs().maxCoeff());
      eig = std::max(eig, (dn - j.x).cwiseAbs().maxCoeff());
    }
  }
  rep.identity_residuals["harmonicity"] = harm;
  rep.identity_residuals["conformality_length"] = conf_len;
  rep.identity_residuals["conformality_angle"] = conf_ang;
  rep.identity_residuals["boundary_sphericality"] = sph;
  rep.identity_residuals["conormal_radiality"] = rad;
  rep.identity_residuals["eigenfunction"] = eig;
  if (surface.topology == SurfaceTopology::Moebius) rep.identity_residuals["moebius_identification"] = ident;
  rep.area = area(surface);
  rep.boundary_length = boundary_length(surface);
  return rep;
}

FormReport area_length_report(const ParametricSurface& surface) {
  FormReport rep;
  rep.area = area(surface);
  rep.boundary_length = boundary_length(surface);
  rep.identity_residuals["two_area_minus_length"] = std::abs(2.0 * rep.area - rep.boundary_length);
  return rep;
}

IndexIdentity index_identity(const ParametricSurface& surface, const Eigen::VectorXd& v) {
  const VariationField W = normal_part(surface, v);
  IndexIdentity id;
  id.S = index_form_S(surface, W);
  id.mass = l2_mass(surface, W);
  const double k = 2.0;  // dimension of the surface
  id.boundary_formula = integrate_boundary(surface, [&](double t, double th, double) {
    const SurfaceJet j = surface.jet(t, th);
    const double vx = v.dot(j.x);
    return (-v.squaredNorm() + k * vx * vx) * j.xs.norm();
  });
  id.relative_residual = std::abs(id.S + k * id.mass) / id.mass;
  return id;
}

TriangleMesh triangulate(const ParametricSurface& surface, int nt, int ntheta) {
  if (nt < 2 || ntheta < 3) throw Error(ErrorCode::DomainError, "mesh needs nt >= 2 and ntheta >= 3");
  TriangleMesh m;
  const int n = surface.n;
  switch (surface.topology) {
    case SurfaceTopology::Annulus:
    case SurfaceTopology::Moebius: {
      const bool moebius = surface.topology == SurfaceTopology::Moebius;
      const double span = moebius ? kPi : 2.0 * kPi;
      m.vertices.resize(nt * ntheta, n);
      for (int i = 0; i < nt; ++i) {
        const double t = -surface.T + 2.0 * surface.T * i / (nt - 1);
        for (int j = 0; j < ntheta; ++j) m.vertices.row(i * ntheta + j) = surface.jet(t, span * j / ntheta).x.transpose();
      }
      for (int i = 0; i + 1 < nt; ++i) {
        for (int j = 0; j < ntheta; ++j) {
          auto id = [&](int a, int b) {
            if (b < ntheta) return a * ntheta + b;
            // past the last column: wrap, through the seam for the Moebius band
            return moebius ? (nt - 1 - a) * ntheta : a * ntheta;
          };
          const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
          m.faces.push_back({v00, v10, v11});
          m.faces.push_back({v00, v11, v01});
        }
      }
      break;
    }
    case SurfaceTopology::Disk: {
      m.vertices.resize(1 + (nt - 1) * ntheta, n);
      m.vertices.row(0) = surface.jet(surface.t_min(), 0.0).x.transpose();
      for (int i = 1; i < nt; ++i) {
        const double t = std::log(static_cast<double>(i) / (nt - 1));
        for (int j = 0; j < ntheta; ++j) {
          m.vertices.row(1 + (i - 1) * ntheta + j) = surface.jet(t, 2.0 * kPi * j / ntheta).x.transpose();
        }
      }
      auto id = [&](int ring, int j) { return 1 + (ring - 1) * ntheta + (j % ntheta); };
      for (int j = 0; j < ntheta; ++j) m.faces.push_back({0, id(1, j), id(1, j + 1)});
      for (int i = 1; i + 1 < nt; ++i) {
        for (int j = 0; j < ntheta; ++j) {
          m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
          m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
      }
      break;
    }
  }
  return m;
}

}  // namespace steklov
