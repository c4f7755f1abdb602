#pragma once

// Steklov spectra of rotationally symmetric metrics f(t)^2 (dt^2 + dtheta^2)
// on the cylinder [-T, T] x S^1, with f even in t, and on its Moebius
// quotient (t, theta) ~ (-t, theta + pi). Separation of variables gives the
// spectrum in closed form.

#include <cmath>
#include <limits>
#include <vector>

#include "steklov/error.hpp"

namespace steklov::closedform {

enum class Topology { Annulus, Moebius };

/// Radial profile of the eigenfunction family: 1, t, sinh(n t), cosh(n t).
enum class Branch { Constant, Linear, Sinh, Cosh };

const char* to_string(Topology topology);
const char* to_string(Branch branch);

struct RotSymSurface {
  Topology topology = Topology::Annulus;
  double T = 1.0;
  double fT = 1.0;
};

struct SpectrumEntry {
  double eigenvalue = 0.0;
  int mode = 0;
  Branch branch = Branch::Constant;
  int multiplicity = 1;
};

struct ClosedFormSpectrum {
  std::vector<SpectrumEntry> entries;  // sorted by eigenvalue

  /// Eigenvalues repeated according to multiplicity.
  std::vector<double> expanded() const;
};

ClosedFormSpectrum annulus_spectrum(double T, double fT, int n_max);
ClosedFormSpectrum moebius_spectrum(double T, double fT, int n_max);
ClosedFormSpectrum spectrum(const RotSymSurface& surface, int n_max);

/// Residual of the transcendental relation an entry must satisfy, e.g.
/// fT * sigma - n tanh(n T) for the Cosh branch. Zero for exact entries.
double branch_residual(const SpectrumEntry& entry, double T, double fT);

/// Annulus: positive root of t tanh t = 1. Moebius: positive root of
/// coth t = 2 tanh 2t.
double critical_parameter(Topology topology);

/// Maximal sigma_1 L over rotationally symmetric metrics: 4 pi / T0 for the
/// annulus (critical catenoid), 2 pi sqrt(3) for the Moebius band.
double critical_sigma1L(Topology topology);

/// sigma_1 L of the rotationally symmetric metric with half-length T,
/// independent of fT: 4 pi min(tanh T, 1/T) or 2 pi min(coth T, 2 tanh 2T).
double rotsym_sigma1L(Topology topology, double T);

/// Bisection down to machine resolution followed by two Newton steps.
/// Requires f(lo) and f(hi) to have opposite signs.
template <typename Scalar, typename F, typename DF>
Scalar bisect_newton(F&& f, DF&& df, Scalar lo, Scalar hi) {
  Scalar flo = f(lo);
  const Scalar fhi = f(hi);
  if (!(flo * fhi <= 0)) {
    throw Error(ErrorCode::DomainError, "bisect_newton: bracket does not change sign");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const Scalar mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;
    const Scalar fmid = f(mid);
    if (fmid == 0) {
      lo = hi = mid;
      break;
    }
    if ((fmid < 0) == (flo < 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  Scalar x = (lo + hi) / 2;
  for (int k = 0; k < 2; ++k) {
    const Scalar d = df(x);
    if (d != 0) x -= f(x) / d;
  }
  return x;
}

}  // namespace steklov::closedform
