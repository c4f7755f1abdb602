#include "steklov/closedform.hpp"

#include <algorithm>
#include <numbers>

namespace steklov {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Overlap: return "Overlap";
    case ErrorCode::HoleOutsideDisk: return "HoleOutsideDisk";
    case ErrorCode::RadiusNonpositive: return "RadiusNonpositive";
    case ErrorCode::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::MassMatrixDegenerate: return "MassMatrixDegenerate";
    case ErrorCode::ConditioningFailure: return "ConditioningFailure";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotAnEigenfunction: return "NotAnEigenfunction";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::BoundaryTangencyViolated: return "BoundaryTangencyViolated";
    case ErrorCode::Unsolvable: return "Unsolvable";
    case ErrorCode::BoundarySystemSingular: return "BoundarySystemSingular";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError:
    case ErrorCode::Overlap:
    case ErrorCode::HoleOutsideDisk:
    case ErrorCode::RadiusNonpositive:
    case ErrorCode::DegreeTooLarge:
    case ErrorCode::NonPositiveDensity:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::NotNormal:
    case ErrorCode::BoundaryTangencyViolated:
      return true;
    default:
      return false;
  }
}

}  // namespace steklov

namespace steklov::closedform {

namespace {

void check_args(double T, double fT, int n_max) {
  if (!(T > 0) || !std::isfinite(T)) throw Error(ErrorCode::DomainError, "T must be positive");
  if (!(fT > 0) || !std::isfinite(fT)) throw Error(ErrorCode::DomainError, "f(T) must be positive");
  if (n_max < 1) throw Error(ErrorCode::DomainError, "n_max must be at least 1");
}

void sort_entries(std::vector<SpectrumEntry>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
    return a.mode < b.mode;
  });
}

}  // namespace

const char* to_string(Topology topology) {
  return topology == Topology::Annulus ? "annulus" : "moebius";
}

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::Constant: return "constant";
    case Branch::Linear: return "linear";
    case Branch::Sinh: return "sinh";
    case Branch::Cosh: return "cosh";
  }
  return "unknown";
}

std::vector<double> ClosedFormSpectrum::expanded() const {
  std::vector<double> out;
  for (const auto& e : entries) {
    for (int k = 0; k < e.multiplicity; ++k) out.push_back(e.eigenvalue);
  }
  return out;
}

ClosedFormSpectrum annulus_spectrum(double T, double fT, int n_max) {
  check_args(T, fT, n_max);
  ClosedFormSpectrum s;
  s.entries.push_back({0.0, 0, Branch::Constant, 1});
  s.entries.push_back({1.0 / (T * fT), 0, Branch::Linear, 1});
  for (int n = 1; n <= n_max; ++n) {
    s.entries.push_back({n * std::tanh(n * T) / fT, n, Branch::Cosh, 2});
    s.entries.push_back({n / std::tanh(n * T) / fT, n, Branch::Sinh, 2});
  }
  sort_entries(s.entries);
  return s;
}

ClosedFormSpectrum moebius_spectrum(double T, double fT, int n_max) {
  check_args(T, fT, n_max);
  ClosedFormSpectrum s;
  s.entries.push_back({0.0, 0, Branch::Constant, 1});
  for (int n = 1; n <= n_max; ++n) {
    if (n % 2 == 1) {
      s.entries.push_back({n / std::tanh(n * T) / fT, n, Branch::Sinh, 2});
    } else {
      s.entries.push_back({n * std::tanh(n * T) / fT, n, Branch::Cosh, 2});
    }
  }
  sort_entries(s.entries);
  return s;
}

ClosedFormSpectrum spectrum(const RotSymSurface& surface, int n_max) {
  return surface.topology == Topology::Annulus ? annulus_spectrum(surface.T, surface.fT, n_max)
                                               : moebius_spectrum(surface.T, surface.fT, n_max);
}

double branch_residual(const SpectrumEntry& e, double T, double fT) {
  const double n = e.mode;
  switch (e.branch) {
    case Branch::Constant: return e.eigenvalue;
    // u = t: du/deta = 1/fT at t = T, sigma u = sigma T
    case Branch::Linear: return fT * e.eigenvalue * T - 1.0;
    // u = sinh(n t): n cosh(nT) = fT sigma sinh(nT), divided by cosh(nT)
    case Branch::Sinh: return fT * e.eigenvalue * std::tanh(n * T) - n;
    // u = cosh(n t): n sinh(nT) = fT sigma cosh(nT), divided by cosh(nT)
    case Branch::Cosh: return fT * e.eigenvalue - n * std::tanh(n * T);
  }
  return 0.0;
}

double critical_parameter(Topology topology) {
  if (topology == Topology::Annulus) {
    auto f = [](double t) { return t * std::tanh(t) - 1.0; };
    auto df = [](double t) {
      const double c = std::cosh(t);
      return std::tanh(t) + t / (c * c);
    };
    return bisect_newton(f, df, 1.0, 1.5);
  }
  // coth t - 2 tanh 2t, multiplied through by sinh t to stay finite near 0
  auto f = [](double t) { return std::cosh(t) - 2.0 * std::tanh(2.0 * t) * std::sinh(t); };
  auto df = [](double t) {
    const double c2 = std::cosh(2.0 * t);
    return std::sinh(t) - 4.0 / (c2 * c2) * std::sinh(t) - 2.0 * std::tanh(2.0 * t) * std::cosh(t);
  };
  return bisect_newton(f, df, 0.4, 1.0);
}

double critical_sigma1L(Topology topology) {
  if (topology == Topology::Moebius) return 2.0 * std::numbers::pi * std::sqrt(3.0);
  return 4.0 * std::numbers::pi / critical_parameter(Topology::Annulus);
}

double rotsym_sigma1L(Topology topology, double T) {
  if (!(T > 0)) throw Error(ErrorCode::DomainError, "T must be positive");
  if (topology == Topology::Annulus) return 4.0 * std::numbers::pi * std::min(std::tanh(T), 1.0 / T);
  return 2.0 * std::numbers::pi * std::min(1.0 / std::tanh(T), 2.0 * std::tanh(2.0 * T));
}

}  // namespace steklov::closedform
