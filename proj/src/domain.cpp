#include "steklov/domain.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "steklov/error.hpp"
#include "steklov/fourier.hpp"

namespace steklov {

Circle CircleDomain::circle(int component) const {
  if (component == 0) return Circle{{0.0, 0.0}, 1.0, 1};
  const Hole& h = holes.at(static_cast<std::size_t>(component - 1));
  return Circle{h.center, h.radius, -1};
}

bool CircleDomain::contains(Complex z) const {
  if (std::abs(z) >= 1.0) return false;
  for (const auto& h : holes) {
    if (std::abs(z - h.center) <= h.radius) return false;
  }
  return true;
}

void validate(const CircleDomain& domain) {
  for (std::size_t i = 0; i < domain.holes.size(); ++i) {
    const Hole& h = domain.holes[i];
    if (!(h.radius > 0.0) || !std::isfinite(h.radius)) {
      throw Error(ErrorCode::RadiusNonpositive, "hole " + std::to_string(i) + " has nonpositive radius");
    }
    if (!(std::abs(h.center) + h.radius <= 1.0 - kHoleMargin)) {
      throw Error(ErrorCode::HoleOutsideDisk, "hole " + std::to_string(i) + " is not inside the unit disk");
    }
  }
  for (std::size_t i = 0; i < domain.holes.size(); ++i) {
    for (std::size_t j = i + 1; j < domain.holes.size(); ++j) {
      const Hole& a = domain.holes[i];
      const Hole& b = domain.holes[j];
      if (!(std::abs(a.center - b.center) >= a.radius + b.radius + kHoleMargin)) {
        throw Error(ErrorCode::Overlap, "holes " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }
}

BoundaryDensity BoundaryDensity::uniform(int components, double value) {
  BoundaryDensity d;
  d.log_coeffs.assign(static_cast<std::size_t>(components), Eigen::VectorXd::Constant(1, std::log(value)));
  return d;
}

double BoundaryDensity::log_value(int component, double theta) const {
  const Eigen::VectorXd& c = log_coeffs.at(static_cast<std::size_t>(component));
  double s = c.size() > 0 ? c(0) : 0.0;
  for (Eigen::Index k = 1; 2 * k - 1 < c.size(); ++k) {
    s += c(2 * k - 1) * std::cos(static_cast<double>(k) * theta);
    if (2 * k < c.size()) s += c(2 * k) * std::sin(static_cast<double>(k) * theta);
  }
  return s;
}

double BoundaryDensity::value(int component, double theta) const { return std::exp(log_value(component, theta)); }

double BoundaryMeasureSamples::total_mass() const {
  double L = 0.0;
  for (const auto& v : values) L += v.sum() * 2.0 * std::numbers::pi / static_cast<double>(v.size());
  return L;
}

BoundaryMeasureSamples BoundaryMeasureSamples::scaled(double factor) const {
  BoundaryMeasureSamples out = *this;
  for (auto& v : out.values) v *= factor;
  return out;
}

BoundaryMeasureSamples sample(const CircleDomain& domain, const BoundaryDensity& density, int grid) {
  if (density.components() != domain.components()) {
    throw Error(ErrorCode::DomainError, "density has " + std::to_string(density.components()) +
                                            " components, domain has " + std::to_string(domain.components()));
  }
  if (!fourier::is_power_of_two(grid)) throw Error(ErrorCode::DomainError, "grid size must be a power of two");
  BoundaryMeasureSamples s;
  s.values.resize(static_cast<std::size_t>(domain.components()));
  for (int c = 0; c < domain.components(); ++c) {
    const double r = domain.circle(c).radius;
    Eigen::VectorXd v(grid);
    for (int j = 0; j < grid; ++j) {
      v(j) = density.value(c, 2.0 * std::numbers::pi * j / grid) * r;
    }
    s.values[static_cast<std::size_t>(c)] = std::move(v);
  }
  return s;
}

double boundary_length(const BoundaryMeasureSamples& samples) { return samples.total_mass(); }

double boundary_length(const CircleDomain& domain, const BoundaryDensity& density, int grid) {
  return sample(domain, density, grid).total_mass();
}

BoundaryMeasureSamples heat_smooth(const CircleDomain& domain, const BoundaryMeasureSamples& samples, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::DomainError, "smoothing parameter must be nonnegative");
  if (eps == 0.0) return samples;
  BoundaryMeasureSamples out = samples;
  for (int c = 0; c < samples.components(); ++c) {
    const double r = domain.circle(c).radius;
    const double rate = eps / (r * r);
    auto& v = out.values[static_cast<std::size_t>(c)];
    const double peak = v.cwiseAbs().maxCoeff();
    v = fourier::apply_multiplier(v, [rate](int n) { return std::exp(-rate * n * n); });
    // heat flow keeps a positive measure positive; clip FFT roundoff on steep densities
    if (samples.values[static_cast<std::size_t>(c)].minCoeff() > 0.0) v = v.cwiseMax(1e-14 * peak);
  }
  return out;
}

BoundaryMeasureSamples heat_smooth(const CircleDomain& domain, const BoundaryDensity& density, double eps, int grid) {
  return heat_smooth(domain, sample(domain, density, grid), eps);
}

BoundaryDensity normalize(const CircleDomain& domain, const BoundaryDensity& density, int grid) {
  const double L = boundary_length(domain, density, grid);
  BoundaryDensity out = density;
  for (auto& c : out.log_coeffs) {
    if (c.size() == 0) c = Eigen::VectorXd::Zero(1);
    c(0) -= std::log(L);
  }
  return out;
}

BoundaryDensity matched_cylinder_density(const CircleDomain& domain) {
  BoundaryDensity d;
  for (int c = 0; c < domain.components(); ++c) {
    d.log_coeffs.push_back(Eigen::VectorXd::Constant(1, -std::log(domain.circle(c).radius)));
  }
  return d;
}

}  // namespace steklov
