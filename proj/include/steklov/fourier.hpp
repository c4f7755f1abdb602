#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace steklov::fourier {

/// Forward DFT of equispaced samples, c_n = (1/N) sum_j x_j e^{-i n theta_j},
/// in FFT order (n = 0..N/2-1, then negative frequencies).
Eigen::VectorXcd coefficients(const Eigen::VectorXd& samples);
Eigen::VectorXcd coefficients(const Eigen::VectorXcd& samples);

/// Inverse of coefficients().
Eigen::VectorXcd synthesize(const Eigen::VectorXcd& coeffs);

/// Signed frequency of FFT slot j for length N.
inline int frequency(int j, int N) { return j < (N + 1) / 2 ? j : j - N; }

/// Apply a real even multiplier m(|n|) to a real periodic signal. The Nyquist
/// slot of even-length grids is treated as frequency N/2.
Eigen::VectorXd apply_multiplier(const Eigen::VectorXd& samples, const std::function<double(int)>& multiplier);

/// Trigonometric interpolation of a real periodic signal onto n equispaced points.
Eigen::VectorXd resample(const Eigen::VectorXd& samples, int n);

/// Spectral derivative d/dtheta of a periodic signal (Nyquist mode dropped).
Eigen::VectorXcd derivative(const Eigen::VectorXcd& samples);

bool is_power_of_two(int n);
int next_power_of_two(int n);

}  // namespace steklov::fourier
