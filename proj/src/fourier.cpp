#include "steklov/fourier.hpp"

#include <cstdlib>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace steklov::fourier {

namespace {

std::vector<std::complex<double>> to_std(const Eigen::VectorXcd& v) {
  return std::vector<std::complex<double>>(v.data(), v.data() + v.size());
}

}  // namespace

Eigen::VectorXcd coefficients(const Eigen::VectorXcd& samples) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.fwd(out, to_std(samples));
  Eigen::VectorXcd c = Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
  return c / static_cast<double>(samples.size());
}

Eigen::VectorXcd coefficients(const Eigen::VectorXd& samples) {
  return coefficients(Eigen::VectorXcd(samples.cast<std::complex<double>>()));
}

Eigen::VectorXcd synthesize(const Eigen::VectorXcd& coeffs) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<std::complex<double>> out;
  fft.inv(out, to_std(coeffs));
  return Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Eigen::VectorXd apply_multiplier(const Eigen::VectorXd& samples, const std::function<double(int)>& multiplier) {
  const int N = static_cast<int>(samples.size());
  Eigen::VectorXcd c = coefficients(samples);
  for (int j = 0; j < N; ++j) c(j) *= multiplier(std::abs(frequency(j, N)));
  return synthesize(c).real();
}

Eigen::VectorXd resample(const Eigen::VectorXd& samples, int n) {
  const int N = static_cast<int>(samples.size());
  if (n == N) return samples;
  const Eigen::VectorXcd c = coefficients(samples);
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n);
  const int kmax = std::min(N, n) / 2;
  for (int j = 0; j < N; ++j) {
    const int f = frequency(j, N);
    if (std::abs(f) > kmax) continue;
    std::complex<double> v = c(j);
    // split an unmatched Nyquist coefficient symmetrically
    if (std::abs(f) == kmax && (std::min(N, n) % 2 == 0)) {
      if (N < n) {
        d(kmax) += v / 2.0;
        d(n - kmax) += v / 2.0;
        continue;
      }
      if (f == -kmax) continue;
      // N > n: fold both +-kmax into the target Nyquist slot
      v = c(j) + c(N - j);
      d(kmax) += v;
      continue;
    }
    d(f >= 0 ? f : n + f) += v;
  }
  return synthesize(d).real();
}

Eigen::VectorXcd derivative(const Eigen::VectorXcd& samples) {
  const int N = static_cast<int>(samples.size());
  Eigen::VectorXcd c = coefficients(samples);
  for (int j = 0; j < N; ++j) {
    const int f = frequency(j, N);
    c(j) *= (N % 2 == 0 && j == N / 2) ? std::complex<double>(0.0) : std::complex<double>(0.0, f);
  }
  return synthesize(c);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int next_power_of_two(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace steklov::fourier
