#pragma once

// Quadrature rules and Chebyshev collocation helpers shared by the surface
// forms and the d-bar solver.

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

namespace steklov::quad {

template <typename Scalar>
struct Rule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
template <typename Scalar = double>
Rule<Scalar> gauss_legendre(int n) {
  using std::abs;
  using std::cos;
  Rule<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (abs(dx) < Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    // one more derivative evaluation at the converged node
    Scalar p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    const Scalar w = Scalar(2) / ((1 - x * x) * dp * dp);
    rule.nodes(i) = -x;
    rule.nodes(n - 1 - i) = x;
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  return rule;
}

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels of `n` nodes.
template <typename Scalar = double>
Rule<Scalar> gauss_legendre(int n, Scalar a, Scalar b, int panels = 1) {
  const Rule<Scalar> ref = gauss_legendre<Scalar>(n);
  Rule<Scalar> rule;
  rule.nodes.resize(n * panels);
  rule.weights.resize(n * panels);
  const Scalar h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const Scalar lo = a + p * h;
    for (int i = 0; i < n; ++i) {
      rule.nodes(p * n + i) = lo + (ref.nodes(i) + 1) * h / 2;
      rule.weights(p * n + i) = ref.weights(i) * h / 2;
    }
  }
  return rule;
}

/// Chebyshev-Gauss-Lobatto points x_j = cos(pi j / N), j = 0..N (descending).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> chebyshev_lobatto(int N) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(N + 1);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int j = 0; j <= N; ++j) {
    // sin form keeps the points exactly antisymmetric
    x(j) = std::sin(pi * Scalar(N - 2 * j) / Scalar(2 * N));
  }
  return x;
}

/// Clenshaw-Curtis weights on the Chebyshev-Lobatto points over [-1, 1].
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> clenshaw_curtis_weights(int N) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(N + 1);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int j = 0; j <= N; ++j) {
    const Scalar theta = pi * j / N;
    Scalar s = 0;
    for (int k = 0; k <= N / 2; ++k) {
      const Scalar bk = (k == 0 || 2 * k == N) ? Scalar(1) : Scalar(2);
      s += bk / (1 - Scalar(4) * k * k) * std::cos(2 * k * theta);
    }
    const Scalar cj = (j == 0 || j == N) ? Scalar(1) : Scalar(2);
    w(j) = cj / N * s;
  }
  return w;
}

/// Spectral differentiation matrix on chebyshev_lobatto(N) over [-1, 1].
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> chebyshev_diff_matrix(int N) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto x = chebyshev_lobatto<Scalar>(N);
  Mat D = Mat::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    const Scalar ci = (i == 0 || i == N) ? Scalar(2) : Scalar(1);
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      const Scalar cj = (j == 0 || j == N) ? Scalar(2) : Scalar(1);
      const Scalar sign = ((i + j) % 2 == 0) ? Scalar(1) : Scalar(-1);
      D(i, j) = ci / cj * sign / (x(i) - x(j));
    }
  }
  // negative-sum trick for the diagonal
  for (int i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
  return D;
}

/// Barycentric weights for the Chebyshev-Lobatto points.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> chebyshev_barycentric_weights(int N) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(N + 1);
  for (int j = 0; j <= N; ++j) {
    Scalar v = (j % 2 == 0) ? Scalar(1) : Scalar(-1);
    if (j == 0 || j == N) v /= 2;
    w(j) = v;
  }
  return w;
}

/// Row of Lagrange interpolation weights at x for nodes with barycentric weights w.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> barycentric_row(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& nodes,
                                                         const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& w, Scalar x) {
  const Eigen::Index n = nodes.size();
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (x == nodes(j)) {
      row.setZero();
      row(j) = 1;
      return row;
    }
  }
  Scalar denom = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    row(j) = w(j) / (x - nodes(j));
    denom += row(j);
  }
  row /= denom;
  return row;
}

}  // namespace steklov::quad
