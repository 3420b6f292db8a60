#pragma once

#include <cmath>
#include <numbers>
#include <Eigen/Core>

namespace friable {

/// Chebyshev-Lobatto points x_j = cos(pi j / n), j = 0..n, on [-1, 1].
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lobatto_points(int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(n + 1);
  for (int j = 0; j <= n; ++j) x[j] = std::cos(std::numbers::pi_v<Scalar> * j / n);
  return x;
}

/// Spectral differentiation matrix on the Lobatto points (d/dx on [-1, 1]).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> differentiation_matrix(int n) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto x = lobatto_points<Scalar>(n);
  Matrix d = Matrix::Zero(n + 1, n + 1);
  auto c = [n](int j) { return (j == 0 || j == n ? Scalar(2) : Scalar(1)) * ((j % 2) ? -1 : 1); };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i != j) d(i, j) = c(i) / c(j) / (x[i] - x[j]);
    }
  }
  // negative-sum trick for the diagonal
  for (int i = 0; i <= n; ++i) d(i, i) = -d.row(i).sum();
  return d;
}

/// Chebyshev coefficients of the interpolant through values at lobatto_points(n).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> chebyshev_coefficients(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& values) {
  const int n = static_cast<int>(values.size()) - 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(n + 1);
  for (int k = 0; k <= n; ++k) {
    Scalar s = 0;
    for (int j = 0; j <= n; ++j) {
      const Scalar w = (j == 0 || j == n) ? Scalar(0.5) : Scalar(1);
      s += w * values[j] * std::cos(std::numbers::pi_v<Scalar> * j * k / n);
    }
    c[k] = s * Scalar(2) / n;
  }
  c[0] *= Scalar(0.5);
  c[n] *= Scalar(0.5);
  return c;
}

/// Clenshaw evaluation of sum_k c_k T_k(x).
template <typename Derived>
typename Derived::Scalar chebyshev_eval(const Eigen::MatrixBase<Derived>& c, typename Derived::Scalar x) {
  using Scalar = typename Derived::Scalar;
  Scalar b1 = 0;
  Scalar b2 = 0;
  for (Eigen::Index k = c.size() - 1; k >= 1; --k) {
    const Scalar b0 = 2 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

/// Coefficients of the derivative series (d/dx).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> chebyshev_derivative(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c) {
  const Eigen::Index n = c.size() - 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(std::max<Eigen::Index>(n, 1));
  if (n == 0) return d;
  // d_{k-1} = d_{k+1} + 2 k c_k, with d_0 halved at the end
  Scalar next2 = 0, next1 = 0;
  for (Eigen::Index k = n; k >= 1; --k) {
    const Scalar dk1 = next2 + 2 * Scalar(k) * c[k];
    d[k - 1] = dk1;
    next2 = next1;
    next1 = dk1;
  }
  d[0] *= Scalar(0.5);
  return d;
}

/// Coefficients (length n + 2) of an antiderivative of sum_k c_k T_k.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> chebyshev_antiderivative(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c) {
  const Eigen::Index n = c.size() - 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n + 2);
  auto coeff = [&](Eigen::Index k) { return k <= n ? c[k] : Scalar(0); };
  for (Eigen::Index k = 1; k <= n + 1; ++k) {
    const Scalar prev = (k == 1 ? Scalar(2) : Scalar(1)) * coeff(k - 1);
    b[k] = (prev - coeff(k + 1)) / (2 * Scalar(k));
  }
  return b;
}

/// Integration matrices on the Lobatto points: (left * v)_j = int_{-1}^{x_j} p
/// and (right * v)_j = int_{x_j}^{1} p, where p interpolates the values v.
template <typename Scalar = double>
struct IntegrationMatrices {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> left;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> right;
};

template <typename Scalar = double>
IntegrationMatrices<Scalar> integration_matrices(int n) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Vector x = lobatto_points<Scalar>(n);
  IntegrationMatrices<Scalar> m;
  m.left.resize(n + 1, n + 1);
  m.right.resize(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    Vector e = Vector::Zero(n + 1);
    e[i] = 1;
    const Vector b = chebyshev_antiderivative<Scalar>(chebyshev_coefficients<Scalar>(e));
    const Scalar at_lo = chebyshev_eval(b, Scalar(-1));
    const Scalar at_hi = chebyshev_eval(b, Scalar(1));
    for (int j = 0; j <= n; ++j) {
      const Scalar f = chebyshev_eval(b, x[j]);
      m.left(j, i) = f - at_lo;
      m.right(j, i) = at_hi - f;
    }
  }
  return m;
}

}  // namespace friable
