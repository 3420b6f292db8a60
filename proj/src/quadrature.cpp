#include "friable/quadrature.hpp"

#include <algorithm>
#include <Eigen/Eigenvalues>

#include "friable/errors.hpp"

namespace friable {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

GaussLegendre::GaussLegendre(int n) {
  if (n < 2) throw DomainError("GaussLegendre: need at least two nodes");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes_ = solver.eigenvalues();
  weights_.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = nodes_[i];
    for (int step = 0; step < 3; ++step) {
      const auto [p, dp] = legendre(n, x);
      x -= p / dp;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    nodes_[i] = x;
    weights_[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

const GaussLegendre& gauss_legendre_64() {
  static const GaussLegendre rule(64);
  return rule;
}

}  // namespace friable
