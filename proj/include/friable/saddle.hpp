#pragma once

#include <cstdint>
#include <memory>

#include "friable/primes.hpp"

namespace friable {

/// Sums over the primes p <= y of the partial Euler product
///   zeta(s, y) = prod_{p <= y} (1 - p^{-s})^{-1}
/// and of phi_y(s) = -zeta'(s, y) / zeta(s, y) with its derivatives.
/// Holds its prime table; cheap to share between threads once built.
class EulerProduct {
 public:
  explicit EulerProduct(std::uint64_t y, const Budget& budget = default_budget());

  std::uint64_t y() const { return y_; }
  double log_y() const { return log_y_; }
  const PrimeTable& primes() const { return *primes_; }

  double log_zeta(double s) const;

  // k-th derivative of phi_y at s, 0 <= k <= 4.
  double phi(double s, int k = 0) const;

 private:
  std::uint64_t y_;
  double log_y_;
  std::shared_ptr<const PrimeTable> primes_;
};

double log_zeta_y(double s, std::uint64_t y);
double phi_y_k(double s, std::uint64_t y, int k);

/// Saddle point alpha(x, y) of x^s zeta(s, y), carried with the derived
/// quantities the rest of the library needs. sigma[j] = (-1)^j f^{(j)}(alpha)
/// with f(s) = s log x + log zeta(s, y); sigma[1] is the solver residual.
struct SaddlePoint {
  double log_x = 0.0;
  std::uint64_t y = 0;
  double log_y = 0.0;
  double u = 0.0;
  double ubar = 0.0;
  double alpha = 0.0;
  double log_zeta = 0.0;
  double sigma[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
  double theta = 0.0;
  int iterations = 0;

  double sigma2() const { return sigma[2]; }
};

SaddlePoint solve_alpha(double log_x, const EulerProduct& euler);
SaddlePoint solve_alpha(double log_x, std::uint64_t y);

// The saddle-point approximation to Psi(x, y), with its logarithm.
struct PsiApprox {
  double log_value = 0.0;
  double value = 0.0;
  bool overflow = false;
};

PsiApprox psi_saddle(const SaddlePoint& sp);

// Theta = sqrt(sigma_2) / log y.
double theta_of(const SaddlePoint& sp);

/// d/dv alpha(y^v, y) = -log y / sigma_2 at x = y^v.
double alpha_v_derivative(double v, const EulerProduct& euler);
double alpha_v_derivative(double v, std::uint64_t y);

}  // namespace friable
