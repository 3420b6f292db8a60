#include "friable/saddle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "friable/errors.hpp"
#include "friable/summation.hpp"

namespace friable {

namespace {

// Li_{-k}(q) written in r = q / (1 - q) = 1 / (p^s - 1). All coefficients are
// positive (ordered Bell numbers), so there is no cancellation for any s > 0.
double negative_polylog(int k, double r) {
  switch (k) {
    case 0: return r;
    case 1: return r * (1.0 + r);
    case 2: return r * (1.0 + r * (3.0 + 2.0 * r));
    case 3: return r * (1.0 + r * (7.0 + r * (12.0 + 6.0 * r)));
    case 4: return r * (1.0 + r * (15.0 + r * (50.0 + r * (60.0 + 24.0 * r))));
    default: break;
  }
  throw DomainError("phi_y_k: derivative order must be in [0, 4]");
}

}  // namespace

EulerProduct::EulerProduct(std::uint64_t y, const Budget& budget)
    : y_(y), log_y_(std::log(static_cast<double>(y))) {
  if (y < 2) throw DomainError("EulerProduct: y must be >= 2, got " + std::to_string(y));
  primes_ = std::make_shared<const PrimeTable>(sieve_primes(y, budget));
}

double EulerProduct::log_zeta(double s) const {
  if (!(s > 0.0)) throw DomainError("log_zeta_y: s must be > 0");
  NeumaierSum acc;
  for (double lp : primes_->logs()) acc += -std::log1p(-std::exp(-s * lp));
  return acc.value();
}

double EulerProduct::phi(double s, int k) const {
  if (!(s > 0.0)) throw DomainError("phi_y_k: s must be > 0");
  if (k < 0 || k > 4) throw DomainError("phi_y_k: derivative order must be in [0, 4]");
  NeumaierSum acc;
  for (double lp : primes_->logs()) {
    const double r = 1.0 / std::expm1(s * lp);
    acc += std::pow(lp, k + 1) * negative_polylog(k, r);
  }
  return (k % 2 == 0 ? 1.0 : -1.0) * acc.value();
}

double log_zeta_y(double s, std::uint64_t y) { return EulerProduct(y).log_zeta(s); }

double phi_y_k(double s, std::uint64_t y, int k) { return EulerProduct(y).phi(s, k); }

SaddlePoint solve_alpha(double log_x, const EulerProduct& euler) {
  if (!(log_x > 0.0) || !std::isfinite(log_x)) {
    throw DomainError("solve_alpha: log x must be positive and finite");
  }
  const double log_y = euler.log_y();
  const double tol = 1e-13 * log_x;

  // phi is decreasing and convex; keep a bracket lo < alpha < hi.
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double s = std::log1p(static_cast<double>(euler.y()) / log_x) / log_y;
  int it = 0;
  double g = 0.0;
  bool converged = false;
  for (; it < 200; ++it) {
    g = euler.phi(s, 0) - log_x;
    if (g > 0.0) lo = s; else hi = s;
    if (std::abs(g) <= tol) {
      converged = true;
      break;
    }
    const double slope = euler.phi(s, 1);
    double next = s - g / slope;
    if (!(next > lo && next < hi)) {
      // bisection fallback, expanding the bracket while it is one-sided
      if (!std::isfinite(hi)) next = std::max(2.0 * s, 2.0);
      else if (lo == 0.0) next = 0.5 * s;
      else next = 0.5 * (lo + hi);
    }
    if (std::isfinite(hi) && hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) {
      s = 0.5 * (lo + hi);
      g = euler.phi(s, 0) - log_x;
      converged = std::abs(g) <= 1e-10 * log_x;
      break;
    }
    s = next;
  }
  if (!converged) {
    throw NumericalError("solve_alpha: no convergence for log x = " + std::to_string(log_x) +
                         ", y = " + std::to_string(euler.y()) + " (residual " +
                         std::to_string(g) + ")");
  }

  SaddlePoint sp;
  sp.log_x = log_x;
  sp.y = euler.y();
  sp.log_y = log_y;
  sp.u = log_x / log_y;
  sp.ubar = std::min(static_cast<double>(euler.y()), log_x) / log_y;
  sp.alpha = s;
  sp.log_zeta = euler.log_zeta(s);
  sp.sigma[0] = s * log_x + sp.log_zeta;
  sp.sigma[1] = -g;  // f'(alpha) = log x - phi(alpha)
  for (int j = 2; j <= 4; ++j) {
    sp.sigma[j] = (j % 2 == 1 ? 1.0 : -1.0) * euler.phi(s, j - 1);
  }
  sp.theta = std::sqrt(sp.sigma[2]) / log_y;
  sp.iterations = it;
  return sp;
}

SaddlePoint solve_alpha(double log_x, std::uint64_t y) { return solve_alpha(log_x, EulerProduct(y)); }

PsiApprox psi_saddle(const SaddlePoint& sp) {
  PsiApprox out;
  out.log_value = sp.alpha * sp.log_x + sp.log_zeta - std::log(sp.alpha) -
                  0.5 * std::log(2.0 * std::numbers::pi * sp.sigma[2]);
  if (out.log_value > std::log(std::numeric_limits<double>::max())) {
    out.overflow = true;
    out.value = std::numeric_limits<double>::infinity();
  } else {
    out.value = std::exp(out.log_value);
  }
  return out;
}

double theta_of(const SaddlePoint& sp) { return std::sqrt(sp.sigma[2]) / sp.log_y; }

double alpha_v_derivative(double v, const EulerProduct& euler) {
  if (!(v >= 1.0)) throw DomainError("alpha_v_derivative: v must be >= 1");
  const SaddlePoint sp = solve_alpha(v * euler.log_y(), euler);
  return -euler.log_y() / sp.sigma[2];
}

double alpha_v_derivative(double v, std::uint64_t y) { return alpha_v_derivative(v, EulerProduct(y)); }

}  // namespace friable
