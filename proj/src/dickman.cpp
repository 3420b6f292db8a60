#include "friable/dickman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <Eigen/LU>

#include "friable/chebyshev.hpp"
#include "friable/errors.hpp"
#include "friable/quadrature.hpp"
#include "friable/summation.hpp"

namespace friable {

// ---------------------------------------------------------------------------
// xi

namespace {

// log h(x) with h(x) = (e^x - 1) / x, h(0) = 1. h is increasing on the whole
// real line, so e^xi = 1 + t xi  <=>  log h(xi) = log t selects the nonzero root.
double log_h(double x) {
  if (std::abs(x) < 1e-3) {
    const double s = x * (1.0 / 2 + x * (1.0 / 6 + x * (1.0 / 24 + x * (1.0 / 120 + x * (1.0 / 720 + x / 5040)))));
    return std::log1p(s);
  }
  if (x > 700.0) return x + std::log1p(-std::exp(-x)) - std::log(x);
  return std::log(std::expm1(x) / x);
}

double dlog_h(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 0.5 + x / 12.0 - x * x2 / 720.0 + x * x2 * x2 / 30240.0;
  }
  return 1.0 / -std::expm1(-x) - 1.0 / x;
}

XiValue solve_xi(double t) {
  XiValue out;
  out.t = t;
  if (t == 1.0) return out;  // xi(1) = 0, xi'(1) = 2
  const double log_t = std::log(t);
  double lo, hi, x;
  if (t > 1.0) {
    lo = 0.0;
    hi = 2.0 * std::log(2.0 * t) + 2.0;
    if (t - 1.0 < 1e-6) x = 2.0 * (t - 1.0);
    else if (t >= std::numbers::e) x = log_t + std::log(log_t);
    else x = 0.5 * (lo + hi);
  } else {
    lo = -1.0 / t - 1.0;
    hi = 0.0;
    x = (1.0 - t < 1e-6) ? 2.0 * (t - 1.0) : 0.5 * (lo + hi);
  }
  for (int it = 0; it < 200; ++it) {
    const double f = log_h(x) - log_t;
    if (f > 0.0) hi = x; else lo = x;
    if (f == 0.0) break;
    double next = x - f / dlog_h(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 1e-16 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-300) break;
  }
  out.xi = x;
  out.xi_prime = 1.0 / (t * dlog_h(x));
  return out;
}

}  // namespace

XiValue xi(double t) {
  if (!(t >= 1.0)) throw DomainError("xi: t must be >= 1, got " + std::to_string(t));
  if (std::isinf(t)) throw DomainError("xi: t must be finite");
  return solve_xi(t);
}

double xi_prime(double t) { return xi(t).xi_prime; }

XiValue xi_extended(double t) {
  if (!(t > 0.0) || std::isinf(t)) throw DomainError("xi_extended: t must be positive and finite");
  return solve_xi(t);
}

// ---------------------------------------------------------------------------
// DickmanGrid

DickmanGrid::DickmanGrid(DickmanGridOptions options) : options_(options) {
  if (!(options.t_max >= 1.0)) throw DomainError("DickmanGrid: t_max must be >= 1");
  if (options.degree < 4) throw DomainError("DickmanGrid: degree must be >= 4");
  const int n = options.degree;
  const int pieces = static_cast<int>(std::ceil(options.t_max));
  const Eigen::VectorXd x = lobatto_points<double>(n);
  const IntegrationMatrices<double> quad = integration_matrices<double>(n);

  auto make_piece = [&](const Eigen::VectorXd& values) {
    Piece p;
    p.coeffs = chebyshev_coefficients<double>(values);
    p.deriv = 2.0 * chebyshev_derivative<double>(p.coeffs);  // d/dt = 2 d/dx
    return p;
  };

  // Both functions satisfy t f(t) = c int_{t-1}^{t} f(v) dv for t >= 1 (c = 1
  // for rho, c = 2 for rho_2), the integrated form of their delay equations.
  // The kernel is positive, so relative accuracy is preserved as f decays;
  // stepping the differential form directly loses it within a few intervals.
  //
  // Node j of [k, k+1] sits exactly one unit right of node j of [k-1, k].
  // Node 0 is the right endpoint and node n the left one.
  auto step = [&](const Eigen::VectorXd& prev, double c, int k) {
    const Eigen::VectorXd t = (x.array() + 1.0) * 0.5 + k;
    // int_{t_j - 1}^{k} prev + int_{k}^{t_j} now, each scaled by 1/2 for dt = dx / 2
    Eigen::MatrixXd a = t.asDiagonal();
    a -= 0.5 * c * quad.left;
    const Eigen::VectorXd rhs = 0.5 * c * (quad.right * prev);
    return Eigen::VectorXd(a.partialPivLu().solve(rhs));
  };

  Eigen::VectorXd rho_prev = Eigen::VectorXd::Ones(n + 1);
  Eigen::VectorXd rho2_prev = (x.array() + 1.0) * 0.5;
  rho_.push_back(make_piece(rho_prev));
  rho2_.push_back(make_piece(rho2_prev));
  for (int k = 1; k < pieces; ++k) {
    Eigen::VectorXd rho_now = step(rho_prev, 1.0, k);
    Eigen::VectorXd rho2_now = step(rho2_prev, 2.0, k);
    rho_.push_back(make_piece(rho_now));
    rho2_.push_back(make_piece(rho2_now));
    rho_prev = std::move(rho_now);
    rho2_prev = std::move(rho2_now);
  }
}

void DickmanGrid::check_range(double t) const {
  if (t > options_.t_max) {
    throw DomainError("Dickman grid covers [0, " + std::to_string(options_.t_max) + "]; t = " +
                      std::to_string(t) + " needs a larger t_max");
  }
  if (std::isnan(t)) throw DomainError("Dickman grid: t is NaN");
}

double DickmanGrid::eval(const std::vector<Piece>& pieces, double t, bool derivative) const {
  const auto k = std::min(static_cast<std::size_t>(std::floor(t)), pieces.size() - 1);
  const double x = 2.0 * (t - static_cast<double>(k)) - 1.0;
  const Piece& p = pieces[k];
  return chebyshev_eval(derivative ? p.deriv : p.coeffs, x);
}

double DickmanGrid::rho(double t) const {
  check_range(t);
  if (t < 0.0) return 0.0;
  if (t <= 1.0) return 1.0;
  return eval(rho_, t, false);
}

double DickmanGrid::rho2(double t) const {
  check_range(t);
  if (t < 0.0) return 0.0;
  if (t <= 1.0) return t;
  return eval(rho2_, t, false);
}

double DickmanGrid::rho_prime(double t) const {
  check_range(t);
  if (t < 1.0) return 0.0;
  return eval(rho_, t, true);
}

double DickmanGrid::rho2_prime(double t) const {
  check_range(t);
  if (t < 0.0) return 0.0;
  if (t < 1.0) return 1.0;
  return eval(rho2_, t, true);
}

double DickmanGrid::log_rho(double t) const {
  const double v = rho(t);
  return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

double DickmanGrid::log_rho2(double t) const {
  const double v = rho2(t);
  return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

const DickmanGrid& dickman_grid() {
  static const DickmanGrid grid;
  return grid;
}

double rho(double t) { return dickman_grid().rho(t); }
double rho2(double t) { return dickman_grid().rho2(t); }

// ---------------------------------------------------------------------------
// Laplace layer

double I_fn(double s) {
  if (!(s >= 0.0)) throw DomainError("I_fn: s must be >= 0");
  double term = 1.0;  // s^k / k!
  double sum = 0.0;
  for (int k = 1; k < 10000; ++k) {
    term *= s / k;
    const double add = term / k;
    sum += add;
    if (add <= 1e-17 * sum && k > s) break;
  }
  return sum;
}

double log_rho_hat_neg(double s) { return kEulerGamma + I_fn(s); }

double rho_hat_neg(double s) { return std::exp(log_rho_hat_neg(s)); }

double log_rho_laplace(double s, double rate, const DickmanGrid& grid) {
  if (!(s >= 0.0)) throw DomainError("lambda: s must be >= 0");
  if (s > grid.t_max()) {
    throw DomainError("lambda: upper limit " + std::to_string(s) + " beyond Dickman grid t_max " +
                      std::to_string(grid.t_max()));
  }
  const GaussLegendre& gl = gauss_legendre_64();
  LogSumExp acc;
  for (double lo = 0.0; lo < s; lo += 1.0) {
    const double hi = std::min(lo + 1.0, s);
    const double half = 0.5 * (hi - lo);
    const double mid = lo + half;
    for (int i = 0; i < gl.size(); ++i) {
      const double v = mid + half * gl.nodes()[i];
      acc.add(grid.log_rho(v) + v * rate, half * gl.weights()[i]);
    }
  }
  return acc.log_value();
}

double log_lambda(double s, double t, const DickmanGrid& grid) {
  return log_rho_laplace(s, xi(t).xi, grid);
}

double lambda_fn(double s, double t, const DickmanGrid& grid) { return std::exp(log_lambda(s, t, grid)); }

double kappa(double u, double w, const DickmanGrid& grid) {
  if (!(u >= 1.0)) throw DomainError("kappa: u must be >= 1");
  if (!(w >= 0.0)) throw DomainError("kappa: w must be >= 0");
  const double rate = xi(u).xi;
  return std::exp(log_rho_laplace(w, rate, grid) - log_rho_hat_neg(rate));
}

double nu(double t, const DickmanGrid& grid) {
  if (!(t >= 1.0)) throw DomainError("nu: t must be >= 1");
  return std::exp(grid.log_rho2(t) - grid.log_rho(t) - log_lambda(t, t, grid));
}

double normal_cdf(double h) { return 0.5 * std::erfc(-h / std::numbers::sqrt2); }

// ---------------------------------------------------------------------------
// asymptotic forms

double integral_xi(double a, double b) {
  return integrate_unit_panels([](double s) { return xi_extended(s).xi; }, a, b);
}

double rho_asymptotic(double t) {
  const XiValue v = xi(t);
  return std::sqrt(v.xi_prime / (2.0 * std::numbers::pi)) * std::exp(kEulerGamma - integral_xi(1.0, t));
}

double rho2_asymptotic(double t) {
  const XiValue v = xi_extended(0.5 * t);
  return std::sqrt(v.xi_prime / (4.0 * std::numbers::pi)) *
         std::exp(2.0 * kEulerGamma - 2.0 * integral_xi(1.0, 0.5 * t));
}

double nu_asymptotic(double t) {
  const double half = xi_extended(0.5 * t).xi_prime;
  const double full = xi(t).xi_prime;
  const double tilt = integrate_unit_panels(
      [t](double s) { return xi_extended(s).xi_prime * (2.0 * s - t); }, 0.5 * t, t);
  return std::sqrt(2.0 * half / full) * std::exp(-tilt);
}

}  // namespace friable
