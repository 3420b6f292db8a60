#include "friable/bias.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "friable/errors.hpp"
#include "friable/quadrature.hpp"
#include "friable/summation.hpp"

namespace friable {

bool in_h_epsilon(double log_x, double log_y, double epsilon) {
  if (log_x < std::log(3.0) || log_y > log_x) return false;
  return std::pow(std::log(log_x), 5.0 / 3.0 + epsilon) <= log_y;
}

bool in_h_epsilon(const SaddlePoint& sp, double epsilon) { return in_h_epsilon(sp.log_x, sp.log_y, epsilon); }

// ---------------------------------------------------------------------------

double p_exact(const SaddlePoint& sp, const Magnitude& z, const Budget& budget) {
  if (sp.y == 2) {
    // 1 - 2^{-alpha (K + 1)}, K = floor(log2 z)
    if (z.log() < 0.0) return 0.0;
    const double k = std::floor(z.log() / std::numbers::ln2 * (1.0 + 4e-15) + 1e-12);
    return -std::expm1(-(k + 1.0) * sp.alpha * std::numbers::ln2);
  }
  const auto floor_z = z.floor();
  if (!floor_z) {
    throw ResourceError("p_exact: z = exp(" + std::to_string(z.log()) +
                        ") is beyond exact enumeration for y > 2");
  }
  if (*floor_z == 0) return 0.0;
  return d_exact(*floor_z, sp.y, sp.alpha, budget) * std::exp(-sp.log_zeta);
}

double h_of(const SaddlePoint& sp, double log_z) { return (log_z - sp.log_x) / (sp.theta * sp.log_y); }

double log_z_of(const SaddlePoint& sp, double h) { return sp.log_x + h * sp.theta * sp.log_y; }

double p_gaussian(const SaddlePoint& sp, double log_z) { return normal_cdf(h_of(sp, log_z)); }

double p_kappa(const SaddlePoint& sp, double log_z, const BiasOptions& options) {
  if (!in_h_epsilon(sp, options.epsilon)) {
    throw DomainError("p_kappa: (x, y) = (exp(" + std::to_string(sp.log_x) + "), " +
                      std::to_string(sp.y) + ") lies outside the domain (H_eps), eps = " +
                      std::to_string(options.epsilon));
  }
  const double w = log_z / sp.log_y;
  if (w <= 0.0) return 0.0;
  return kappa(sp.u, w, options.dickman());
}

BiasReport bias_report(const SaddlePoint& sp, const Magnitude& z, const BiasOptions& options) {
  BiasReport r;
  r.log_x = sp.log_x;
  r.y = sp.y;
  r.log_z = z.log();
  r.u = sp.u;
  r.w = z.log() / sp.log_y;
  r.theta = sp.theta;
  r.alpha = sp.alpha;
  r.h = h_of(sp, z.log());
  r.p_gaussian = normal_cdf(r.h);
  r.in_h_epsilon = in_h_epsilon(sp, options.epsilon);
  try {
    r.p_exact = p_exact(sp, z, options.budget);
  } catch (const ResourceError&) {
    r.no_oracle = true;
  }
  if (r.in_h_epsilon && r.w <= options.dickman().t_max()) {
    r.p_kappa = p_kappa(sp, z.log(), options);
  }
  if (r.p_exact) {
    r.gaussian_residual = r.p_gaussian - *r.p_exact;
    if (r.p_kappa) r.kappa_residual = *r.p_kappa - *r.p_exact;
  }
  return r;
}

// ---------------------------------------------------------------------------

double g_fn(double v) {
  if (!(v >= 0.0)) throw DomainError("g: v must be >= 0");
  return v * std::log(4.0) - (1.0 + 2.0 * v) * std::log1p(v / (1.0 + v));
}

ThetaFamily theta_family(const SaddlePoint& sp, double epsilon) {
  ThetaFamily f;
  const double log_x = sp.log_x;
  const double y = static_cast<double>(sp.y);
  const double u = sp.u;
  f.in_h_epsilon = in_h_epsilon(sp, epsilon);
  f.g = g_fn(y / log_x);

  const double xi_u = xi(u).xi;
  if (f.in_h_epsilon) {
    f.theta = 2.0 * integrate_unit_panels([xi_u](double t) { return xi_u - xi_extended(t).xi; }, 0.5 * u, u);
    f.theta1 = xi_u - xi_extended(0.5 * u).xi;
  } else {
    f.theta = u * f.g;
    f.theta1 = std::log1p(y / (y + log_x));
  }

  const double loglog2x = std::log(std::log(2.0) + log_x);
  f.theta2_large_y = y > log_x * loglog2x * loglog2x * loglog2x;
  if (f.theta2_large_y) {
    f.theta2 = 2.0 * integrate_unit_panels([](double t) { return t * xi_extended(t).xi_prime; }, 0.5 * u, u);
  } else {
    f.theta2 = 2.0 * y / sp.log_y * std::log1p(log_x / (2.0 * y + log_x));
  }
  f.theta0 = f.theta2 - u * f.theta1;
  return f;
}

ThetaFamily theta_family(double log_x, std::uint64_t y, double epsilon) {
  return theta_family(solve_alpha(log_x, y), epsilon);
}

double delta_theta(double log_x, std::uint64_t y, double epsilon) {
  return std::exp(-theta_family(log_x, y, epsilon).theta);
}

double delta_nu(const SaddlePoint& sp, const BiasOptions& options) {
  if (!in_h_epsilon(sp, options.epsilon)) {
    throw DomainError("delta_nu: (x, y) lies outside the domain (H_eps)");
  }
  return nu(sp.u, options.dickman());
}

double z_ratio(const SaddlePoint& sp, const SaddlePoint& half) { return sp.log_zeta - half.log_zeta; }

double z_ratio(double log_x, std::uint64_t y) {
  const EulerProduct euler(y);
  return z_ratio(solve_alpha(log_x, euler), solve_alpha(0.5 * log_x, euler));
}

double delta_drappeau(const SaddlePoint& sp, const SaddlePoint& half) {
  const double beta = half.alpha;
  const double s2 = half.sigma[2];
  // log of x^beta zeta(beta)^2 / (2 beta sqrt(pi s2))
  const double log_psi_tau = beta * sp.log_x + 2.0 * half.log_zeta - std::log(2.0 * beta) -
                             0.5 * std::log(std::numbers::pi * s2);
  const double log_psi = psi_saddle(sp).log_value;
  const double log_d = sp.log_zeta + std::log(0.5);
  return std::exp(log_psi_tau - log_psi - log_d);
}

DeltaReport delta_report(double log_x, std::uint64_t y, const BiasOptions& options) {
  const EulerProduct euler(y, options.budget);
  const SaddlePoint sp = solve_alpha(log_x, euler);
  const SaddlePoint half = solve_alpha(0.5 * log_x, euler);
  DeltaReport r;
  r.log_x = log_x;
  r.y = y;
  r.u = sp.u;
  r.ubar = sp.ubar;
  r.alpha = sp.alpha;
  if (sp.u >= 1.0 && sp.u <= options.dickman().t_max()) r.nu_u = nu(sp.u, options.dickman());
  r.thetas = theta_family(sp, options.epsilon);
  r.theta = r.thetas.theta;
  r.delta_theta = std::exp(-r.theta);
  r.eps_y = 1.0 / std::sqrt(sp.log_y);
  r.log_band = r.eps_y * sp.ubar;
  r.beta = half.alpha;
  r.s2 = half.sigma[2];
  r.z_ratio = z_ratio(sp, half);
  r.delta_drappeau = delta_drappeau(sp, half);
  r.no_oracle = true;
  return r;
}

DeltaReport delta_exact(std::uint64_t x, std::uint64_t y, const BiasOptions& options) {
  if (y < 2 || x < y) throw DomainError("delta_exact: need x >= y >= 2");
  DeltaReport r = delta_report(std::log(static_cast<double>(x)), y, options);
  const std::uint64_t psi = psi_exact(x, y, options.budget);
  const std::uint64_t psi_tau = psi_tau_exact(x, y, options.budget);
  const double d = d_exact(x, y, r.alpha, options.budget);
  const double psi_d = static_cast<double>(psi) * d;
  r.psi = psi;
  r.psi_tau = psi_tau;
  r.d = d;
  r.delta_exact = static_cast<double>(psi_tau) / psi_d;
  r.no_oracle = false;

  if (x <= options.budget.max_sieve) {
    const PsiTable table(x, y, options.budget);
    NeumaierSum lhs;
    const double psi_real = static_cast<double>(psi);
    FriableEnumeration divisors(x, y, options.budget);
    divisors.for_each([&](const FriableTerm& t) {
      lhs += psi_real * std::pow(static_cast<double>(t.n), -r.alpha) - static_cast<double>(table(x / t.n));
    });
    r.identity_lhs = lhs.value();
    r.identity_rhs = psi_d * (1.0 - *r.delta_exact);
  }
  return r;
}

double r_d(std::uint64_t x, std::uint64_t y, std::uint64_t d, const Budget& budget) {
  if (x < 2 || y < 2) throw DomainError("r_d: need x >= 2 and y >= 2");
  if (d == 0 || d > x) throw DomainError("r_d: need 1 <= d <= x");
  if (!is_friable(d, y)) {
    throw DomainError("r_d: d = " + std::to_string(d) + " is not " + std::to_string(y) + "-friable");
  }
  const double alpha = solve_alpha(std::log(static_cast<double>(x)), y).alpha;
  return static_cast<double>(psi_exact(x, y, budget)) * std::pow(static_cast<double>(d), -alpha) -
         static_cast<double>(psi_exact(x / d, y, budget));
}

}  // namespace friable
