#pragma once

#include <cstdint>
#include <optional>

#include "friable/dickman.hpp"
#include "friable/magnitude.hpp"
#include "friable/primes.hpp"
#include "friable/saddle.hpp"

namespace friable {

struct BiasOptions {
  double epsilon = 0.01;  // (H_eps) parameter
  Budget budget = default_budget();
  const DickmanGrid* grid = nullptr;  // nullptr: dickman_grid()

  const DickmanGrid& dickman() const { return grid ? *grid : dickman_grid(); }
};

/// x >= 3 and exp((log log x)^{5/3 + eps}) <= y <= x.
bool in_h_epsilon(double log_x, double log_y, double epsilon);
bool in_h_epsilon(const SaddlePoint& sp, double epsilon);

// ---------------------------------------------------------------------------
// P(x, y, z) = P_{x,y}(n <= z)

/// D(x, y, z) / zeta(alpha, y) from exact friable sums. y = 2 uses the closed
/// form and accepts any z; otherwise z must have an integer floor within budget.
double p_exact(const SaddlePoint& sp, const Magnitude& z, const Budget& budget = default_budget());

// h with z = x y^{Theta h}
double h_of(const SaddlePoint& sp, double log_z);
// log z for a given h
double log_z_of(const SaddlePoint& sp, double h);

/// Phi(h), the Gaussian approximation.
double p_gaussian(const SaddlePoint& sp, double log_z);

/// kappa(u, w), w = log z / log y. Throws DomainError outside (H_eps).
double p_kappa(const SaddlePoint& sp, double log_z, const BiasOptions& options = {});

struct BiasReport {
  double log_x = 0.0;
  std::uint64_t y = 0;
  double log_z = 0.0;
  double u = 0.0;
  double w = 0.0;
  double h = 0.0;
  double theta = 0.0;
  double alpha = 0.0;
  std::optional<double> p_exact;
  double p_gaussian = 0.0;
  std::optional<double> p_kappa;
  // p_gaussian - p_exact and p_kappa - p_exact, when both sides exist
  std::optional<double> gaussian_residual;
  std::optional<double> kappa_residual;
  bool in_h_epsilon = false;
  bool no_oracle = false;  // exact value unavailable (budget or non-integer z)
};

BiasReport bias_report(const SaddlePoint& sp, const Magnitude& z, const BiasOptions& options = {});

// ---------------------------------------------------------------------------
// The defect Delta(x, y) = Psi_tau / (Psi D(x, y, x))

double g_fn(double v);

struct ThetaFamily {
  double g = 0.0;       // g(y / log x)
  double theta = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta0 = 0.0;
  bool in_h_epsilon = false;
  bool theta2_large_y = false;  // y > (log x)(log log 2x)^3 branch
};

ThetaFamily theta_family(const SaddlePoint& sp, double epsilon = 0.01);
ThetaFamily theta_family(double log_x, std::uint64_t y, double epsilon = 0.01);

struct DeltaReport {
  double log_x = 0.0;
  std::uint64_t y = 0;
  double u = 0.0;
  double ubar = 0.0;
  double alpha = 0.0;
  std::optional<double> delta_exact;
  std::optional<double> nu_u;
  ThetaFamily thetas;
  double theta = 0.0;     // thetas.theta
  double delta_theta = 0.0;   // exp(-theta)
  double log_band = 0.0;      // eps_y * ubar
  double eps_y = 0.0;
  double beta = 0.0;          // alpha(sqrt x, y)
  double s2 = 0.0;            // |phi_y'(beta)|
  double z_ratio = 0.0;       // log(zeta(alpha, y) / zeta(beta, y))
  double delta_drappeau = 0.0;

  // exact ingredients
  std::optional<std::uint64_t> psi;
  std::optional<std::uint64_t> psi_tau;
  std::optional<double> d;
  // sum_d R_d computed termwise, and Psi D (1 - Delta)
  std::optional<double> identity_lhs;
  std::optional<double> identity_rhs;
  bool no_oracle = false;
};

/// Asymptotic side of the report only (no_oracle = true).
DeltaReport delta_report(double log_x, std::uint64_t y, const BiasOptions& options = {});

/// Full report with the exact value; throws ResourceError over budget.
DeltaReport delta_exact(std::uint64_t x, std::uint64_t y, const BiasOptions& options = {});

double delta_theta(double log_x, std::uint64_t y, double epsilon = 0.01);

/// nu(u); throws DomainError outside (H_eps).
double delta_nu(const SaddlePoint& sp, const BiasOptions& options = {});

/// Psi_tau from Drappeau's saddle-point form divided by Psi(x,y) D(x,y,x),
/// with Psi from the saddle approximation and D replaced by zeta(alpha,y)/2.
double delta_drappeau(const SaddlePoint& sp, const SaddlePoint& half);

double z_ratio(const SaddlePoint& sp, const SaddlePoint& half);
double z_ratio(double log_x, std::uint64_t y);

/// R_d(x, y) = Psi(x, y) / d^alpha - Psi(x / d, y).
double r_d(std::uint64_t x, std::uint64_t y, std::uint64_t d, const Budget& budget = default_budget());

}  // namespace friable
