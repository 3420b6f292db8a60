#pragma once

#include <vector>
#include <Eigen/Core>

namespace friable {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// ---------------------------------------------------------------------------
// xi(t): the positive root of e^xi = 1 + t xi for t > 1, with xi(1) = 0.

struct XiValue {
  double t = 1.0;
  double xi = 0.0;
  double xi_prime = 2.0;
};

XiValue xi(double t);
double xi_prime(double t);

// Continuation to 0 < t < 1 by the negative root of the same equation. The
// integrals defining the decay rates of the bias defect reach down to t = u/2,
// which drops below 1 whenever x < y^2.
XiValue xi_extended(double t);

// ---------------------------------------------------------------------------
// Piecewise Chebyshev representation of rho and rho_2 = rho * rho.

struct DickmanGridOptions {
  double t_max = 100.0;
  int degree = 24;
};

/// rho solves t rho'(t) = -rho(t - 1), rho = 1 on [0, 1];
/// rho_2 solves t rho_2'(t) - rho_2(t) + 2 rho_2(t - 1) = 0, rho_2(t) = t on [0, 1].
/// Each unit interval [k, k+1] carries a degree-`degree` Chebyshev polynomial
/// obtained by collocation at Lobatto points against the piece on [k-1, k].
class DickmanGrid {
 public:
  explicit DickmanGrid(DickmanGridOptions options = {});

  double t_max() const { return options_.t_max; }
  int degree() const { return options_.degree; }

  double rho(double t) const;
  double rho2(double t) const;
  double rho_prime(double t) const;
  double rho2_prime(double t) const;
  double log_rho(double t) const;
  double log_rho2(double t) const;

 private:
  struct Piece {
    Eigen::VectorXd coeffs;
    Eigen::VectorXd deriv;  // d/dt coefficients
  };

  double eval(const std::vector<Piece>& pieces, double t, bool derivative) const;
  void check_range(double t) const;

  DickmanGridOptions options_;
  std::vector<Piece> rho_;
  std::vector<Piece> rho2_;
};

// Grid with default options, built on first use.
const DickmanGrid& dickman_grid();

double rho(double t);
double rho2(double t);

// ---------------------------------------------------------------------------
// Laplace-transform layer

/// I(s) = int_0^s (e^v - 1) dv / v, by its termwise series.
double I_fn(double s);

/// rho-hat(-s) = int_0^inf rho(v) e^{vs} dv = exp(gamma + I(s)).
double rho_hat_neg(double s);
double log_rho_hat_neg(double s);

/// lambda(s, t) = int_0^s rho(v) e^{v xi(t)} dv and its logarithm.
double lambda_fn(double s, double t, const DickmanGrid& grid = dickman_grid());
double log_lambda(double s, double t, const DickmanGrid& grid = dickman_grid());

// Same integral with the exponential rate given directly.
double log_rho_laplace(double s, double rate, const DickmanGrid& grid = dickman_grid());

/// kappa(u, w) = lambda(w, u) / rho-hat(-xi(u)).
double kappa(double u, double w, const DickmanGrid& grid = dickman_grid());

/// nu(t) = rho_2(t) / (rho(t) lambda(t, t)).
double nu(double t, const DickmanGrid& grid = dickman_grid());

double normal_cdf(double h);

// ---------------------------------------------------------------------------
// Saddle-point asymptotics of rho, rho_2 and nu, for comparison.

// int_a^b xi(s) ds over a, b > 0 (extended xi below 1).
double integral_xi(double a, double b);

// sqrt(xi'(t) / 2 pi) exp(gamma - int_1^t xi)
double rho_asymptotic(double t);
// sqrt(xi'(t/2) / 4 pi) exp(2 gamma - 2 int_1^{t/2} xi)
double rho2_asymptotic(double t);
// sqrt(2 xi'(t/2) / xi'(t)) exp(-int_{t/2}^t xi'(s)(2s - t) ds)
double nu_asymptotic(double t);

}  // namespace friable
