#pragma once

#include <functional>
#include <string>
#include <vector>

namespace friable::acceptance {

/// Calibrated constants for the asymptotic checks. The functional forms are
/// fixed; only these multipliers are configuration. Defaults are the values
/// the suites are specified with; load_tolerances() overrides any subset.
struct Tolerances {
  double psi_saddle_c = 5.0;         // |Psi_saddle / Psi - 1| <= c (1/u + log y / y)
  double gaussian_k = 1.5;          // |P - Phi(h)| <= k ubar^{-1/3}
  double limit_gamma = 0.05;         // |P(x,x,x) - e^{-gamma}|
  double limit_two = 0.02;           // |P(x,2,x) - (1 - 1/e)|
  double kappa_floor = 0.1;          // c <= kappa(u,u) <= 1 - c
  double kappa_gauss_c = 2.0;        // |kappa(u, u + s/sqrt(xi')) - Phi(s)| <= c / u
  double nu_c = 3.0;                 // |Delta / nu(u) - 1| <= c log(u+1) / log y
  double theta_band_c = 3.0;         // |log Delta + theta| <= c (1 + eps_y ubar)
  double sampler_sigmas = 4.0;       // z-score limit for sampler moments
  double identity_rel = 1e-9;        // sum_d R_d = Psi D (1 - Delta)
};

Tolerances load_tolerances(const std::string& json_path, Tolerances base = {});

struct CriterionResult {
  int id = 0;
  std::string suite;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string suite;
  std::string title;
  std::function<CriterionResult(const Tolerances&)> run;
};

const std::vector<Criterion>& criteria();

// Suite names accepted by run_suite(): "all" and every criterion's suite tag.
std::vector<std::string> suite_names();

/// Runs every criterion of `suite`; a criterion that throws is reported as
/// failed with the exception message. Throws std::invalid_argument for an
/// unknown suite name.
std::vector<CriterionResult> run_suite(const std::string& suite, const Tolerances& tol = {},
                                       const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result(const CriterionResult& r);

}  // namespace friable::acceptance
