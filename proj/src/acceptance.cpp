#include "friable/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "friable/bias.hpp"
#include "friable/dickman.hpp"
#include "friable/primes.hpp"
#include "friable/quadrature.hpp"
#include "friable/saddle.hpp"
#include "friable/sampler.hpp"

namespace friable::acceptance {

Tolerances load_tolerances(const std::string& json_path, Tolerances base) {
  std::ifstream in(json_path);
  if (!in) throw std::invalid_argument("cannot open tolerance file " + json_path);
  const nlohmann::json j = nlohmann::json::parse(in);
  auto take = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  take("psi_saddle_c", base.psi_saddle_c);
  take("gaussian_k", base.gaussian_k);
  take("limit_gamma", base.limit_gamma);
  take("limit_two", base.limit_two);
  take("kappa_floor", base.kappa_floor);
  take("kappa_gauss_c", base.kappa_gauss_c);
  take("nu_c", base.nu_c);
  take("theta_band_c", base.theta_band_c);
  take("sampler_sigmas", base.sampler_sigmas);
  take("identity_rel", base.identity_rel);
  return base;
}

namespace {

// ---------------------------------------------------------------------------
// Oracles. These deliberately avoid the code paths they check.

// Psi(x, p) for every x <= n_max and every prime level p, from a largest
// prime factor sieve: counts n <= x with lpf(n) <= p.
class NaiveLevelOracle {
 public:
  explicit NaiveLevelOracle(std::uint32_t n_max)
      : lpf_(largest_prime_factors(n_max)), counts_(static_cast<std::size_t>(n_max) + 1, 0) {
    for (std::size_t x = 1; x < counts_.size(); ++x) counts_[x] = 1;  // n = 1
  }
  // Advance to prime level p (levels must be visited in increasing order).
  void admit(std::uint64_t p) {
    std::uint32_t running = 0;
    for (std::size_t x = 1; x < counts_.size(); ++x) {
      if (lpf_[x] == p) ++running;
      counts_[x] += running;
    }
  }
  std::span<const std::uint32_t> counts() const { return counts_; }
  std::uint64_t count(std::uint64_t x, std::uint64_t y) const {
    std::uint64_t c = 0;
    for (std::uint64_t n = 1; n <= x; ++n) c += lpf_[n] <= y;
    return c;
  }

 private:
  std::vector<std::uint32_t> lpf_;
  std::vector<std::uint32_t> counts_;
};

// phi_y(s) summed directly from its defining series.
double phi_direct(const PrimeTable& primes, double s) {
  double sum = 0.0;
  for (auto p : primes.primes()) sum += std::log(static_cast<double>(p)) / (std::pow(static_cast<double>(p), s) - 1.0);
  return sum;
}

double bisection_alpha(const PrimeTable& primes, double log_x) {
  double lo = 1e-12;
  double hi = 2.0;
  while (phi_direct(primes, hi) > log_x) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (phi_direct(primes, mid) > log_x) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// int_0^t rho(v) rho(t - v) dv with panels broken at every kink of either factor.
double convolution_oracle(const DickmanGrid& grid, double t) {
  static const GaussLegendre rule(48);
  std::vector<double> breaks{0.0, t};
  for (double k = 1.0; k < t; k += 1.0) {
    breaks.push_back(k);
    breaks.push_back(t - k);
  }
  std::sort(breaks.begin(), breaks.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] - breaks[i] < 1e-14) continue;
    sum += rule.integrate([&](double v) { return grid.rho(v) * grid.rho(t - v); }, breaks[i], breaks[i + 1]);
  }
  return sum;
}

double laplace_oracle(const DickmanGrid& grid, double upper, double rate) {
  static const GaussLegendre rule(40);
  double sum = 0.0;
  for (double lo = 0.0; lo < upper; lo += 0.5) {
    sum += rule.integrate([&](double v) { return grid.rho(v) * std::exp(v * rate); }, lo, std::min(lo + 0.5, upper));
  }
  return sum;
}

// ---------------------------------------------------------------------------

struct Check {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond) { ok = ok && cond; }
};

CriterionResult finish(int id, Check& c) {
  CriterionResult r;
  r.id = id;
  r.passed = c.ok;
  r.detail = c.detail.str();
  return r;
}

struct DeskPoint {
  std::uint64_t x;
  std::uint64_t y;
};

constexpr DeskPoint kSaddleGrid[] = {{10'000, 30}, {100'000, 50}, {1'000'000, 100}, {1'000'000, 1'000}};

CriterionResult c1_counting(const Tolerances&) {
  Check c;
  constexpr std::uint32_t kMax = 100'000;
  NaiveLevelOracle oracle(kMax);
  std::uint64_t compared = 0;
  std::uint64_t mismatches = 0;
  psi_levels(kMax, [&](std::uint64_t p, std::span<const std::uint32_t> psi) {
    if (p > 1) oracle.admit(p);
    const auto expect = oracle.counts();
    for (std::size_t x = 1; x <= kMax; ++x) {
      mismatches += psi[x] != expect[x];
    }
    compared += kMax;
  });
  // psi_exact itself: every pair with x <= 400 and a seeded sample of the rest
  const PrimeTable primes = sieve_primes(kMax);
  const auto lpf = largest_prime_factors(kMax);
  std::vector<std::uint32_t> prefix_by_y;
  std::uint64_t direct = 0;
  std::uint64_t direct_bad = 0;
  auto naive = [&](std::uint64_t x, std::uint64_t y) {
    std::uint64_t n_ok = 0;
    for (std::uint64_t n = 1; n <= x; ++n) n_ok += lpf[n] <= y;
    return n_ok;
  };
  for (std::uint64_t x = 1; x <= 400; ++x) {
    for (std::uint64_t y = 2; y <= x; ++y) {
      direct_bad += psi_exact(x, y, primes) != naive(x, y);
      ++direct;
    }
  }
  std::mt19937_64 gen(20240611);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t x = std::uniform_int_distribution<std::uint64_t>(2, kMax)(gen);
    const std::uint64_t y = std::uniform_int_distribution<std::uint64_t>(2, x)(gen);
    direct_bad += psi_exact(x, y, primes) != naive(x, y);
    ++direct;
  }
  c.require(mismatches == 0 && direct_bad == 0);
  c.detail << "recurrence levels: " << compared << " (x, p) cells, " << mismatches
           << " mismatches; psi_exact calls: " << direct << ", " << direct_bad << " mismatches";
  return finish(1, c);
}

CriterionResult c2_dickman(const Tolerances&) {
  Check c;
  const DickmanGrid& grid = dickman_grid();
  double rho_err = 0.0;
  double rho2_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = 1.0 + i / 99.0;
    rho_err = std::max(rho_err, std::abs(grid.rho(t) - (1.0 - std::log(t))));
    rho2_err = std::max(rho2_err, std::abs(grid.rho2(t) - (3.0 * t - 2.0 * t * std::log(t) - 2.0)));
  }
  double conv_err = 0.0;
  for (double t : {1.5, 2.0, 3.0, 5.0, 8.0, 10.0}) {
    conv_err = std::max(conv_err, std::abs(grid.rho2(t) / convolution_oracle(grid, t) - 1.0));
  }
  c.require(rho_err <= 1e-9 && rho2_err <= 1e-9 && conv_err <= 1e-6);
  c.detail << fmt::format("max|rho - (1 - log t)| = {:.2e}, max|rho2 - closed form| = {:.2e} (<= 1e-9); "
                          "max convolution rel. error = {:.2e} (<= 1e-6)",
                          rho_err, rho2_err, conv_err);
  return finish(2, c);
}

CriterionResult c3_laplace(const Tolerances&) {
  Check c;
  double worst = 0.0;
  for (int u = 1; u <= 10; ++u) {
    const double s = xi(u).xi;
    const double integral = laplace_oracle(dickman_grid(), 60.0, s);
    worst = std::max(worst, std::abs(integral / rho_hat_neg(s) - 1.0));
  }
  c.require(worst <= 1e-6);
  c.detail << fmt::format("max |int_0^60 rho e^(v xi(u)) / e^(gamma + I(xi(u))) - 1| = {:.2e} over u = 1..10 (<= 1e-6)",
                          worst);
  return finish(3, c);
}

CriterionResult c4_saddle(const Tolerances&) {
  Check c;
  double worst_residual = 0.0;
  double worst_bisect = 0.0;
  double worst_closed = 0.0;
  for (double log_x : {std::log(1e4), std::log(1e6), std::log(1e8)}) {
    for (std::uint64_t y : {2ull, 16ull, 100ull, 1000ull, 10000ull}) {
      const EulerProduct euler(y);
      const SaddlePoint sp = solve_alpha(log_x, euler);
      worst_residual = std::max(worst_residual, std::abs(phi_direct(euler.primes(), sp.alpha) - log_x) / log_x);
      worst_bisect = std::max(worst_bisect, std::abs(sp.alpha - bisection_alpha(euler.primes(), log_x)));
      if (y == 2) {
        const double closed = std::log1p(std::numbers::ln2 / log_x) / std::numbers::ln2;
        worst_closed = std::max(worst_closed, std::abs(sp.alpha - closed));
      }
    }
  }
  c.require(worst_residual <= 1e-10 && worst_bisect <= 1e-10 && worst_closed <= 1e-10);
  c.detail << fmt::format("max |phi(alpha) - log x| / log x = {:.2e}, max |alpha - bisection| = {:.2e}, "
                          "y = 2 closed form error = {:.2e} (all <= 1e-10)",
                          worst_residual, worst_bisect, worst_closed);
  return finish(4, c);
}

CriterionResult c5_psi_saddle(const Tolerances& tol) {
  Check c;
  for (const auto& [x, y] : kSaddleGrid) {
    const SaddlePoint sp = solve_alpha(std::log(static_cast<double>(x)), y);
    const double exact = static_cast<double>(psi_exact(x, y));
    const double err = std::abs(psi_saddle(sp).value / exact - 1.0);
    const double bound = tol.psi_saddle_c * (1.0 / sp.u + sp.log_y / static_cast<double>(y));
    c.require(err <= bound);
    c.detail << fmt::format("({}, {}): {:.2e} <= {:.2e}; ", x, y, err, bound);
  }
  return finish(5, c);
}

CriterionResult c6_median(const Tolerances& tol) {
  Check c;
  double first = 0.0;
  double last = 0.0;
  for (const auto& [x, y] : kSaddleGrid) {
    const SaddlePoint sp = solve_alpha(std::log(static_cast<double>(x)), y);
    const double err = std::abs(p_exact(sp, Magnitude::from_integer(x)) - 0.5);
    const double bound = tol.gaussian_k * std::pow(sp.ubar, -1.0 / 3.0);
    c.require(err <= bound);
    if (x == 10'000) first = err;
    if (y == 1'000) last = err;
    c.detail << fmt::format("({}, {}): |P - 1/2| = {:.4f} <= {:.4f}; ", x, y, err, bound);
  }
  c.require(last < first);
  c.detail << fmt::format("trend {:.4f} at (10^6, 10^3) < {:.4f} at (10^4, 30)", last, first);
  return finish(6, c);
}

CriterionResult c7_limits(const Tolerances& tol) {
  Check c;
  const std::uint64_t x = 1'000'000;
  const SaddlePoint full = solve_alpha(std::log(static_cast<double>(x)), x);
  const double p_full = p_exact(full, Magnitude::from_integer(x));
  const double err_full = std::abs(p_full - std::exp(-kEulerGamma));
  const double log_x = 40.0 * std::numbers::ln2;
  const SaddlePoint two = solve_alpha(log_x, 2);
  const double p_two = p_exact(two, Magnitude::from_log(log_x));
  const double err_two = std::abs(p_two - (1.0 - std::exp(-1.0)));
  c.require(err_full <= tol.limit_gamma && err_two <= tol.limit_two);
  c.detail << fmt::format("P(10^6, 10^6, 10^6) = {:.6f}, |. - e^-gamma| = {:.2e} <= {}; "
                          "P(2^40, 2, 2^40) = {:.6f}, |. - (1 - 1/e)| = {:.2e} <= {}",
                          p_full, err_full, tol.limit_gamma, p_two, err_two, tol.limit_two);
  return finish(7, c);
}

CriterionResult c8_gaussian(const Tolerances& tol) {
  Check c;
  for (const DeskPoint pt : {DeskPoint{1'000'000, 100}, DeskPoint{1'000'000, 1'000}}) {
    const SaddlePoint sp = solve_alpha(std::log(static_cast<double>(pt.x)), pt.y);
    const double bound = tol.gaussian_k * std::pow(sp.ubar, -1.0 / 3.0);
    double worst = 0.0;
    for (double h : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const Magnitude z = h == 0.0 ? Magnitude::from_integer(pt.x) : Magnitude::from_log(log_z_of(sp, h));
      worst = std::max(worst, std::abs(p_exact(sp, z) - normal_cdf(h)));
    }
    c.require(worst <= bound);
    c.detail << fmt::format("({}, {}): max_h |P - Phi(h)| = {:.4f} <= {:.4f}; ", pt.x, pt.y, worst, bound);
  }
  return finish(8, c);
}

CriterionResult c9_kappa(const Tolerances& tol) {
  Check c;
  double lo = 1.0;
  double hi = 0.0;
  for (double u : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
    const double k = kappa(u, u);
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  const double k11 = std::abs(kappa(1.0, 1.0) - std::exp(-kEulerGamma));
  double err5 = 0.0;
  double err50 = 0.0;
  bool within = true;
  for (double u : {5.0, 10.0, 20.0, 50.0}) {
    const double scale = 1.0 / std::sqrt(xi_prime(u));
    double worst = 0.0;
    for (double s : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
      worst = std::max(worst, std::abs(kappa(u, u + s * scale) - normal_cdf(s)));
    }
    within = within && worst <= tol.kappa_gauss_c / u;
    if (u == 5.0) err5 = worst;
    if (u == 50.0) err50 = worst;
  }
  c.require(lo >= tol.kappa_floor && hi <= 1.0 - tol.kappa_floor && k11 <= 1e-8 && within && err50 < err5);
  c.detail << fmt::format("kappa(u,u) in [{:.4f}, {:.4f}]; |kappa(1,1) - e^-gamma| = {:.1e}; "
                          "Gaussian profile max error {:.4f} at u=5, {:.5f} at u=50 (<= {}/u)",
                          lo, hi, k11, err5, err50, tol.kappa_gauss_c);
  return finish(9, c);
}

CriterionResult c10_delta(const Tolerances& tol) {
  Check c;
  const DeskPoint grid[] = {{10'000, 10}, {10'000, 100}, {100'000, 50}, {1'000'000, 1'000}, {1'000'000, 10'000}};
  for (const auto& [x, y] : grid) {
    const DeltaReport r = delta_exact(x, y);
    const double delta = *r.delta_exact;
    const bool identity_point = x <= 100'000;
    if (identity_point) {
      const double rel = std::abs(*r.identity_lhs - *r.identity_rhs) / std::abs(*r.identity_rhs);
      c.require(rel <= tol.identity_rel);
      c.detail << fmt::format("({}, {}): identity rel. error {:.1e}; ", x, y, rel);
    }
    if (y >= 1'000) {
      const double err = std::abs(delta / *r.nu_u - 1.0);
      const double bound = tol.nu_c * std::log(r.u + 1.0) / std::log(static_cast<double>(y));
      c.require(err <= bound);
      c.detail << fmt::format("({}, {}): |Delta/nu(u) - 1| = {:.4f} <= {:.4f}; ", x, y, err, bound);
    }
    const double band = std::abs(std::log(delta) + r.theta);
    const double band_bound = tol.theta_band_c * (1.0 + r.log_band);
    c.require(band <= band_bound && delta > 0.0 && delta < 1.0);
    c.detail << fmt::format("({}, {}): |log Delta + theta| = {:.4f} <= {:.4f}; ", x, y, band, band_bound);
  }
  return finish(10, c);
}

CriterionResult c11_sampler(const Tolerances& tol) {
  Check c;
  const std::uint64_t x = 1'000'000;
  const std::uint64_t n = 100'000;
  const std::uint64_t seed = 0x5EEDF00D;
  const SaddlePoint sp = solve_alpha(std::log(static_cast<double>(x)), 100);
  const SampleStats a = estimate_p(sp, sp.log_x, n, seed);
  const SampleStats b = estimate_p(sp, sp.log_x, n, seed);
  const double exact = p_exact(sp, Magnitude::from_integer(x));
  const double mean_bound = tol.sampler_sigmas * std::sqrt(sp.sigma[2] / static_cast<double>(n));
  const double mean_err = std::abs(a.mean_log_n - sp.log_x);
  const double frac_bound = tol.sampler_sigmas * a.ci_halfwidth / 1.96;
  const double frac_err = std::abs(a.frac_le_z - exact);
  const bool same = a.n_draws == b.n_draws && a.mean_log_n == b.mean_log_n && a.var_log_n == b.var_log_n &&
                    a.frac_le_z == b.frac_le_z && a.ci_halfwidth == b.ci_halfwidth;
  c.require(mean_err <= mean_bound && frac_err <= frac_bound && same);
  c.detail << fmt::format("|mean log n - log x| = {:.4f} <= {:.4f}; |frac - P| = {:.5f} <= {:.5f}; "
                          "reproducible = {}",
                          mean_err, mean_bound, frac_err, frac_bound, same);
  return finish(11, c);
}

CriterionResult c12_gradients(const Tolerances&) {
  Check c;
  double xi_err = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double t = 1.01 * std::pow(50.0 / 1.01, i / 200.0);
    const double h = 1e-5 * t;
    const double fd = (xi(t + h).xi - xi(t - h).xi) / (2.0 * h);
    xi_err = std::max(xi_err, std::abs(xi_prime(t) / fd - 1.0));
  }
  const EulerProduct euler(100);
  const double v = 3.0;
  const double dv = 1e-4;
  const double fd_alpha = (solve_alpha((v + dv) * euler.log_y(), euler).alpha -
                           solve_alpha((v - dv) * euler.log_y(), euler).alpha) /
                          (2.0 * dv);
  const double alpha_err = std::abs(alpha_v_derivative(v, euler) / fd_alpha - 1.0);

  const DickmanGrid& grid = dickman_grid();
  double res_rho = 0.0;
  double res_rho2 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = 1.0 + (grid.t_max() - 1.0) * (i + 0.5) / 1000.0;
    res_rho = std::max(res_rho, std::abs(t * grid.rho_prime(t) + grid.rho(t - 1.0)));
    res_rho2 = std::max(res_rho2, std::abs(t * grid.rho2_prime(t) - grid.rho2(t) + 2.0 * grid.rho2(t - 1.0)));
  }
  c.require(xi_err <= 1e-6 && alpha_err <= 1e-5 && res_rho <= 1e-9 && res_rho2 <= 1e-9);
  c.detail << fmt::format("xi' vs FD {:.1e} (<= 1e-6); alpha_v' vs FD {:.1e} (<= 1e-5); "
                          "DDE residuals rho {:.1e}, rho2 {:.1e} (<= 1e-9)",
                          xi_err, alpha_err, res_rho, res_rho2);
  return finish(12, c);
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "counting", "exact-counting oracle", c1_counting},
      {2, "dickman", "Dickman closed forms and convolution", c2_dickman},
      {3, "dickman", "Laplace identity", c3_laplace},
      {4, "saddle", "saddle solver", c4_saddle},
      {5, "saddle", "saddle-point Psi approximation", c5_psi_saddle},
      {6, "bias", "P(x, y, x) near 1/2", c6_median},
      {7, "bias", "limit values at y = x and y = 2", c7_limits},
      {8, "bias", "Gaussian profile", c8_gaussian},
      {9, "kappa", "kappa bounds and Gaussian limit", c9_kappa},
      {10, "delta", "defect identity and approximations", c10_delta},
      {11, "sampler", "sampler statistics", c11_sampler},
      {12, "gradients", "gradient and residual checks", c12_gradients},
  };
  return all;
}

std::vector<std::string> suite_names() {
  std::vector<std::string> names{"all"};
  for (const auto& c : criteria()) {
    if (std::find(names.begin(), names.end(), c.suite) == names.end()) names.push_back(c.suite);
  }
  return names;
}

std::vector<CriterionResult> run_suite(const std::string& suite, const Tolerances& tol,
                                       const std::function<void(const CriterionResult&)>& on_result) {
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  std::vector<CriterionResult> results;
  for (const auto& c : criteria()) {
    if (suite != "all" && c.suite != suite) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c.run(tol);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.id = c.id;
    r.suite = c.suite;
    r.title = c.title;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("[{}] C{:<2} {:<9} {} ({:.2f} s): {}", r.passed ? "PASS" : "FAIL", r.id, r.suite, r.title,
                     r.seconds, r.detail);
}

}  // namespace friable::acceptance
