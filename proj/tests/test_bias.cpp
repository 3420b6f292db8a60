#include <doctest.h>

#include <cmath>
#include <numbers>

#include "friable/bias.hpp"
#include "friable/errors.hpp"
#include "friable/summation.hpp"
#include "oracles.hpp"

using namespace friable;

namespace {

double zeta_product(std::uint64_t y, double s) {
  double prod = 1.0;
  for (auto p : oracle::primes_upto(y)) prod /= 1.0 - std::pow(static_cast<double>(p), -s);
  return prod;
}

}  // namespace

TEST_CASE("in_h_epsilon") {
  CHECK_FALSE(in_h_epsilon(std::log(2.0), std::log(2.0), 0.01));
  CHECK_FALSE(in_h_epsilon(std::log(1e6), std::log(100.0), 0.01));
  CHECK(in_h_epsilon(std::log(1e6), std::log(1000.0), 0.01));
  CHECK(in_h_epsilon(std::log(1e4), std::log(1e4), 0.01));
  CHECK_FALSE(in_h_epsilon(std::log(1e4), std::log(1e5), 0.01));
}

TEST_CASE("p_exact") {
  SUBCASE("enumeration oracle at (1e6, 100)") {
    const SaddlePoint sp = solve_alpha(std::log(1e6), 100);
    NeumaierSum sum;
    for (auto n : oracle::friable_upto(1'000'000, 100)) sum += std::pow(static_cast<double>(n), -sp.alpha);
    const double expect = sum.value() / zeta_product(100, sp.alpha);
    CHECK(p_exact(sp, Magnitude::from_integer(1'000'000)) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("limits") {
    const SaddlePoint full = solve_alpha(std::log(1e6), 1'000'000);
    CHECK(std::abs(p_exact(full, Magnitude::from_integer(1'000'000)) - std::exp(-kEulerGamma)) <= 0.05);
    const double log_x = 64.0 * std::numbers::ln2;
    const SaddlePoint two = solve_alpha(log_x, 2);
    CHECK(std::abs(p_exact(two, Magnitude::from_log(log_x)) - (1.0 - std::exp(-1.0))) <= 0.02);
    const double huge = 4096.0 * std::numbers::ln2;
    const SaddlePoint far = solve_alpha(huge, 2);
    const double p_far = p_exact(far, Magnitude::from_log(huge));
    CHECK(std::abs(p_far - (1.0 - std::exp(-1.0))) < std::abs(p_exact(two, Magnitude::from_log(log_x)) - (1.0 - std::exp(-1.0))));
  }
  SUBCASE("edges") {
    const SaddlePoint sp = solve_alpha(std::log(1e4), 30);
    CHECK(p_exact(sp, Magnitude::from_log(-1.0)) == 0.0);
    CHECK(p_exact(sp, Magnitude::from_integer(1)) == doctest::Approx(std::exp(-sp.log_zeta)).epsilon(1e-15));
    CHECK_THROWS_AS(p_exact(sp, Magnitude::from_log(200.0)), ResourceError);
    double prev = 0.0;
    for (std::uint64_t z : {1u, 10u, 100u, 1000u, 10000u, 100000u}) {
      const double p = p_exact(sp, Magnitude::from_integer(z));
      CHECK(p > prev);
      CHECK(p < 1.0);
      prev = p;
    }
    // z = exp(log 1e6) lands on 1e6, not 999999
    const SaddlePoint sp6 = solve_alpha(std::log(1e6), 100);
    CHECK(p_exact(sp6, Magnitude::from_log(std::log(1e6))) == p_exact(sp6, Magnitude::from_integer(1'000'000)));
  }
}

TEST_CASE("p_gaussian and p_kappa") {
  const SaddlePoint sp = solve_alpha(std::log(1e6), 100);
  CHECK(p_gaussian(sp, sp.log_x) == 0.5);
  CHECK(p_gaussian(sp, sp.log_x + sp.theta * sp.log_y) == doctest::Approx(0.841344746).epsilon(1e-9));
  CHECK(h_of(sp, log_z_of(sp, 0.7)) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK_THROWS_AS(p_kappa(sp, sp.log_x), DomainError);

  const SaddlePoint full = solve_alpha(std::log(1e6), 1'000'000);
  CHECK(p_kappa(full, full.log_x) == doctest::Approx(std::exp(-kEulerGamma)).epsilon(1e-10));
  const SaddlePoint in_h = solve_alpha(std::log(1e6), 1000);
  const double k = p_kappa(in_h, in_h.log_x);
  CHECK(k == doctest::Approx(kappa(in_h.u, in_h.u)).epsilon(1e-14));
  CHECK(p_kappa(in_h, -1.0) == 0.0);

  const BiasReport r = bias_report(sp, Magnitude::from_integer(1'000'000));
  CHECK(r.p_gaussian == 0.5);
  CHECK(r.h == 0.0);
  CHECK(r.p_exact.has_value());
  CHECK_FALSE(r.p_kappa.has_value());
  CHECK(*r.gaussian_residual == doctest::Approx(0.5 - *r.p_exact));
  const BiasReport far = bias_report(sp, Magnitude::from_log(300.0));
  CHECK(far.no_oracle);
  CHECK_FALSE(far.p_exact.has_value());
}

TEST_CASE("theta family") {
  CHECK(g_fn(0.0) == 0.0);
  CHECK_THROWS_AS(g_fn(-0.5), DomainError);
  // y / log x -> 0: theta / ubar -> log 4 - 1
  double prev = 1.0;
  for (double v : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double err = std::abs(g_fn(v) / v - (std::log(4.0) - 1.0));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-4);
  // y / log x -> infinity: theta / u -> 1 - log 2
  const double log_y = std::log(1e7);
  const double e5 = theta_family(5.0 * log_y, 10'000'000).theta / 5.0 - (1.0 - std::log(2.0));
  const double e10 = theta_family(10.0 * log_y, 10'000'000).theta / 10.0 - (1.0 - std::log(2.0));
  const double e80 = theta_family(80.0 * log_y, 10'000'000).theta / 80.0 - (1.0 - std::log(2.0));
  CHECK(std::abs(e10) < std::abs(e5));
  CHECK(std::abs(e80) < std::abs(e10));
  CHECK(std::abs(e80) < 1e-3);

  for (double log_x : {std::log(1e4), std::log(1e6), 30.0, 60.0}) {
    for (std::uint64_t y : {10u, 100u, 1000u, 100000u}) {
      if (std::log(static_cast<double>(y)) > log_x) continue;
      const ThetaFamily f = theta_family(log_x, y);
      CHECK(f.theta > 0.0);
      CHECK(f.theta0 == doctest::Approx(f.theta2 - (log_x / std::log(static_cast<double>(y))) * f.theta1).epsilon(1e-12));
      if (f.in_h_epsilon == f.theta2_large_y) CHECK(f.theta0 == doctest::Approx(f.theta).epsilon(1e-10));
    }
  }
}

TEST_CASE("delta") {
  SUBCASE("identity and range at desk scale") {
    for (auto [x, y] : {std::pair<std::uint64_t, std::uint64_t>{10'000, 10}, {10'000, 100}, {100'000, 50}, {50'000, 2}}) {
      const DeltaReport r = delta_exact(x, y);
      CHECK(*r.delta_exact > 0.0);
      CHECK(*r.delta_exact < 1.0);
      CHECK(*r.identity_lhs == doctest::Approx(*r.identity_rhs).epsilon(1e-9));
      CHECK(*r.psi == psi_exact(x, y));
      CHECK(*r.psi_tau == psi_tau_hyperbola(x, y));
    }
  }
  SUBCASE("band and nu at (1e6, 1e3)") {
    const DeltaReport r = delta_exact(1'000'000, 1000);
    CHECK(std::abs(std::log(*r.delta_exact) + r.theta) <= 3.0 * (1.0 + r.log_band));
    CHECK(std::abs(*r.delta_exact / *r.nu_u - 1.0) <= 3.0 * std::log(3.0) / std::log(1000.0));
    CHECK(r.u == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("inside (H_eps) the band needs no eps_y term") {
    const DeltaReport r = delta_exact(10'000, 100);
    CHECK(r.thetas.in_h_epsilon);
    CHECK(std::abs(std::log(*r.delta_exact) + r.theta) <= 3.0);
  }
  SUBCASE("asymptotic side") {
    const SaddlePoint sp = solve_alpha(std::log(1e6), 1000);
    CHECK(delta_nu(sp) == doctest::Approx(nu(sp.u)).epsilon(1e-15));
    CHECK_THROWS_AS(delta_nu(solve_alpha(std::log(1e6), 100)), DomainError);
    CHECK(delta_theta(std::log(1e6), 1000) == doctest::Approx(std::exp(-theta_family(std::log(1e6), 1000).theta)));
    // central estimate decays in u at fixed y within one branch
    double prev = 1.0;
    for (double u = 1.5; u <= 6.0; u += 0.5) {
      const double log_x = u * std::log(1e5);
      REQUIRE(theta_family(log_x, 100'000).in_h_epsilon);
      const double d = delta_theta(log_x, 100'000);
      CHECK(d < prev);
      prev = d;
    }
    const DeltaReport r = delta_report(std::log(1e6), 1000);
    CHECK(r.no_oracle);
    CHECK_FALSE(r.delta_exact.has_value());
    CHECK(std::abs(r.z_ratio - 0.5 * r.thetas.theta2) <= 3.0 * (1.0 + r.log_band));
    CHECK(r.delta_drappeau > 0.0);
  }
  CHECK_THROWS_AS(delta_exact(10, 100), DomainError);
  Budget tiny;
  tiny.max_terms = 50;
  CHECK_THROWS_AS(delta_exact(1'000'000, 100, {.budget = tiny}), ResourceError);
}

TEST_CASE("r_d") {
  CHECK(r_d(10'000, 30, 1) == doctest::Approx(0.0).scale(1.0));
  const SaddlePoint sp = solve_alpha(std::log(100.0), 5);
  const double psi100 = static_cast<double>(oracle::friable_upto(100, 5).size());
  const double psi50 = static_cast<double>(oracle::friable_upto(50, 5).size());
  CHECK(r_d(100, 5, 2) == doctest::Approx(psi100 / std::pow(2.0, sp.alpha) - psi50).epsilon(1e-13));
  CHECK_THROWS_AS(r_d(100, 5, 7), DomainError);
  CHECK_THROWS_AS(r_d(100, 5, 0), DomainError);
  CHECK_THROWS_AS(r_d(100, 5, 128), DomainError);
  // sum over S(x, y) of R_d equals Psi D (1 - Delta)
  const DeltaReport r = delta_exact(2000, 20);
  NeumaierSum sum;
  for (auto d : oracle::friable_upto(2000, 20)) sum += r_d(2000, 20, d);
  CHECK(sum.value() == doctest::Approx(*r.identity_rhs).epsilon(1e-9));
}
