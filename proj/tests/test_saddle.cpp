#include <doctest.h>

#include <cmath>
#include <numbers>

#include "friable/dickman.hpp"
#include "friable/errors.hpp"
#include "friable/primes.hpp"
#include "friable/saddle.hpp"
#include "oracles.hpp"

using namespace friable;

TEST_CASE("log_zeta_y") {
  CHECK(log_zeta_y(1.3, 2) == doctest::Approx(-std::log1p(-std::pow(2.0, -1.3))).epsilon(1e-15));
  CHECK(log_zeta_y(1.0, 3) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  double prev = log_zeta_y(0.1, 1000);
  for (double s : {0.5, 1.0, 2.0, 5.0, 20.0, 60.0}) {
    const double v = log_zeta_y(s, 1000);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  CHECK(prev < 1e-17);
  CHECK_THROWS_AS(log_zeta_y(0.0, 10), DomainError);
  CHECK_THROWS_AS(log_zeta_y(-1.0, 10), DomainError);
}

TEST_CASE("phi derivatives against the truncated series") {
  const auto primes = oracle::primes_upto(200);
  for (double s : {0.2, 0.6, 1.0, 2.5}) {
    for (int k = 0; k <= 4; ++k) {
      const double series = oracle::phi_series(primes, s, k);
      CHECK(phi_y_k(s, 200, k) == doctest::Approx(series).epsilon(1e-12));
    }
  }
  // d/ds log zeta = -phi
  const double h = 1e-5;
  CHECK((log_zeta_y(0.7 + h, 200) - log_zeta_y(0.7 - h, 200)) / (2 * h) ==
        doctest::Approx(-phi_y_k(0.7, 200, 0)).epsilon(1e-8));
  CHECK_THROWS_AS(phi_y_k(0.0, 200, 0), DomainError);
  CHECK_THROWS_AS(phi_y_k(1.0, 200, 5), DomainError);
}

TEST_CASE("solve_alpha") {
  SUBCASE("bisection oracle at (1e6, 100)") {
    const auto primes = oracle::primes_upto(100);
    const double log_x = std::log(1e6);
    const double root = oracle::bisect([&](double s) { return oracle::phi_series(primes, s, 0) - log_x; }, 1e-6, 3.0);
    const SaddlePoint sp = solve_alpha(log_x, 100);
    CHECK(std::abs(sp.alpha - root) <= 1e-10);
    CHECK(sp.alpha == doctest::Approx(0.60385669).epsilon(1e-7));
  }
  SUBCASE("y = 2 closed form") {
    for (double log_x : {5.0, 27.7, 1e3, 1e5}) {
      const SaddlePoint sp = solve_alpha(log_x, 2);
      CHECK(sp.alpha == doctest::Approx(std::log1p(std::numbers::ln2 / log_x) / std::numbers::ln2).epsilon(1e-12));
    }
  }
  SUBCASE("invariants") {
    for (double log_x : {std::log(1e4), std::log(1e8), 200.0}) {
      for (std::uint64_t y : {2u, 16u, 1000u, 100000u}) {
        const SaddlePoint sp = solve_alpha(log_x, y);
        CHECK(sp.alpha > 0.0);
        CHECK(sp.alpha <= 1.0 + 10.0 / log_x);
        CHECK(std::abs(phi_y_k(sp.alpha, y, 0) - log_x) <= 1e-10 * log_x);
        CHECK(sp.sigma[2] > 0.0);
        CHECK(sp.theta * sp.theta * sp.log_y * sp.log_y == doctest::Approx(sp.sigma[2]).epsilon(1e-14));
        CHECK(theta_of(sp) == sp.theta);
        CHECK(sp.u == doctest::Approx(log_x / std::log(static_cast<double>(y))).epsilon(1e-15));
        CHECK(sp.ubar == doctest::Approx(std::min(static_cast<double>(y), log_x) / sp.log_y).epsilon(1e-15));
        CHECK(sp.log_zeta == doctest::Approx(log_zeta_y(sp.alpha, y)).epsilon(1e-14));
        CHECK(sp.sigma[3] == doctest::Approx(phi_y_k(sp.alpha, y, 2)).epsilon(1e-13));
        CHECK(sp.sigma[4] == doctest::Approx(-phi_y_k(sp.alpha, y, 3)).epsilon(1e-13));
      }
    }
  }
  SUBCASE("alpha(x, x) tends to 1") {
    double prev = 1.0;
    for (std::uint64_t x : {1'000u, 100'000u, 10'000'000u}) {
      const double log_x = std::log(static_cast<double>(x));
      const double gap = std::abs(solve_alpha(log_x, x).alpha - 1.0) * log_x * log_x;
      CHECK(gap < 20.0);
      CHECK(std::abs(solve_alpha(log_x, x).alpha - 1.0) < prev);
      prev = std::abs(solve_alpha(log_x, x).alpha - 1.0);
    }
  }
  CHECK_THROWS_AS(solve_alpha(0.0, 10), DomainError);
  CHECK_THROWS_AS(solve_alpha(-1.0, 10), DomainError);
}

TEST_CASE("psi_saddle") {
  const SaddlePoint sp = solve_alpha(std::log(1e6), 100);
  const double exact = static_cast<double>(psi_exact(1'000'000, 100));
  CHECK(std::abs(psi_saddle(sp).value / exact - 1.0) <= 5.0 * (1.0 / sp.u + std::log(100.0) / 100.0));
  for (std::uint64_t x : {10'000u, 100'000u, 1'000'000u}) {
    const double r = psi_saddle(solve_alpha(std::log(static_cast<double>(x)), x)).value / static_cast<double>(x);
    CHECK(r > 0.5);
    CHECK(r < 2.0);
  }
  double prev = 0.0;
  for (double log_x = 5.0; log_x < 30.0; log_x += 1.0) {
    const double v = psi_saddle(solve_alpha(log_x, 50)).log_value;
    CHECK(v > prev);
    prev = v;
  }
  const PsiApprox huge = psi_saddle(solve_alpha(2000.0, 100000));
  CHECK(huge.overflow);
  CHECK(std::isfinite(huge.log_value));
}

TEST_CASE("Theta") {
  for (double x : {1e4, 1e6, 1e8}) {
    for (double y = 16; y <= x; y *= 10) {
      const SaddlePoint sp = solve_alpha(std::log(x), static_cast<std::uint64_t>(y));
      const double ratio = sp.theta * std::sqrt(sp.ubar) / sp.u;
      CHECK(ratio >= 0.1);
      CHECK(ratio <= 10.0);
    }
  }
  // y = (log x)^1.5: Theta sqrt(xi'(u)) approaches 1
  double prev = 1e9;
  for (double log_x : {50.0, 500.0, 5000.0}) {
    const auto y = static_cast<std::uint64_t>(std::pow(log_x, 1.5));
    const SaddlePoint sp = solve_alpha(log_x, y);
    const double err = std::abs(sp.theta * std::sqrt(xi_prime(sp.u)) - 1.0);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("alpha_v_derivative") {
  const EulerProduct euler(100);
  const double v = 3.0;
  const double h = 1e-4;
  const double fd = (solve_alpha((v + h) * euler.log_y(), euler).alpha - solve_alpha((v - h) * euler.log_y(), euler).alpha) / (2 * h);
  CHECK(alpha_v_derivative(v, euler) == doctest::Approx(fd).epsilon(1e-5));
  CHECK(alpha_v_derivative(v, 100) < 0.0);
  const SaddlePoint sp = solve_alpha(v * euler.log_y(), euler);
  CHECK(alpha_v_derivative(v, 100) == doctest::Approx(-euler.log_y() / sp.sigma[2]).epsilon(1e-12));
}
