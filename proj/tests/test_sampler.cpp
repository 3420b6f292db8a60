#include <doctest.h>

#include <cmath>

#include "friable/bias.hpp"
#include "friable/errors.hpp"
#include "friable/sampler.hpp"
#include "oracles.hpp"

using namespace friable;

TEST_CASE("Philox4x32-10 known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32(0)(C{0, 0, 0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32(0xffffffffffffffffull)(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32(0x299f31d0a4093822ull)(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  const Philox4x32 rng(42);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = rng.uniform(i, 3);
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
  }
}

TEST_CASE("samples") {
  const SaddlePoint sp = solve_alpha(std::log(1e6), 100);
  const FriableSample a = sample_friable(sp, 9, 17);
  const FriableSample b = sample_friable(sp, 9, 17);
  CHECK(a.exponents == b.exponents);
  CHECK(a.log_n == b.log_n);
  const auto primes = oracle::primes_upto(100);
  REQUIRE(a.exponents.size() == primes.size());
  double log_n = 0.0;
  for (std::size_t i = 0; i < primes.size(); ++i) log_n += a.exponents[i] * std::log(static_cast<double>(primes[i]));
  CHECK(a.log_n == doctest::Approx(log_n).epsilon(1e-12));
  const FriableSampler sampler(sp, 9);
  CHECK(sampler.draw_log_n(17) == a.log_n);
  CHECK(sampler.draw_exponent(17, 4) == a.exponents[4]);
}

TEST_CASE("estimate_p") {
  const SaddlePoint sp = solve_alpha(std::log(1e6), 100);
  const std::uint64_t n = 100'000;
  const SampleStats s = estimate_p(sp, sp.log_x, n, 2024);
  const SampleStats again = estimate_p(sp, sp.log_x, n, 2024);
  CHECK(s.mean_log_n == again.mean_log_n);
  CHECK(s.var_log_n == again.var_log_n);
  CHECK(s.frac_le_z == again.frac_le_z);
  CHECK(s.n_draws == n);
  CHECK(s.frac_le_z >= 0.0);
  CHECK(s.frac_le_z <= 1.0);
  CHECK(s.var_log_n >= 0.0);
  CHECK(s.ci_halfwidth == doctest::Approx(1.96 * std::sqrt(s.frac_le_z * (1 - s.frac_le_z) / n)));

  // analytic moments of the geometric exponents
  double mean = 0.0;
  double var = 0.0;
  for (auto p : oracle::primes_upto(100)) {
    const double l = std::log(static_cast<double>(p));
    const double q = std::pow(static_cast<double>(p), -sp.alpha);
    mean += l * q / (1 - q);
    var += l * l * q / ((1 - q) * (1 - q));
  }
  CHECK(mean == doctest::Approx(sp.log_x).epsilon(1e-10));
  CHECK(var == doctest::Approx(sp.sigma[2]).epsilon(1e-10));
  CHECK(std::abs(s.mean_log_n - sp.log_x) <= 3.0 * std::sqrt(sp.sigma[2] / n));

  const double exact = p_exact(sp, Magnitude::from_integer(1'000'000));
  CHECK(std::abs(s.frac_le_z - exact) <= s.ci_halfwidth * 4.0 / 1.96);
  CHECK(estimate_p(sp, -0.5, 1000, 1).frac_le_z == 0.0);
  CHECK_THROWS_AS(estimate_p(sp, sp.log_x, 99, 1), DomainError);
}

TEST_CASE("pooled seeds") {
  const SaddlePoint sp = solve_alpha(std::log(1e5), 50);
  const double exact = p_exact(sp, Magnitude::from_integer(100'000));
  double hits = 0.0;
  double sum_mean = 0.0;
  double sum_var = 0.0;
  const std::uint64_t n = 20'000;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SampleStats s = estimate_p(sp, sp.log_x, n, seed * 7919);
    hits += s.frac_le_z * n;
    sum_mean += s.mean_log_n;
    sum_var += s.var_log_n;
  }
  const double total = 20.0 * n;
  const double p_hat = hits / total;
  CHECK(std::abs(p_hat - exact) <= 2.576 * std::sqrt(p_hat * (1 - p_hat) / total));
  CHECK(std::abs(sum_mean / 20.0 - sp.log_x) <= 4.0 * std::sqrt(sp.sigma[2] / total));
  // variance of the sample variance ~ (mu4 - sigma^4)/n; bounded loosely by 3 sigma^4
  CHECK(std::abs(sum_var / 20.0 - sp.sigma[2]) <= 4.0 * std::sqrt(3.0 * sp.sigma[2] * sp.sigma[2] / total));
}

TEST_CASE("exponent_histogram") {
  const SaddlePoint sp = solve_alpha(std::log(1e6), 100);
  const ExponentHistogram h = exponent_histogram(sp, 3, 100'000, 77);
  CHECK(h.p_value > 0.001);
  CHECK(h.expected_mean == doctest::Approx(std::pow(3.0, -sp.alpha) / (1 - std::pow(3.0, -sp.alpha))));
  CHECK(h.mean == doctest::Approx(h.expected_mean).epsilon(0.02));
  CHECK_THROWS_AS(exponent_histogram(sp, 4, 1000, 1), DomainError);
  CHECK_THROWS_AS(exponent_histogram(sp, 101, 1000, 1), DomainError);

  // alpha = 1 at p = 2: P(v = 0) = 1/2
  SaddlePoint one = solve_alpha(std::log(1e6), 100);
  one.alpha = 1.0;
  const ExponentHistogram h2 = exponent_histogram(one, 2, 100'000, 5);
  CHECK(static_cast<double>(h2.counts[0]) / 100'000 == doctest::Approx(0.5).epsilon(0.02));

  // y = 2 is a single geometric
  const SaddlePoint two = solve_alpha(30.0, 2);
  const FriableSample s = sample_friable(two, 3, 0);
  CHECK(s.exponents.size() == 1);
  CHECK(s.log_n == doctest::Approx(s.exponents[0] * std::log(2.0)).epsilon(1e-15));
}
