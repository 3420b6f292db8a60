#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "friable/errors.hpp"
#include "friable/primes.hpp"
#include "friable/saddle.hpp"
#include "friable/summation.hpp"
#include "oracles.hpp"

using namespace friable;

TEST_CASE("sieve_primes") {
  CHECK(std::ranges::equal(sieve_primes(2).primes(), std::vector<std::uint64_t>{2}));
  CHECK(std::ranges::equal(sieve_primes(10).primes(), std::vector<std::uint64_t>{2, 3, 5, 7}));
  const PrimeTable t = sieve_primes(1000);
  CHECK(t.size() == 168);
  CHECK(std::ranges::equal(t.primes(), oracle::primes_upto(1000)));
  CHECK(t.logs()[3] == doctest::Approx(std::log(7.0)).epsilon(1e-15));
  CHECK(t.count_upto(100) == 25);
  CHECK(t.count_upto(5000) == 168);
  CHECK(t.contains(997));
  CHECK_FALSE(t.contains(999));
  CHECK_THROWS_AS(sieve_primes(1), DomainError);
  Budget small;
  small.max_sieve = 1000;
  CHECK_THROWS_AS(sieve_primes(1001, small), ResourceError);
}

TEST_CASE("largest_prime_factors against trial division") {
  const auto lpf = largest_prime_factors(5000);
  CHECK(lpf[1] == 1);
  for (std::uint64_t n = 2; n <= 5000; ++n) REQUIRE(lpf[n] == oracle::largest_factor(n));
  CHECK(is_friable(1, 2));
  CHECK(is_friable(1024, 2));
  CHECK_FALSE(is_friable(1025, 2));
  CHECK(is_friable(2 * 3 * 5 * 7 * 11 * 13, 13));
}

TEST_CASE("enumerate_friable") {
  auto sorted = [](std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(sorted(enumerate_friable(8, 2)) == std::vector<std::uint64_t>{1, 2, 4, 8});
  CHECK(sorted(enumerate_friable(12, 3)) == std::vector<std::uint64_t>{1, 2, 3, 4, 6, 8, 9, 12});
  CHECK(enumerate_friable(1, 7) == std::vector<std::uint64_t>{1});
  for (auto [x, y] : {std::pair<std::uint64_t, std::uint64_t>{1000, 7}, {3000, 50}, {500, 500}}) {
    CHECK(sorted(enumerate_friable(x, y)) == oracle::friable_upto(x, y));
  }

  SUBCASE("terms carry their factorization, n = 1 first") {
    FriableEnumeration e(2000, 30);
    FriableTerm term;
    bool first = true;
    std::uint64_t count = 0;
    while (e.next(term)) {
      if (first) CHECK(term.n == 1);
      first = false;
      std::uint64_t n = 1;
      for (std::size_t i = 0; i < term.exponents.size(); ++i) {
        for (std::uint32_t k = 0; k < term.exponents[i]; ++k) n *= e.primes()[i];
      }
      REQUIRE(n == term.n);
      ++count;
    }
    CHECK(count == oracle::friable_upto(2000, 30).size());
    CHECK_FALSE(e.next(term));
  }

  SUBCASE("budget") {
    Budget b;
    b.max_terms = 10;
    CHECK_THROWS_AS(enumerate_friable(1000, 7, b), ResourceError);
  }
}

TEST_CASE("psi_exact") {
  CHECK(psi_exact(100, 100) == 100);
  CHECK(psi_exact(10, 2) == 4);
  CHECK(psi_exact(1, 2) == 1);
  CHECK(psi_exact(100, 1000) == 100);
  CHECK(psi_exact(1'000'000, 100) == PsiTable(1'000'000, 100)(1'000'000));
  for (std::uint64_t x : {1u, 37u, 200u, 999u}) {
    for (std::uint64_t y : {2u, 3u, 10u, 31u, 200u}) {
      REQUIRE(psi_exact(x, y) == oracle::friable_upto(x, y).size());
    }
  }
  const PrimeTable primes = sieve_primes(100);
  CHECK(psi_exact(5000, 47, primes) == psi_exact(5000, 47));
  CHECK_THROWS_AS(psi_exact(5000, 200, primes), DomainError);
  CHECK_THROWS_AS(psi_exact(10, 1), DomainError);
  Budget b;
  b.max_terms = 100;
  CHECK_THROWS_AS(psi_exact(100'000'000, 10'000, b), ResourceError);
}

TEST_CASE("psi_levels matches PsiTable") {
  std::vector<std::uint64_t> seen;
  psi_levels(3000, [&](std::uint64_t p, std::span<const std::uint32_t> psi) {
    if (p < 2) return;
    seen.push_back(p);
    if (p == 2 || p == 13 || p == 997) {
      const PsiTable table(3000, p);
      for (std::uint64_t x = 1; x <= 3000; ++x) REQUIRE(psi[x] == table(x));
    }
  });
  CHECK(seen == oracle::primes_upto(3000));
}

TEST_CASE("psi_tau") {
  CHECK(psi_tau_exact(4, 2) == 6);
  CHECK(psi_tau_exact(1, 5) == 1);
  std::uint64_t divisor_sum = 0;
  for (std::uint64_t n = 1; n <= 3000; ++n) divisor_sum += oracle::tau(n);
  CHECK(psi_tau_exact(3000, 3000) == divisor_sum);
  CHECK(psi_tau_hyperbola(3000, 3000) == divisor_sum);
  for (auto [x, y] : {std::pair<std::uint64_t, std::uint64_t>{10'000, 30}, {5000, 2}, {20'000, 300}}) {
    std::uint64_t expect = 0;
    for (auto n : oracle::friable_upto(x, y)) expect += oracle::tau(n);
    CHECK(psi_tau_exact(x, y) == expect);
    CHECK(psi_tau_hyperbola(x, y) == expect);
  }
}

TEST_CASE("d_exact") {
  CHECK(d_exact(1, 30, 0.7) == 1.0);
  CHECK_THROWS_AS(d_exact(10, 30, 0.0), DomainError);
  CHECK_THROWS_AS(d_exact(10, 30, -1.0), DomainError);

  const SaddlePoint sp = solve_alpha(std::log(1e4), 30);
  NeumaierSum direct;
  for (auto n : oracle::friable_upto(10'000, 30)) direct += std::pow(static_cast<double>(n), -sp.alpha);
  CHECK(d_exact(10'000, 30, sp.alpha) == doctest::Approx(direct.value()).epsilon(1e-13));

  // y = 2: geometric series 1 + q + ... + q^K
  const double alpha = 0.3;
  double geometric = 0.0;
  for (int k = 0; k <= 13; ++k) geometric += std::pow(2.0, -alpha * k);
  CHECK(d_exact(10'000, 2, alpha) == doctest::Approx(geometric).epsilon(1e-14));
  CHECK(d_exact_two(std::log(8192.0), alpha) == doctest::Approx(geometric).epsilon(1e-14));
  CHECK(friable_power_sum(10'000, 30, 0.0) == doctest::Approx(static_cast<double>(psi_exact(10'000, 30))));
}

TEST_CASE("summation helpers") {
  NeumaierSum s;
  s += 1.0;
  s += 1e100;
  s += 1.0;
  s += -1e100;
  CHECK(s.value() == 2.0);
  LogSumExp l;
  l.add(std::log(2.0));
  l.add(std::log(3.0));
  CHECK(std::exp(l.log_value()) == doctest::Approx(5.0).epsilon(1e-15));
}
