#include "friable/primes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>
#include <unordered_map>

#include "friable/errors.hpp"
#include "friable/summation.hpp"

namespace friable {

Budget default_budget() {
  Budget b;
  if (const char* env = std::getenv("FRIABLE_BUDGET")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v >= 1.0) {
      b.max_terms = static_cast<std::uint64_t>(v);
    }
  }
  return b;
}

PrimeTable::PrimeTable(std::uint64_t bound, std::vector<std::uint64_t> primes)
    : bound_(bound), primes_(std::move(primes)) {
  logs_.reserve(primes_.size());
  for (auto p : primes_) logs_.push_back(std::log(static_cast<double>(p)));
}

std::size_t PrimeTable::count_upto(std::uint64_t b) const {
  return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), b) - primes_.begin());
}

bool PrimeTable::contains(std::uint64_t p) const {
  return std::binary_search(primes_.begin(), primes_.end(), p);
}

PrimeTable sieve_primes(std::uint64_t y, const Budget& budget) {
  if (y < 2) throw DomainError("sieve_primes: bound must be >= 2, got " + std::to_string(y));
  if (y > budget.max_sieve) {
    throw ResourceError("sieve_primes: bound " + std::to_string(y) + " exceeds sieve cap " +
                        std::to_string(budget.max_sieve));
  }
  // odd[i] represents 2i + 1
  const std::uint64_t half = (y - 1) / 2 + 1;
  std::vector<bool> composite(half, false);
  composite[0] = true;
  for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= y; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    for (std::uint64_t m = p * p; m <= y; m += 2 * p) composite[m / 2] = true;
  }
  std::vector<std::uint64_t> primes{2};
  for (std::uint64_t i = 1; i < half; ++i) {
    if (!composite[i]) primes.push_back(2 * i + 1);
  }
  return PrimeTable(y, std::move(primes));
}

std::vector<std::uint32_t> largest_prime_factors(std::uint32_t n_max) {
  std::vector<std::uint32_t> lpf(static_cast<std::size_t>(n_max) + 1, 0);
  if (n_max >= 1) lpf[1] = 1;
  for (std::uint64_t p = 2; p <= n_max; ++p) {
    if (lpf[p] != 0) continue;  // composite: already has a smaller factor
    for (std::uint64_t m = p; m <= n_max; m += p) lpf[m] = static_cast<std::uint32_t>(p);
  }
  return lpf;
}

bool is_friable(std::uint64_t n, std::uint64_t y) {
  if (n == 0) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      if (p > y) return false;
      n /= p;
    }
  }
  return n <= y || n == 1;
}

// ---------------------------------------------------------------------------
// FriableEnumeration

FriableEnumeration::FriableEnumeration(std::uint64_t x_limit, std::uint64_t y_limit,
                                       const Budget& budget)
    : x_limit_(x_limit), y_limit_(y_limit), budget_(budget) {
  if (y_limit < 2) throw DomainError("enumerate_friable: y must be >= 2");
  if (x_limit == 0) {
    done_ = true;
    return;
  }
  const std::uint64_t bound = std::max<std::uint64_t>(2, std::min(x_limit, y_limit));
  primes_ = sieve_primes(bound, budget);
  exponents_.assign(primes_.size(), 0);
}

bool FriableEnumeration::next(FriableTerm& out) {
  if (done_) return false;
  // values_ is a stack of (prime index, value before that prime) pairs.
  auto frame_count = [&] { return values_.size() / 2; };
  auto top_index = [&] { return static_cast<std::size_t>(values_[values_.size() - 2]); };
  auto top_base = [&] { return values_.back(); };
  auto push = [&](std::size_t i, std::uint64_t base) {
    values_.push_back(i);
    values_.push_back(base);
    exponents_[i] = 1;
    current_ = base * primes_[i];
  };
  auto pop = [&] {
    exponents_[top_index()] = 0;
    values_.resize(values_.size() - 2);
  };

  if (!started_) {
    started_ = true;
    current_ = 1;
  } else {
    bool found = false;
    // Descend: largest admissible smaller prime that keeps n <= x.
    const std::size_t allowed = frame_count() == 0 ? primes_.size() : top_index();
    if (allowed > 0) {
      const std::uint64_t room = x_limit_ / current_;
      const std::size_t fit = std::min(allowed, primes_.count_upto(room));
      if (fit > 0) {
        push(fit - 1, current_);
        found = true;
      }
    }
    while (!found && frame_count() > 0) {
      const std::size_t i = top_index();
      const std::uint64_t p = primes_[i];
      if (current_ <= x_limit_ / p) {
        current_ *= p;
        ++exponents_[i];
        found = true;
        break;
      }
      const std::uint64_t base = top_base();
      pop();
      if (i > 0) {
        // base * p_{i-1} < base * p_i <= x always holds here.
        push(i - 1, base);
        found = true;
        break;
      }
      current_ = base;
    }
    if (!found) {
      done_ = true;
      return false;
    }
  }
  if (++emitted_ > budget_.max_terms) {
    throw ResourceError("enumerate_friable: S(" + std::to_string(x_limit_) + ", " +
                        std::to_string(y_limit_) + ") exceeds term budget " +
                        std::to_string(budget_.max_terms) + " after " +
                        std::to_string(emitted_ - 1) + " terms");
  }
  out.n = current_;
  out.exponents = exponents_;
  return true;
}

void FriableEnumeration::for_each(const std::function<void(const FriableTerm&)>& visit) {
  FriableTerm term{};
  while (next(term)) visit(term);
}

std::vector<std::uint64_t> enumerate_friable(std::uint64_t x, std::uint64_t y, const Budget& budget) {
  std::vector<std::uint64_t> out;
  FriableEnumeration e(x, y, budget);
  e.for_each([&](const FriableTerm& t) { out.push_back(t.n); });
  return out;
}

// ---------------------------------------------------------------------------
// Psi by recurrence

namespace {

class PsiRecurrence {
 public:
  PsiRecurrence(const PrimeTable& primes, const Budget& budget) : primes_(primes), budget_(budget) {}

  // Psi(x, p_{k-1}): friable with respect to the first k primes.
  std::uint64_t count(std::uint64_t x, std::size_t k) {
    if (x == 0) return 0;
    k = std::min(k, primes_.count_upto(x));
    if (k == 0) return 1;
    // every n <= x is friable once all primes up to x are admissible
    if (primes_.bound() >= x && k == primes_.count_upto(x)) return x;
    if (k == 1) return static_cast<std::uint64_t>(std::bit_width(x));
    const bool memoize = x < kMemoLimit;
    const std::uint64_t key = (x << 24) | k;
    if (memoize) {
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    if (++nodes_ > budget_.max_terms) {
      throw ResourceError("psi_exact: recursion exceeded node budget " +
                          std::to_string(budget_.max_terms));
    }
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total += count(x / primes_[i], i + 1);
    if (memoize) memo_.emplace(key, total);
    return total;
  }

 private:
  static constexpr std::uint64_t kMemoLimit = std::uint64_t{1} << 20;
  const PrimeTable& primes_;
  Budget budget_;
  std::uint64_t nodes_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> memo_;
};

}  // namespace

std::uint64_t psi_exact(std::uint64_t x, std::uint64_t y, const Budget& budget) {
  if (y < 2) throw DomainError("psi_exact: y must be >= 2");
  if (x <= y) return x;
  return psi_exact(x, y, sieve_primes(y, budget), budget);
}

std::uint64_t psi_exact(std::uint64_t x, std::uint64_t y, const PrimeTable& primes, const Budget& budget) {
  if (y < 2) throw DomainError("psi_exact: y must be >= 2");
  if (x <= y) return x;
  if (primes.bound() < y) throw DomainError("psi_exact: prime table does not reach y");
  // Restrict to primes <= y but keep the table's bound for the all-friable shortcut.
  PsiRecurrence rec(primes, budget);
  return rec.count(x, primes.count_upto(y));
}

PsiTable::PsiTable(std::uint64_t n_max, std::uint64_t y, const Budget& budget) : y_(y) {
  if (y < 2) throw DomainError("PsiTable: y must be >= 2");
  if (n_max > budget.max_sieve || n_max > 0xFFFFFFFFull) {
    throw ResourceError("PsiTable: bound " + std::to_string(n_max) + " exceeds sieve cap");
  }
  const auto lpf = largest_prime_factors(static_cast<std::uint32_t>(n_max));
  counts_.assign(n_max + 1, 0);
  std::uint32_t running = 0;
  for (std::uint64_t m = 1; m <= n_max; ++m) {
    if (lpf[m] <= y) ++running;
    counts_[m] = running;
  }
}

void psi_levels(std::uint32_t n_max,
                const std::function<void(std::uint64_t, std::span<const std::uint32_t>)>& visit) {
  std::vector<std::uint32_t> psi(static_cast<std::size_t>(n_max) + 1, 1);
  psi[0] = 0;
  visit(1, psi);
  if (n_max < 2) return;
  const PrimeTable primes = sieve_primes(n_max, Budget{.max_terms = ~0ull, .max_sieve = ~0ull});
  for (const auto p : primes.primes()) {
    for (std::uint64_t x = p; x <= n_max; ++x) psi[x] += psi[x / p];
    visit(p, psi);
  }
}

// ---------------------------------------------------------------------------
// Psi_tau

std::uint64_t psi_tau_exact(std::uint64_t x, std::uint64_t y, const Budget& budget) {
  if (y < 2) throw DomainError("psi_tau_exact: y must be >= 2");
  if (x == 0) return 0;
  std::uint64_t total = 0;
  FriableEnumeration e(x, y, budget);
  e.for_each([&](const FriableTerm& t) {
    std::uint64_t tau = 1;
    for (auto v : t.exponents) tau *= v + 1;
    total += tau;
  });
  return total;
}

std::uint64_t psi_tau_hyperbola(std::uint64_t x, std::uint64_t y, const Budget& budget) {
  if (y < 2) throw DomainError("psi_tau_hyperbola: y must be >= 2");
  if (x == 0) return 0;
  const PsiTable table(x, y, budget);
  std::uint64_t total = 0;
  FriableEnumeration e(x, y, budget);
  e.for_each([&](const FriableTerm& t) { total += table(x / t.n); });
  return total;
}

// ---------------------------------------------------------------------------
// D(x, y, z)

namespace {

class PowerSumRecurrence {
 public:
  PowerSumRecurrence(const PrimeTable& primes, double alpha, std::uint64_t leaf_max,
                     const Budget& budget)
      : primes_(primes), alpha_(alpha), budget_(budget) {
    weights_.reserve(primes.size());
    for (double lp : primes.logs()) weights_.push_back(std::exp(-alpha * lp));
    // prefix[m] = sum_{n <= m} n^{-alpha}
    prefix_.assign(leaf_max + 1, 0.0);
    NeumaierSum acc;
    for (std::uint64_t m = 1; m <= leaf_max; ++m) {
      acc += std::pow(static_cast<double>(m), -alpha);
      prefix_[m] = acc.value();
    }
  }

  double sum(std::uint64_t x, std::size_t k) {
    if (x == 0) return 0.0;
    const std::size_t all = primes_.count_upto(x);
    k = std::min(k, all);
    if (k == 0) return 1.0;
    if (k == all && x < prefix_.size()) return prefix_[x];
    if (k == 1) {
      // 1 + 2^-a + ... + 2^{-e a}, e = floor(log2 x)
      const auto e = static_cast<double>(std::bit_width(x) - 1);
      const double q = weights_[0];
      if (q == 1.0) return e + 1.0;
      return -std::expm1((e + 1.0) * std::log(q)) / -std::expm1(std::log(q));
    }
    if (++nodes_ > budget_.max_terms) {
      throw ResourceError("d_exact: recursion exceeded node budget " +
                          std::to_string(budget_.max_terms));
    }
    NeumaierSum acc;
    acc += 1.0;
    for (std::size_t i = 0; i < k; ++i) acc += weights_[i] * sum(x / primes_[i], i + 1);
    return acc.value();
  }

 private:
  const PrimeTable& primes_;
  double alpha_;
  Budget budget_;
  std::vector<double> weights_;
  std::vector<double> prefix_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

double friable_power_sum(std::uint64_t z, std::uint64_t y, double alpha, const Budget& budget) {
  if (y < 2) throw DomainError("d_exact: y must be >= 2");
  if (!(alpha >= 0.0)) throw DomainError("d_exact: alpha must be >= 0");
  if (z == 0) return 0.0;
  if (z == 1) return 1.0;
  const std::uint64_t bound = std::min(y, z);
  if (bound < 2) return 1.0;
  const PrimeTable primes = sieve_primes(bound, budget);
  // Leaves are reached only with x <= p_k <= min(y, z).
  const std::uint64_t leaf_max = std::min(y, z);
  if (leaf_max > budget.max_sieve) throw ResourceError("d_exact: leaf table exceeds sieve cap");
  PowerSumRecurrence rec(primes, alpha, leaf_max, budget);
  return rec.sum(z, primes.size());
}

double d_exact(std::uint64_t z, std::uint64_t y, double alpha, const Budget& budget) {
  if (!(alpha > 0.0)) throw DomainError("d_exact: alpha must be > 0");
  if (y == 2) {
    return z == 0 ? 0.0 : d_exact_two(std::log(static_cast<double>(z)), alpha);
  }
  return friable_power_sum(z, y, alpha, budget);
}

double d_exact_two(double log_z, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("d_exact: alpha must be > 0");
  if (log_z < 0.0) return 0.0;
  // floor(log_z / log 2), robust to the rounding of log(2^k)
  const double ratio = log_z / std::log(2.0);
  const double k = std::floor(ratio * (1.0 + 4e-15) + 1e-12);
  const double log_q = -alpha * std::log(2.0);
  return std::expm1((k + 1.0) * log_q) / std::expm1(log_q);
}

}  // namespace friable
