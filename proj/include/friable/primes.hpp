#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace friable {

// Budgets for the exact counting layer. Defaults can be overridden by the
// FRIABLE_BUDGET environment variable (see default_budget()).
struct Budget {
  std::uint64_t max_terms = 100'000'000;    // friable terms / recursion nodes
  std::uint64_t max_sieve = 100'000'000;    // largest sieve bound
};

Budget default_budget();

/// Primes up to `bound` with their natural logarithms.
class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::uint64_t bound, std::vector<std::uint64_t> primes);

  std::uint64_t bound() const { return bound_; }
  std::size_t size() const { return primes_.size(); }
  bool empty() const { return primes_.empty(); }

  std::span<const std::uint64_t> primes() const { return primes_; }
  std::span<const double> logs() const { return logs_; }
  std::uint64_t operator[](std::size_t i) const { return primes_[i]; }
  std::uint64_t largest() const { return primes_.back(); }

  // Number of primes <= b (b may exceed bound(); then the count is capped).
  std::size_t count_upto(std::uint64_t b) const;
  bool contains(std::uint64_t p) const;

 private:
  std::uint64_t bound_ = 0;
  std::vector<std::uint64_t> primes_;
  std::vector<double> logs_;
};

/// Sieve of Eratosthenes over odd numbers.
/// Throws DomainError for y < 2 and ResourceError above budget.max_sieve.
PrimeTable sieve_primes(std::uint64_t y, const Budget& budget = default_budget());

// Largest prime factor of every n in [0, n_max]; lpf[0] = 0 and lpf[1] = 1.
std::vector<std::uint32_t> largest_prime_factors(std::uint32_t n_max);

// True iff every prime factor of n is <= y (P+(1) = 1).
bool is_friable(std::uint64_t n, std::uint64_t y);

// One element of S(x, y) together with its factorization over the prime
// table the enumeration was built with. `exponents[i]` belongs to primes[i].
struct FriableTerm {
  std::uint64_t n;
  std::span<const std::uint32_t> exponents;
};

/// Depth-first stream over S(x, y): primes descending, exponents ascending.
/// Each element is produced exactly once; n = 1 comes first.
class FriableEnumeration {
 public:
  FriableEnumeration(std::uint64_t x_limit, std::uint64_t y_limit,
                     const Budget& budget = default_budget());

  std::uint64_t x_limit() const { return x_limit_; }
  std::uint64_t y_limit() const { return y_limit_; }
  const PrimeTable& primes() const { return primes_; }

  // Fetches the next term; returns false once the stream is exhausted.
  bool next(FriableTerm& out);

  // Visits the whole stream. Throws ResourceError when more than
  // budget.max_terms terms would be produced.
  void for_each(const std::function<void(const FriableTerm&)>& visit);

 private:
  std::uint64_t x_limit_;
  std::uint64_t y_limit_;
  Budget budget_;
  PrimeTable primes_;
  std::vector<std::uint32_t> exponents_;
  std::vector<std::uint64_t> values_;
  std::uint64_t current_ = 0;
  std::uint64_t emitted_ = 0;
  bool started_ = false;
  bool done_ = false;
};

std::vector<std::uint64_t> enumerate_friable(std::uint64_t x, std::uint64_t y,
                                             const Budget& budget = default_budget());

/// |S(x, y)| by the Buchstab recurrence
///   Psi(x, p_k) = Psi(x, p_{k-1}) + Psi(x / p_k, p_k),
/// memoized on (floor(x), k) for small arguments.
std::uint64_t psi_exact(std::uint64_t x, std::uint64_t y,
                        const Budget& budget = default_budget());

// Same, reusing a prime table whose bound is at least min(x, y).
std::uint64_t psi_exact(std::uint64_t x, std::uint64_t y, const PrimeTable& primes,
                        const Budget& budget = default_budget());

/// Psi(m, y) for every 0 <= m <= n_max at a fixed y, from a largest prime
/// factor sieve. Used when many values of Psi(., y) are needed at once.
class PsiTable {
 public:
  PsiTable(std::uint64_t n_max, std::uint64_t y, const Budget& budget = default_budget());
  std::uint64_t operator()(std::uint64_t m) const { return counts_.at(m); }
  std::uint64_t n_max() const { return counts_.size() - 1; }
  std::uint64_t y() const { return y_; }

 private:
  std::uint64_t y_;
  std::vector<std::uint32_t> counts_;
};

/// Runs the Buchstab recurrence level by level over all x <= n_max at once:
/// after processing prime p_k, `psi[x] = Psi(x, p_k)` for every x. The
/// callback sees levels k = 0 (y < 2, Psi = 1 for x >= 1) through pi(n_max).
void psi_levels(std::uint32_t n_max,
                const std::function<void(std::uint64_t prime, std::span<const std::uint32_t> psi)>& visit);

/// Sum of tau(n) over S(x, y), summing the divisor count of each enumerated n.
std::uint64_t psi_tau_exact(std::uint64_t x, std::uint64_t y,
                            const Budget& budget = default_budget());

/// The same quantity by the hyperbola form sum_{d in S(x,y)} Psi(x/d, y).
std::uint64_t psi_tau_hyperbola(std::uint64_t x, std::uint64_t y,
                                const Budget& budget = default_budget());

/// sum_{n in S(z, y)} n^{-alpha}. alpha must be > 0; y = 2 uses the closed
/// geometric form. Compensated accumulation throughout.
double d_exact(std::uint64_t z, std::uint64_t y, double alpha,
               const Budget& budget = default_budget());

// The y = 2 closed form with z given by its logarithm.
double d_exact_two(double log_z, double alpha);

// d_exact without the alpha > 0 restriction (alpha = 0 counts S(z, y)).
double friable_power_sum(std::uint64_t z, std::uint64_t y, double alpha,
                         const Budget& budget = default_budget());

}  // namespace friable
