#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "friable/saddle.hpp"

namespace friable {

/// Philox4x32-10 counter-based generator: a pure function of
/// (key, counter), so draws do not depend on evaluation order.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}
  Counter operator()(Counter counter) const;

  // Uniform in (0, 1] from the counter (draw index, stream index).
  double uniform(std::uint64_t draw, std::uint32_t stream) const;

 private:
  std::array<std::uint32_t, 2> key_;
};

/// One integer drawn from P_{x,y}: n = prod p^{v_p} with independent
/// geometric exponents, P(v_p = k) = (1 - p^{-alpha}) p^{-k alpha}.
/// n itself is never formed.
struct FriableSample {
  std::vector<std::uint32_t> exponents;  // aligned with the prime table
  double log_n = 0.0;
};

struct SampleStats {
  std::uint64_t n_draws = 0;
  double mean_log_n = 0.0;
  double var_log_n = 0.0;
  double frac_le_z = 0.0;
  double ci_halfwidth = 0.0;  // 95 %, normal approximation
};

struct ExponentHistogram {
  std::uint64_t prime = 0;
  std::vector<std::uint64_t> counts;  // counts[k] = #draws with v_p = k
  double mean = 0.0;
  double expected_mean = 0.0;  // p^{-alpha} / (1 - p^{-alpha})
  double chi_square = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

class FriableSampler {
 public:
  FriableSampler(const SaddlePoint& sp, std::uint64_t seed);

  const SaddlePoint& saddle() const { return sp_; }
  const PrimeTable& primes() const { return *primes_; }

  // Draw number `index` of this seed's stream.
  FriableSample draw(std::uint64_t index) const;
  double draw_log_n(std::uint64_t index) const;
  std::uint32_t draw_exponent(std::uint64_t index, std::size_t prime_index) const;

 private:
  SaddlePoint sp_;
  std::shared_ptr<const PrimeTable> primes_;
  Philox4x32 rng_;
  std::vector<double> inv_rate_;  // -1 / (alpha log p)
};

FriableSample sample_friable(const SaddlePoint& sp, std::uint64_t seed, std::uint64_t index = 0);

/// Empirical P(x, y, z) and moments of log n from draws 0..n_draws-1.
SampleStats estimate_p(const SaddlePoint& sp, double log_z, std::uint64_t n_draws, std::uint64_t seed);

/// Exponent distribution of prime p with a chi-square test against the
/// geometric law (bins with expected count < 5 are pooled into the tail).
ExponentHistogram exponent_histogram(const SaddlePoint& sp, std::uint64_t p, std::uint64_t n_draws,
                                     std::uint64_t seed);

}  // namespace friable
