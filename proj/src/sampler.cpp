#include "friable/sampler.hpp"

#include <cmath>
#include <string>
#include <boost/math/special_functions/gamma.hpp>

#include "friable/errors.hpp"
#include "friable/summation.hpp"

namespace friable {

Philox4x32::Counter Philox4x32::operator()(Counter c) const {
  constexpr std::uint64_t kMul0 = 0xD2511F53;
  constexpr std::uint64_t kMul1 = 0xCD9E8D57;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
  auto key = key_;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = kMul0 * c[0];
    const std::uint64_t p1 = kMul1 * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ key[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return c;
}

double Philox4x32::uniform(std::uint64_t draw, std::uint32_t stream) const {
  const Counter out = (*this)({static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32), stream, 0});
  const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 21) ^ (out[1] >> 11);
  return (static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) + 1.0) * 0x1p-53;
}

FriableSampler::FriableSampler(const SaddlePoint& sp, std::uint64_t seed)
    : sp_(sp), primes_(std::make_shared<const PrimeTable>(sieve_primes(sp.y))), rng_(seed) {
  if (!(sp.alpha > 0.0)) throw DomainError("FriableSampler: alpha must be > 0");
  inv_rate_.reserve(primes_->size());
  for (double lp : primes_->logs()) inv_rate_.push_back(-1.0 / (sp.alpha * lp));
}

std::uint32_t FriableSampler::draw_exponent(std::uint64_t index, std::size_t prime_index) const {
  // inverse transform: P(v >= k) = p^{-k alpha}
  const double u = rng_.uniform(index, static_cast<std::uint32_t>(prime_index));
  return static_cast<std::uint32_t>(std::floor(std::log(u) * inv_rate_[prime_index]));
}

FriableSample FriableSampler::draw(std::uint64_t index) const {
  FriableSample s;
  s.exponents.resize(primes_->size());
  NeumaierSum log_n;
  for (std::size_t i = 0; i < primes_->size(); ++i) {
    s.exponents[i] = draw_exponent(index, i);
    if (s.exponents[i] != 0) log_n += s.exponents[i] * primes_->logs()[i];
  }
  s.log_n = log_n.value();
  return s;
}

double FriableSampler::draw_log_n(std::uint64_t index) const {
  NeumaierSum log_n;
  for (std::size_t i = 0; i < primes_->size(); ++i) {
    const std::uint32_t v = draw_exponent(index, i);
    if (v != 0) log_n += v * primes_->logs()[i];
  }
  return log_n.value();
}

FriableSample sample_friable(const SaddlePoint& sp, std::uint64_t seed, std::uint64_t index) {
  return FriableSampler(sp, seed).draw(index);
}

SampleStats estimate_p(const SaddlePoint& sp, double log_z, std::uint64_t n_draws, std::uint64_t seed) {
  if (n_draws < 100) throw DomainError("estimate_p: need at least 100 draws");
  const FriableSampler sampler(sp, seed);
  const double slack = 1e-12 * std::max(1.0, std::abs(log_z));
  SampleStats st;
  st.n_draws = n_draws;
  std::uint64_t below = 0;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < n_draws; ++i) {
    const double l = sampler.draw_log_n(i);
    if (l <= log_z + slack) ++below;
    const double delta = l - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (l - mean);
  }
  const double n = static_cast<double>(n_draws);
  st.mean_log_n = mean;
  st.var_log_n = m2 / (n - 1.0);
  st.frac_le_z = static_cast<double>(below) / n;
  st.ci_halfwidth = 1.96 * std::sqrt(st.frac_le_z * (1.0 - st.frac_le_z) / n);
  return st;
}

ExponentHistogram exponent_histogram(const SaddlePoint& sp, std::uint64_t p, std::uint64_t n_draws,
                                     std::uint64_t seed) {
  if (p > sp.y) throw DomainError("exponent_histogram: p = " + std::to_string(p) + " exceeds y");
  const FriableSampler sampler(sp, seed);
  if (!sampler.primes().contains(p)) {
    throw DomainError("exponent_histogram: " + std::to_string(p) + " is not prime");
  }
  if (n_draws == 0) throw DomainError("exponent_histogram: need at least one draw");
  const std::size_t idx = sampler.primes().count_upto(p) - 1;

  ExponentHistogram hist;
  hist.prime = p;
  double total = 0.0;
  for (std::uint64_t i = 0; i < n_draws; ++i) {
    const std::uint32_t v = sampler.draw_exponent(i, idx);
    if (v >= hist.counts.size()) hist.counts.resize(v + 1, 0);
    ++hist.counts[v];
    total += v;
  }
  const double n = static_cast<double>(n_draws);
  const double q = std::exp(-sp.alpha * std::log(static_cast<double>(p)));
  hist.mean = total / n;
  hist.expected_mean = q / (1.0 - q);

  // bins 0..K-1 individually, K.. pooled; K is the first bin whose tail
  // expectation n q^K drops below 5
  std::size_t k_max = 0;
  while (n * std::pow(q, static_cast<double>(k_max + 1)) >= 5.0) ++k_max;
  double chi = 0.0;
  std::uint64_t seen = 0;
  for (std::size_t k = 0; k < k_max; ++k) {
    const double expected = n * (1.0 - q) * std::pow(q, static_cast<double>(k));
    const double observed = k < hist.counts.size() ? static_cast<double>(hist.counts[k]) : 0.0;
    seen += static_cast<std::uint64_t>(observed);
    chi += (observed - expected) * (observed - expected) / expected;
  }
  const double tail_expected = n * std::pow(q, static_cast<double>(k_max));
  const double tail_observed = static_cast<double>(n_draws - seen);
  chi += (tail_observed - tail_expected) * (tail_observed - tail_expected) / tail_expected;
  hist.chi_square = chi;
  hist.dof = static_cast<int>(k_max);  // k_max + 1 cells, one constraint
  hist.p_value = hist.dof > 0 ? boost::math::gamma_q(0.5 * hist.dof, 0.5 * chi) : 1.0;
  return hist;
}

}  // namespace friable
