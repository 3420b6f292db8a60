#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

namespace friable {

/// A positive real bound carried by its logarithm, remembering the exact
/// integer when there is one that fits in 63 bits. Lets x = 2^4096 and
/// x = 10^6 flow through the same interfaces.
class Magnitude {
 public:
  static Magnitude from_integer(std::uint64_t n) { return Magnitude(std::log(static_cast<double>(n)), n); }
  static Magnitude from_log(double log_value) {
    std::optional<std::uint64_t> floor_value;
    if (log_value < 43.6) {  // e^43.6 < 2^63
      // snap to an integer lost to rounding in exp(log(n))
      const double v = std::exp(log_value);
      const double r = std::round(v);
      floor_value = static_cast<std::uint64_t>(std::abs(v - r) <= 1e-9 * v ? r : std::floor(v));
    }
    return Magnitude(log_value, floor_value, false);
  }

  double log() const { return log_; }
  // floor of the value, when representable
  std::optional<std::uint64_t> floor() const { return floor_; }
  bool is_exact_integer() const { return exact_; }

 private:
  Magnitude(double log_value, std::uint64_t n) : log_(log_value), floor_(n), exact_(true) {}
  Magnitude(double log_value, std::optional<std::uint64_t> f, bool exact)
      : log_(log_value), floor_(f), exact_(exact) {}

  double log_;
  std::optional<std::uint64_t> floor_;
  bool exact_;
};

}  // namespace friable
