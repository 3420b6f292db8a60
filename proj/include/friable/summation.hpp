#pragma once

#include <cmath>
#include <limits>

namespace friable {

// Neumaier's variant of Kahan summation.
class NeumaierSum {
 public:
  NeumaierSum& operator+=(double term) {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      comp_ += (sum_ - t) + term;
    } else {
      comp_ += (term - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Accumulates sum_i w_i * exp(l_i) as a logarithm with a running max shift,
// so that exponents far outside the double range never overflow.
class LogSumExp {
 public:
  void add(double log_term, double weight = 1.0) {
    if (weight <= 0.0 || log_term == -std::numeric_limits<double>::infinity()) return;
    const double lt = log_term + std::log(weight);
    if (lt <= shift_) {
      acc_ += std::exp(lt - shift_);
    } else {
      acc_ = acc_ * std::exp(shift_ - lt) + 1.0;
      shift_ = lt;
    }
  }
  double log_value() const {
    return acc_ > 0.0 ? shift_ + std::log(acc_) : -std::numeric_limits<double>::infinity();
  }

 private:
  double shift_ = -std::numeric_limits<double>::infinity();
  double acc_ = 0.0;
};

}  // namespace friable
