#pragma once

#include <cmath>
#include <cstddef>
#include <Eigen/Core>

#include "friable/summation.hpp"

namespace friable {

/// Gauss-Legendre rule on [-1, 1]. Nodes come from the Golub-Welsch
/// eigenproblem and are polished by Newton steps on P_n.
class GaussLegendre {
 public:
  explicit GaussLegendre(int n);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  // Integral of f over [a, b] split into `panels` equal subintervals.
  template <typename F>
  double integrate(F&& f, double a, double b, int panels = 1) const {
    NeumaierSum acc;
    const double width = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
      const double lo = a + k * width;
      const double half = 0.5 * width;
      const double mid = lo + half;
      for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
        acc += half * weights_[i] * f(mid + half * nodes_[i]);
      }
    }
    return acc.value();
  }

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

// Shared 64-point rule.
const GaussLegendre& gauss_legendre_64();

// Integral over [a, b] with one 64-point panel per unit of length (at least one).
template <typename F>
double integrate_unit_panels(F&& f, double a, double b) {
  if (b == a) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) - 1e-12)));
  return gauss_legendre_64().integrate(f, a, b, panels);
}

}  // namespace friable
