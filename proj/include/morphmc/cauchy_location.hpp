#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "morphmc/target.hpp"

namespace morphmc {

/// Posterior of a Cauchy location model under a flat prior:
/// log pi(mu) = -sum_i log(1 + (x_i - mu)^2). One-dimensional.
class CauchyLocationPosterior {
 public:
  explicit CauchyLocationPosterior(std::vector<double> data)
      : data_(std::move(data)) {
    if (data_.empty())
      throw std::invalid_argument("cauchy location: data must be nonempty");
  }

  const std::vector<double>& data() const { return data_; }

  double log_density(double mu) const {
    double total = 0.0;
    for (double x : data_) {
      const double d = std::abs(x - mu);
      // d^2 overflows beyond ~1e154; log(1 + d^2) = 2 log d there
      total -= d < 1e100 ? std::log1p(d * d) : 2.0 * std::log(d);
    }
    return total;
  }

  double derivative(double mu) const {
    double total = 0.0;
    for (double x : data_) {
      const double d = x - mu;
      // 2d/(1 + d^2) rewritten so huge d cannot overflow the square
      total += d == 0.0 ? 0.0 : 2.0 / (1.0 / d + d);
    }
    return total;
  }

  TargetDensity as_target() const {
    auto self = *this;
    return TargetDensity(
        1,
        [self](const Eigen::VectorXd& m) { return self.log_density(m(0)); },
        [self](const Eigen::VectorXd& m) {
          Eigen::VectorXd g(1);
          g(0) = self.derivative(m(0));
          return g;
        });
  }

 private:
  std::vector<double> data_;
};

}  // namespace morphmc
