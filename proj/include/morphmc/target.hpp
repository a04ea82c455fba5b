#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace morphmc {

/// An unnormalized log density on R^k with an optional gradient. -inf marks
/// zero density. Evaluator callables must be effect-free; instances are
/// immutable and may be shared across threads when the evaluators are.
class TargetDensity {
 public:
  using LogDensityFn = std::function<double(const Eigen::VectorXd&)>;
  using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  TargetDensity(int dimension, LogDensityFn log_density, GradFn grad = {})
      : dimension_(dimension),
        log_density_(std::move(log_density)),
        grad_(std::move(grad)) {
    if (dimension_ < 1)
      throw std::invalid_argument("target density: dimension must be positive");
    if (!log_density_)
      throw std::invalid_argument("target density: log-density fn required");
  }

  int dimension() const { return dimension_; }
  bool has_gradient() const { return static_cast<bool>(grad_); }

  double log_density(const Eigen::VectorXd& x) const {
    check(x);
    return log_density_(x);
  }

  Eigen::VectorXd grad_log_density(const Eigen::VectorXd& x) const {
    if (!grad_)
      throw std::logic_error("target density: no gradient available");
    check(x);
    return grad_(x);
  }

 private:
  void check(const Eigen::VectorXd& x) const {
    if (x.size() != dimension_)
      throw std::invalid_argument("target density: expected dimension " +
                                  std::to_string(dimension_) + ", got " +
                                  std::to_string(x.size()));
  }

  int dimension_;
  LogDensityFn log_density_;
  GradFn grad_;
};

/// Isotropic Gaussian reference target, unnormalized:
/// log pi(x) = -|x - mean|^2 / (2 sd^2).
inline TargetDensity gaussian_target(Eigen::VectorXd mean, double sd = 1.0) {
  if (!(sd > 0.0))
    throw std::invalid_argument("gaussian target: sd must be > 0");
  const double inv_var = 1.0 / (sd * sd);
  const int k = static_cast<int>(mean.size());
  auto logd = [mean, inv_var](const Eigen::VectorXd& x) {
    return -0.5 * inv_var * (x - mean).squaredNorm();
  };
  auto grad = [mean, inv_var](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(-inv_var * (x - mean));
  };
  return TargetDensity(k, std::move(logd), std::move(grad));
}

}  // namespace morphmc
