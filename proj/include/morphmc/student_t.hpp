#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "morphmc/target.hpp"

namespace morphmc {

/// Multivariate t distribution with nu degrees of freedom, location mu and
/// positive-definite scale matrix Sigma. The log density includes the
/// normalizing constant; the gradient is
///   -(nu + k) Sigma^{-1}(t - mu) / (nu + (t - mu)' Sigma^{-1} (t - mu)),
/// so t . grad log pi -> -(nu + k) along any ray, the sub-exponential
/// signature of the family.
class MultivariateT {
 public:
  MultivariateT(double nu, Eigen::VectorXd mu, Eigen::MatrixXd sigma)
      : nu_(nu), mu_(std::move(mu)) {
    if (!(nu_ > 0.0))
      throw std::invalid_argument("multivariate t: nu must be > 0");
    const int k = dimension();
    if (sigma.rows() != k || sigma.cols() != k)
      throw std::invalid_argument("multivariate t: scale matrix must be k x k");
    if (!sigma.isApprox(sigma.transpose(), 1e-12))
      throw std::invalid_argument("multivariate t: scale matrix must be symmetric");
    llt_.compute(sigma);
    if (llt_.info() != Eigen::Success)
      throw std::invalid_argument(
          "multivariate t: scale matrix is not positive-definite");
    const double half_log_det =
        llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
    log_normalizer_ = std::lgamma(0.5 * (nu_ + k)) - std::lgamma(0.5 * nu_) -
                      0.5 * k * std::log(nu_ * std::numbers::pi) -
                      half_log_det;
  }

  int dimension() const { return static_cast<int>(mu_.size()); }
  double nu() const { return nu_; }
  const Eigen::VectorXd& mu() const { return mu_; }
  double log_normalizer() const { return log_normalizer_; }

  // Both evaluations factor out |t - mu| first: the quadratic form itself
  // overflows beyond |t| ~ 1e154, and the morphed samplers do probe that
  // far out.
  double log_density(const Eigen::VectorXd& t) const {
    const Eigen::VectorXd v = t - mu_;
    const double c = v.stableNorm();
    if (c == 0.0) return log_normalizer_;
    const double qz = llt_.matrixL().solve(v / c).squaredNorm();
    const double log1pq = (c < 1e100)
                              ? std::log1p(c * c * qz / nu_)
                              : 2.0 * std::log(c) + std::log(qz / nu_);
    return log_normalizer_ - 0.5 * (nu_ + dimension()) * log1pq;
  }

  Eigen::VectorXd grad_log_density(const Eigen::VectorXd& t) const {
    const Eigen::VectorXd v = t - mu_;
    const double c = v.stableNorm();
    if (c == 0.0) return Eigen::VectorXd::Zero(dimension());
    const Eigen::VectorXd w = llt_.solve(v / c);  // Sigma^{-1} direction
    const double qz = (v / c).dot(w);
    const double denom = nu_ / c + c * qz;
    return (-(nu_ + dimension()) / denom) * w;
  }

  TargetDensity as_target() const {
    MultivariateT self = *this;
    return TargetDensity(
        dimension(),
        [self](const Eigen::VectorXd& t) { return self.log_density(t); },
        [self](const Eigen::VectorXd& t) { return self.grad_log_density(t); });
  }

 private:
  double nu_;
  Eigen::VectorXd mu_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_normalizer_;
};

}  // namespace morphmc
