#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "morphmc/numeric.hpp"
#include "morphmc/target.hpp"

namespace morphmc {

/// One multinomial observation: response counts, prior cell probabilities,
/// prior sample size, and the model matrix (one row per response category,
/// one column per regression coefficient).
struct MlogitObservation {
  Eigen::VectorXd counts;
  Eigen::VectorXd prior_prob;
  double prior_size = 0.0;
  Eigen::MatrixXd model_matrix;
};

/// Log unnormalized posterior of multinomial logit regression under the
/// conjugate prior that adds prior_prob * prior_size pseudo-counts to each
/// cell:
///
///   sum_l (y^l + xi^l nu^l) . M^l b - (n^l + nu^l) logsumexp(M^l b).
///
/// Requires data (actual plus prior) in every cell. Concave; its gradient
/// norm stays bounded as |b| grows, making the density exponentially light.
class MlogitPosterior {
 public:
  explicit MlogitPosterior(std::vector<MlogitObservation> observations)
      : obs_(std::move(observations)) {
    if (obs_.empty())
      throw std::invalid_argument("mlogit: at least one observation required");
    k_ = static_cast<int>(obs_.front().model_matrix.cols());
    for (std::size_t l = 0; l < obs_.size(); ++l) {
      const auto& o = obs_[l];
      const auto rows = o.model_matrix.rows();
      if (rows < 2)
        throw std::invalid_argument("mlogit: need at least two categories");
      if (o.counts.size() != rows || o.prior_prob.size() != rows)
        throw std::invalid_argument(
            "mlogit: counts/prior_prob must have one entry per category");
      if (o.model_matrix.cols() != k_)
        throw std::invalid_argument(
            "mlogit: model matrices must share the coefficient dimension");
      if (!(o.prior_size >= 0.0))
        throw std::invalid_argument("mlogit: prior_size must be >= 0");
      if (std::abs(o.prior_prob.sum() - 1.0) > 1e-8 ||
          (o.prior_prob.array() < 0.0).any())
        throw std::invalid_argument(
            "mlogit: prior_prob must be a probability vector");
      if ((o.counts.array() < 0.0).any())
        throw std::invalid_argument("mlogit: counts must be >= 0");
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (!(o.counts(i) + o.prior_prob(i) * o.prior_size > 0.0))
          throw std::invalid_argument(
              "mlogit: cell " + std::to_string(i) + " of observation " +
              std::to_string(l) +
              " has no data (actual plus prior counts are zero)");
      }
    }
  }

  int dimension() const { return k_; }
  const std::vector<MlogitObservation>& observations() const { return obs_; }

  double log_density(const Eigen::VectorXd& beta) const {
    double total = 0.0;
    for (const auto& o : obs_) {
      const Eigen::VectorXd lin = o.model_matrix * beta;
      const Eigen::VectorXd cell = o.counts + o.prior_size * o.prior_prob;
      const double n_plus_nu = o.counts.sum() + o.prior_size;
      total += cell.dot(lin) - n_plus_nu * log_sum_exp(lin);
    }
    return total;
  }

  Eigen::VectorXd grad_log_density(const Eigen::VectorXd& beta) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(k_);
    for (const auto& o : obs_) {
      const Eigen::VectorXd lin = o.model_matrix * beta;
      const Eigen::VectorXd cell = o.counts + o.prior_size * o.prior_prob;
      const double n_plus_nu = o.counts.sum() + o.prior_size;
      g += o.model_matrix.transpose() * (cell - n_plus_nu * softmax(lin));
    }
    return g;
  }

  TargetDensity as_target() const {
    auto self = *this;
    return TargetDensity(
        k_, [self](const Eigen::VectorXd& b) { return self.log_density(b); },
        [self](const Eigen::VectorXd& b) { return self.grad_log_density(b); });
  }

 private:
  std::vector<MlogitObservation> obs_;
  int k_;
};

}  // namespace morphmc
