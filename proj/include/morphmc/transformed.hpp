#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>

#include "morphmc/morph.hpp"
#include "morphmc/target.hpp"

namespace morphmc {

/// Density induced on gamma = h^{-1}(beta) by a target density and a morph:
///
///   log pi_gamma(gamma) = log pi_beta(h(gamma)) + log det grad-h(gamma)
///   grad log pi_gamma   = grad-h(gamma) . grad log pi_beta(h(gamma))
///                         + grad log det grad-h(gamma)
///
/// (grad-h is symmetric, so the row-vector convention collapses to a matrix
/// product). Sampling this density and mapping draws back through h yields
/// draws from the original target.
class TransformedDensity {
 public:
  TransformedDensity(TargetDensity target, Morph morph)
      : target_(std::move(target)), morph_(std::move(morph)) {
    if (target_.dimension() != morph_.dimension())
      throw std::invalid_argument(
          "transformed density: target and morph dimensions differ");
  }

  const TargetDensity& target() const { return target_; }
  const Morph& morph() const { return morph_; }
  int dimension() const { return target_.dimension(); }

  /// -inf propagates from the target; a gamma beyond the morph's overflow
  /// guard is a range error.
  double log_density(const Eigen::VectorXd& gamma) const {
    const double lp = target_.log_density(morph_.apply(gamma));
    if (lp == -std::numeric_limits<double>::infinity()) return lp;
    return lp + morph_.log_det_jacobian(gamma);
  }

  /// Like log_density but treats a gamma beyond the guard radius as zero
  /// density instead of erroring; this is the sampler's evaluation path.
  double log_density_or_rejected(const Eigen::VectorXd& gamma) const {
    if (!(gamma.norm() <= morph_.guard_radius()))
      return -std::numeric_limits<double>::infinity();
    return log_density(gamma);
  }

  Eigen::VectorXd grad_log_density(const Eigen::VectorXd& gamma) const {
    const Eigen::VectorXd g_beta =
        target_.grad_log_density(morph_.apply(gamma));
    const double r = gamma.norm();
    if (r < Morph::kNearZeroRadius)
      return morph_.radial_derivative_at_zero() * g_beta;
    // grad-h g = (f/r) g + (f' - f/r) (u.g) u with u = gamma/r
    const RadialDerivs d = morph_.radial_derivs(r);
    const Eigen::VectorXd u = gamma / r;
    const Eigen::VectorXd jg =
        (d.value / r) * g_beta + (d.first - d.value / r) * u.dot(g_beta) * u;
    return jg + morph_.grad_log_det_jacobian(gamma);
  }

  /// View of the induced density as a target in its own right (for the tail
  /// and curvature probes). Gradient present iff the target has one.
  TargetDensity as_target() const {
    auto self = *this;
    TargetDensity::GradFn grad;
    if (target_.has_gradient())
      grad = [self](const Eigen::VectorXd& g) {
        return self.grad_log_density(g);
      };
    return TargetDensity(
        dimension(),
        [self](const Eigen::VectorXd& g) { return self.log_density(g); },
        std::move(grad));
  }

 private:
  TargetDensity target_;
  Morph morph_;
};

}  // namespace morphmc
