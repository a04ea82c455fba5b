#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "morphmc/radial.hpp"

namespace morphmc {

/// Translation-plus-isotropic transformation pipeline on R^k:
///
///   h(gamma) = center + f(|gamma|) * gamma / |gamma|,   h(0) = center,
///
/// where f is the composition of one or two scalar radial stages applied in
/// order (a polynomial stage, optionally followed by an exponential stage).
/// The map is a diffeomorphism with everywhere-positive Jacobian
/// determinant; draws of the transformed variable gamma map back to the
/// original variable beta = h(gamma). Instances are immutable and safe to
/// share across threads.
class Morph {
 public:
  /// |gamma| below this uses the gamma = 0 limit formulas for the Jacobian
  /// quantities; the general expressions are 0/0 at the origin.
  static constexpr double kNearZeroRadius = 1e-8;

  Morph(Eigen::VectorXd center, RadialFamily stage)
      : Morph(std::move(center), std::vector<RadialFamily>{std::move(stage)}) {}

  Morph(Eigen::VectorXd center, RadialFamily first, RadialFamily second)
      : Morph(std::move(center),
              std::vector<RadialFamily>{std::move(first), std::move(second)}) {}

  Morph(Eigen::VectorXd center, std::vector<RadialFamily> stages)
      : center_(std::move(center)), stages_(std::move(stages)) {
    if (center_.size() < 1)
      throw std::invalid_argument("morph: dimension must be positive");
    if (stages_.empty())
      throw std::invalid_argument("morph: at least one radial stage required");
    guard_radius_ = pull_back_guard();
    deriv_at_zero_ = 1.0;
    for (const auto& st : stages_) deriv_at_zero_ *= st.derivative_at_zero();
  }

  /// Identity map on R^k (the untransformed sampler uses this).
  static Morph identity(int k) {
    return Morph(Eigen::VectorXd::Zero(k), RadialFamily::identity());
  }

  int dimension() const { return static_cast<int>(center_.size()); }
  const Eigen::VectorXd& center() const { return center_; }
  const std::vector<RadialFamily>& stages() const { return stages_; }

  /// Largest |gamma| for which every stage evaluates below its overflow
  /// guard. Beyond it the forward map would overflow.
  double guard_radius() const { return guard_radius_; }

  /// Composite radial map f(s) = f_last(... f_first(s)).
  double radial_value(double s) const {
    for (const auto& st : stages_) s = st.value(s);
    return s;
  }

  /// Composite f, f', f'' by the chain rule through the stages.
  RadialDerivs radial_derivs(double s) const {
    RadialDerivs acc{s, 1.0, 0.0};
    for (const auto& st : stages_) {
      const RadialDerivs d = st.derivs(acc.value);
      acc.second = d.second * acc.first * acc.first + d.first * acc.second;
      acc.first = d.first * acc.first;
      acc.value = d.value;
    }
    return acc;
  }

  /// Inverse of the composite radial map (stages unwound in reverse).
  double radial_inverse(double t) const {
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it)
      t = it->inverse(t);
    return t;
  }

  /// f'(0) of the composite radial map.
  double radial_derivative_at_zero() const { return deriv_at_zero_; }

  /// beta = h(gamma). Direction is preserved; gamma = 0 maps to the center.
  Eigen::VectorXd apply(const Eigen::VectorXd& gamma) const {
    const double r = radius_checked(gamma);
    if (r == 0.0) return center_;
    return center_ + (radial_value(r) / r) * gamma;
  }

  /// gamma = h^{-1}(beta); stages are inverted innermost-last.
  Eigen::VectorXd inverse(const Eigen::VectorXd& beta) const {
    check_dimension(beta);
    const Eigen::VectorXd v = beta - center_;
    const double r = v.stableNorm();
    if (r == 0.0) return Eigen::VectorXd::Zero(dimension());
    return (radial_inverse(r) / r) * v;
  }

  /// Jacobian of h: a symmetric matrix with eigenvalue f'(|gamma|) along
  /// gamma and f(|gamma|)/|gamma| on the orthogonal complement; f'(0) I at
  /// the origin. The translation stage contributes the identity.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& gamma) const {
    const double r = radius_checked(gamma);
    const int k = dimension();
    if (r < kNearZeroRadius)
      return deriv_at_zero_ * Eigen::MatrixXd::Identity(k, k);
    const RadialDerivs d = radial_derivs(r);
    const double iso = d.value / r;
    const double aniso = (d.first - iso) / (r * r);
    // both triangles filled from one product so the result is exactly
    // symmetric as computed
    Eigen::MatrixXd j(k, k);
    for (int col = 0; col < k; ++col) {
      for (int row = 0; row <= col; ++row) {
        const double v = aniso * (gamma(row) * gamma(col));
        j(row, col) = v;
        j(col, row) = v;
      }
      j(col, col) += iso;
    }
    return j;
  }

  /// log det of the Jacobian, accumulated stage by stage:
  /// sum_i [ log f_i'(s_i) + (k-1) log(f_i(s_i)/s_i) ] with s_1 = |gamma|,
  /// s_{i+1} = f_i(s_i); k log f'(0) at the origin. Always finite.
  double log_det_jacobian(const Eigen::VectorXd& gamma) const {
    const double r = radius_checked(gamma);
    const int k = dimension();
    if (r < kNearZeroRadius) return k * std::log(deriv_at_zero_);
    double total = 0.0;
    double s = r;
    for (const auto& st : stages_) {
      const RadialDerivs d = st.derivs(s);
      total += std::log(d.first) + (k - 1) * std::log(d.value / s);
      s = d.value;
    }
    return total;
  }

  /// Gradient of log det Jacobian. Radially symmetric, so it is the radial
  /// derivative times gamma/|gamma|; per stage that derivative is
  ///   [ f''/f' + (k-1)(f'/f - 1/s) ] ds/dr,
  /// with ds/dr the chain-rule prefix. Zero at (and near) the origin, where
  /// the determinant's circular contours flatten out.
  Eigen::VectorXd grad_log_det_jacobian(const Eigen::VectorXd& gamma) const {
    const double r = radius_checked(gamma);
    const int k = dimension();
    if (r < kNearZeroRadius) return Eigen::VectorXd::Zero(k);
    double radial = 0.0;
    double s = r;
    double prefix = 1.0;  // d s_i / d r
    for (const auto& st : stages_) {
      const RadialDerivs d = st.derivs(s);
      radial +=
          (d.second / d.first + (k - 1) * (d.first / d.value - 1.0 / s)) *
          prefix;
      prefix *= d.first;
      s = d.value;
    }
    return (radial / r) * gamma;
  }

 private:
  void check_dimension(const Eigen::VectorXd& v) const {
    if (v.size() != center_.size())
      throw std::invalid_argument("morph: expected a vector of length " +
                                  std::to_string(center_.size()) + ", got " +
                                  std::to_string(v.size()));
  }

  double radius_checked(const Eigen::VectorXd& gamma) const {
    check_dimension(gamma);
    const double r = gamma.stableNorm();
    if (!(r <= guard_radius_))
      throw std::range_error("morph: |gamma| = " + std::to_string(r) +
                             " exceeds overflow guard radius " +
                             std::to_string(guard_radius_));
    return r;
  }

  // Largest input radius keeping every stage below its own guard.
  double pull_back_guard() const {
    double r = stages_.back().guard();
    for (auto it = std::next(stages_.rbegin()); it != stages_.rend(); ++it) {
      const double g = it->guard();
      r = (it->value(g) <= r) ? g : std::min(it->inverse(r), g);
    }
    return r;
  }

  Eigen::VectorXd center_;
  std::vector<RadialFamily> stages_;
  double guard_radius_ = 0.0;
  double deriv_at_zero_ = 1.0;
};

}  // namespace morphmc
