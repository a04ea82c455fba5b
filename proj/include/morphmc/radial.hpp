#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace morphmc {

/// Value and first two derivatives of a scalar radial map at one point.
struct RadialDerivs {
  double value;
  double first;
  double second;
};

enum class RadialKind { Identity, Polynomial, ExponentialSub };

namespace detail {

// Root of a strictly increasing g on [lo, hi] with g(lo) <= target <= g(hi).
// Newton steps are kept inside the shrinking bracket; out-of-bracket or
// non-finite steps fall back to bisection, so termination only needs
// monotonicity of g.
template <typename F, typename DF>
double newton_increasing(F&& g, DF&& dg, double target, double lo, double hi,
                         double x0) {
  constexpr int max_iter = 200;
  constexpr double rel_tol = 1e-12;
  double x = std::clamp(x0, lo, hi);
  for (int i = 0; i < max_iter; ++i) {
    const double resid = g(x) - target;
    if (std::abs(resid) <= rel_tol * std::abs(target)) return x;
    (resid < 0.0 ? lo : hi) = x;
    if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * hi)
      return 0.5 * (lo + hi);
    const double d = dg(x);
    double next = x - resid / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) return x;
    x = next;
  }
  throw std::runtime_error(
      "radial inverse: no convergence after 200 iterations; last bracket [" +
      std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace detail

/// Scalar radial map f: [0, inf) -> [0, inf) used to build isotropic
/// transformations. Three families:
///   Identity         f(s) = s
///   Polynomial       f(s) = s for s < R, s + (s - R)^p for s >= R
///                    (R >= 0, p > 2; conditioning degrades as p -> 2)
///   ExponentialSub   f(s) = s^3 b^3 e/6 + s b e/2 for s <= 1/b,
///                    e^{bs} - e/3 for s > 1/b   (b > 0)
/// Each family is twice continuously differentiable with f(0) = 0,
/// f'(s) > 0 and f''(0) = 0, and is evaluated only below an overflow
/// guard radius so values and derivatives stay finite.
class RadialFamily {
 public:
  static RadialFamily identity() { return RadialFamily(RadialKind::Identity); }

  static RadialFamily polynomial(double R, double p) {
    if (!(R >= 0.0))
      throw std::invalid_argument("polynomial radial family: R must be >= 0");
    if (!(p > 2.0))
      throw std::invalid_argument("polynomial radial family: p must be > 2");
    RadialFamily f(RadialKind::Polynomial);
    f.R_ = R;
    f.p_ = p;
    // keep (s - R)^p comfortably below the largest finite double
    f.guard_ = R + std::exp(std::log(std::numeric_limits<double>::max() / 64.0) / p);
    return f;
  }

  static RadialFamily exponential_sub(double b) {
    if (!(b > 0.0))
      throw std::invalid_argument(
          "exponential radial family: b must be > 0");
    RadialFamily f(RadialKind::ExponentialSub);
    f.b_ = b;
    f.guard_ = std::log(std::numeric_limits<double>::max()) / b - 1.0;
    return f;
  }

  RadialKind kind() const { return kind_; }
  double R() const { return R_; }
  double p() const { return p_; }
  double b() const { return b_; }

  /// Largest admissible argument; evaluating above it is a range error.
  double guard() const { return guard_; }

  /// Radius where the piecewise definition switches branch, if any.
  std::optional<double> branch_radius() const {
    switch (kind_) {
      case RadialKind::Polynomial: return R_;
      case RadialKind::ExponentialSub: return 1.0 / b_;
      default: return std::nullopt;
    }
  }

  /// f'(0), the common eigenvalue of the induced map's Jacobian at zero.
  double derivative_at_zero() const {
    switch (kind_) {
      case RadialKind::ExponentialSub: return b_ * std::numbers::e / 2.0;
      default: return 1.0;
    }
  }

  double value(double s) const {
    check_argument(s);
    switch (kind_) {
      case RadialKind::Identity: return s;
      case RadialKind::Polynomial:
        return s < R_ ? s : s + std::pow(s - R_, p_);
      case RadialKind::ExponentialSub: {
        constexpr double e = std::numbers::e;
        if (s > 1.0 / b_) return std::exp(b_ * s) - e / 3.0;
        return s * s * s * (b_ * b_ * b_ * e / 6.0) + s * (b_ * e / 2.0);
      }
    }
    return 0.0;  // unreachable
  }

  RadialDerivs derivs(double s) const {
    check_argument(s);
    switch (kind_) {
      case RadialKind::Identity: return {s, 1.0, 0.0};
      case RadialKind::Polynomial: {
        if (s < R_) return {s, 1.0, 0.0};
        const double u = s - R_;
        const double up = std::pow(u, p_);
        const double up1 = std::pow(u, p_ - 1.0);
        const double up2 = std::pow(u, p_ - 2.0);
        return {s + up, 1.0 + p_ * up1, p_ * (p_ - 1.0) * up2};
      }
      case RadialKind::ExponentialSub: {
        constexpr double e = std::numbers::e;
        if (s > 1.0 / b_) {
          const double ebs = std::exp(b_ * s);
          return {ebs - e / 3.0, b_ * ebs, b_ * b_ * ebs};
        }
        const double c3 = b_ * b_ * b_ * e / 6.0;
        const double c1 = b_ * e / 2.0;
        return {s * s * s * c3 + s * c1, 3.0 * s * s * c3 + c1, 6.0 * s * c3};
      }
    }
    return {0.0, 0.0, 0.0};  // unreachable
  }

  /// Inverse of f. Closed forms where available (Polynomial with p = 3 via
  /// the depressed cubic, ExponentialSub upper branch via the logarithm),
  /// safeguarded Newton with a bisection fallback otherwise.
  double inverse(double t) const {
    if (!(t >= 0.0))
      throw std::invalid_argument("radial inverse: argument must be >= 0");
    switch (kind_) {
      case RadialKind::Identity: return t;
      case RadialKind::Polynomial: {
        if (t <= R_) return t;
        if (p_ == 3.0) return R_ + solve_depressed_cubic_unit(t - R_);
        const double hi = std::min(t, guard_);
        if (value(hi) < t)
          throw std::range_error(
              "radial inverse: argument exceeds the overflow guard image");
        const double x0 = R_ + std::pow(t - R_, 1.0 / p_);
        return detail::newton_increasing(
            [this](double x) { return x + std::pow(x - R_, p_); },
            [this](double x) { return 1.0 + p_ * std::pow(x - R_, p_ - 1.0); },
            t, R_, hi, x0);
      }
      case RadialKind::ExponentialSub: {
        constexpr double e = std::numbers::e;
        if (t == 0.0) return 0.0;
        if (t >= 2.0 * e / 3.0) return std::log(t + e / 3.0) / b_;
        // cubic branch: x^3 b^3 e/6 + x b e/2 = t has one nonnegative root
        const double c3 = b_ * b_ * b_ * e / 6.0;
        const double c1 = b_ * e / 2.0;
        const double x0 = std::min(t / c1, 1.0 / b_);
        return detail::newton_increasing(
            [=](double x) { return x * x * x * c3 + x * c1; },
            [=](double x) { return 3.0 * x * x * c3 + c1; }, t, 0.0, 1.0 / b_,
            x0);
      }
    }
    return 0.0;  // unreachable
  }

 private:
  explicit RadialFamily(RadialKind kind) : kind_(kind) {}

  void check_argument(double s) const {
    if (!(s >= 0.0))
      throw std::invalid_argument("radial map: argument must be >= 0");
    if (s > guard_)
      throw std::range_error("radial map: argument " + std::to_string(s) +
                             " exceeds overflow guard radius " +
                             std::to_string(guard_));
  }

  // Unique real root of u^3 + u = c for c >= 0. Small c uses the series
  // u = c - c^3 + 3c^5 (the closed form cancels catastrophically there);
  // the conjugate cube root is folded into 1/(3a); for huge c the sqrt
  // argument would overflow, so it degenerates to cbrt(c).
  static double solve_depressed_cubic_unit(double c) {
    if (c < 1e-3) {
      const double c2 = c * c;
      return c * (1.0 - c2 * (1.0 - 3.0 * c2));
    }
    double a;
    if (c > 1e150) {
      a = std::cbrt(c);
    } else {
      const double s = std::sqrt(c * c / 4.0 + 1.0 / 27.0);
      a = std::cbrt(c / 2.0 + s);
    }
    return a - 1.0 / (3.0 * a);
  }

  RadialKind kind_;
  double R_ = 0.0;
  double p_ = 0.0;
  double b_ = 0.0;
  double guard_ = std::numeric_limits<double>::max();
};

}  // namespace morphmc
