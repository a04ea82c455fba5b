#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace morphmc {

/// log(sum(exp(v))) with the max shifted out. Handles -inf entries; returns
/// -inf when every entry is -inf.
inline double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i) acc += std::exp(v(i) - m);
  return m + std::log(acc);
}

/// exp(v_i) / sum(exp(v)), computed against the shifted maximum.
inline Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  Eigen::VectorXd out = (v.array() - m).exp();
  return out / out.sum();
}

}  // namespace morphmc
