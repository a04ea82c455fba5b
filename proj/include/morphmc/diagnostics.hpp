#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "morphmc/io.hpp"
#include "morphmc/rng.hpp"
#include "morphmc/sampler.hpp"
#include "morphmc/target.hpp"

namespace morphmc {

/// Tail trichotomy read off the radial inner product
/// (x/|x|) . grad log pi(x) along probe rays: the limit is -inf for
/// super-exponentially light densities, a negative constant for
/// exponentially light ones, and 0 for sub-exponentially light ones.
enum class TailClass { SuperExponential, Exponential, SubExponential, Inconclusive };

enum class CurvatureResult { Satisfied, NotSatisfied, Inconclusive };

inline const char* to_string(TailClass c) {
  switch (c) {
    case TailClass::SuperExponential: return "SuperExponential";
    case TailClass::Exponential: return "Exponential";
    case TailClass::SubExponential: return "SubExponential";
    case TailClass::Inconclusive: return "Inconclusive";
  }
  return "?";
}

inline const char* to_string(CurvatureResult c) {
  switch (c) {
    case CurvatureResult::Satisfied: return "satisfied";
    case CurvatureResult::NotSatisfied: return "not_satisfied";
    case CurvatureResult::Inconclusive: return "inconclusive";
  }
  return "?";
}

/// Probe cutoffs. The analytic conditions are limits; finite probes need
/// declared thresholds, chosen to separate the built-in example families.
struct ProbeSettings {
  double t_super = 10.0;   // super: max inner product at largest radius <= -t_super
  double epsilon = 0.05;   // exponential band is [-c_exp, -epsilon]
  double c_exp = 100.0;
  double epsilon_curv = 0.05;
  double stabilize_rel = 0.25;  // spread/|mean| bound declaring "stabilized"
  double fd_step = 1e-4;        // gradient fallback: step fd_step*max(1,|x|)
};

/// Ray-probe evidence: inner products per (direction, radius), the derived
/// classification, the alpha estimate when the decay looks like -alpha/r,
/// and the curvature probe values (x/|x|).(grad pi/|grad pi|).
struct TailReport {
  std::vector<double> radii;
  std::vector<Eigen::VectorXd> directions;
  Eigen::MatrixXd inner_products;   // directions x radii
  TailClass classification = TailClass::Inconclusive;
  std::optional<double> alpha_estimate;
  Eigen::MatrixXd curvature_values;  // directions x radii; NaN = skipped
  CurvatureResult curvature = CurvatureResult::Inconclusive;
  std::string caveat;
};

/// Default probe radii: the geometric ladder {10,30,100,300,1000} cut to
/// the guard; if fewer than three rungs survive, a geometric ladder up to
/// 0.9 * max_radius replaces it.
inline std::vector<double> default_probe_radii(
    double max_radius = std::numeric_limits<double>::infinity()) {
  const std::vector<double> ladder{10.0, 30.0, 100.0, 300.0, 1000.0};
  std::vector<double> out;
  for (double r : ladder)
    if (r <= max_radius) out.push_back(r);
  if (out.size() >= 3) return out;
  out.clear();
  const double top = 0.9 * max_radius;
  for (double frac : {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0})
    out.push_back(top * frac);
  return out;
}

/// 2k axis directions plus n_random random unit vectors.
inline std::vector<Eigen::VectorXd> default_probe_directions(
    int k, int n_random = 20, std::uint64_t seed = 20120601) {
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
    e(i) = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  ChainRng rng(seed);
  for (int i = 0; i < n_random; ++i) {
    Eigen::VectorXd z = rng.standard_normal(k);
    const double n = z.norm();
    dirs.push_back(n > 0 ? Eigen::VectorXd(z / n) : dirs.front());
  }
  return dirs;
}

namespace detail {

// analytic gradient when present, scale-aware central differences otherwise
inline Eigen::VectorXd probe_gradient(const TargetDensity& target,
                                      const Eigen::VectorXd& x,
                                      const ProbeSettings& s) {
  if (target.has_gradient()) return target.grad_log_density(x);
  const double h = s.fd_step * std::max(1.0, x.norm());
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (int i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const double fp = target.log_density(xp);
    xp(i) = x(i) - h;
    const double fm = target.log_density(xp);
    xp(i) = x(i);
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::runtime_error(
          "tail probe: non-finite density while differencing at radius " +
          std::to_string(x.norm()));
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline bool stabilized(const std::vector<double>& v, double rel) {
  const double lo = *std::min_element(v.begin(), v.end());
  const double hi = *std::max_element(v.begin(), v.end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  return hi - lo <= std::max(rel * std::abs(mean), 1e-9);
}

}  // namespace detail

/// Probes (x/|x|) . grad log pi along every (direction, radius) pair and
/// classifies the tail per the declared thresholds. The classification is
/// advisory: any finite-radius probe can be fooled by densities that keep
/// oscillating at larger radii, hence the caveat carried in the report.
inline TailReport ray_tail_probe(const TargetDensity& target,
                                 const std::vector<Eigen::VectorXd>& directions,
                                 const std::vector<double>& radii,
                                 const ProbeSettings& settings = {}) {
  if (radii.size() < 3)
    throw std::invalid_argument("tail probe: need at least three radii");
  for (std::size_t j = 1; j < radii.size(); ++j)
    if (!(radii[j] > radii[j - 1]))
      throw std::invalid_argument("tail probe: radii must be increasing");
  if (directions.empty())
    throw std::invalid_argument("tail probe: need at least one direction");

  TailReport rep;
  rep.radii = radii;
  rep.directions = directions;
  const int nd = static_cast<int>(directions.size());
  const int nr = static_cast<int>(radii.size());
  rep.inner_products.resize(nd, nr);
  rep.curvature_values.resize(nd, nr);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int i = 0; i < nd; ++i) {
    const Eigen::VectorXd u = directions[i].normalized();
    for (int j = 0; j < nr; ++j) {
      const Eigen::VectorXd x = radii[j] * u;
      const Eigen::VectorXd g = detail::probe_gradient(target, x, settings);
      if (!g.allFinite())
        throw std::runtime_error(
            "tail probe: non-finite gradient on the ray at radius " +
            std::to_string(radii[j]));
      rep.inner_products(i, j) = u.dot(g);
      const double gn = g.norm();
      rep.curvature_values(i, j) = gn > 0.0 ? u.dot(g) / gn : nan;
    }
  }

  // classification works off the worst (largest) inner product per radius,
  // mirroring the limit superior over directions
  std::vector<double> worst(nr);
  for (int j = 0; j < nr; ++j) worst[j] = rep.inner_products.col(j).maxCoeff();
  const std::vector<double> last3(worst.end() - 3, worst.end());

  const bool decreasing = last3[0] > last3[1] && last3[1] > last3[2];
  const bool all_in_exp_band =
      std::all_of(last3.begin(), last3.end(), [&](double v) {
        return v >= -settings.c_exp && v <= -settings.epsilon;
      });
  const bool approaching_zero =
      std::all_of(last3.begin(), last3.end(),
                  [](double v) { return v < 0.0; }) &&
      last3.back() > -settings.epsilon;

  if (last3.back() <= -settings.t_super && decreasing) {
    rep.classification = TailClass::SuperExponential;
  } else if (all_in_exp_band &&
             detail::stabilized(last3, settings.stabilize_rel)) {
    rep.classification = TailClass::Exponential;
  } else if (approaching_zero) {
    // -alpha/r decay: alpha is the binding (smallest) product across
    // directions; stable products across the last radii give the estimate
    std::vector<double> alpha(3);
    for (int j = nr - 3; j < nr; ++j) {
      double a = std::numeric_limits<double>::infinity();
      for (int i = 0; i < nd; ++i)
        a = std::min(a, -rep.inner_products(i, j) * radii[j]);
      alpha[j - (nr - 3)] = a;
    }
    if (detail::stabilized(alpha, settings.stabilize_rel)) {
      rep.classification = TailClass::SubExponential;
      rep.alpha_estimate = (alpha[0] + alpha[1] + alpha[2]) / 3.0;
    }
  }

  // curvature: satisfied when every valid probe at the two largest radii
  // stays below -epsilon_curv
  double worst_curv = -std::numeric_limits<double>::infinity();
  int valid = 0;
  for (int j = nr - 2; j < nr; ++j)
    for (int i = 0; i < nd; ++i) {
      const double c = rep.curvature_values(i, j);
      if (std::isnan(c)) continue;
      ++valid;
      worst_curv = std::max(worst_curv, c);
    }
  if (valid == 0)
    rep.curvature = CurvatureResult::Inconclusive;
  else
    rep.curvature = worst_curv <= -settings.epsilon_curv
                        ? CurvatureResult::Satisfied
                        : CurvatureResult::NotSatisfied;

  rep.caveat =
      "finite-radius probe of an asymptotic condition; densities can change "
      "behavior beyond the probed radii, so the classification is advisory";
  return rep;
}

/// ray_tail_probe with default directions and a radii ladder cut to
/// max_radius (pass the morph guard radius when probing a transformed
/// density).
inline TailReport ray_tail_probe(
    const TargetDensity& target,
    double max_radius = std::numeric_limits<double>::infinity(),
    const ProbeSettings& settings = {}) {
  return ray_tail_probe(target, default_probe_directions(target.dimension()),
                        default_probe_radii(max_radius), settings);
}

/// Fraction of proposals accepted.
inline double acceptance_rate(const ChainOutput& out) {
  if (out.n_proposed <= 0)
    throw std::invalid_argument("acceptance rate: no proposals recorded");
  return static_cast<double>(out.accept_count) /
         static_cast<double>(out.n_proposed);
}

struct BatchMeans {
  double mean = 0.0;
  double mcse = 0.0;
};

/// Batch-means Monte Carlo standard error: the series is split into
/// n_batches equal contiguous batches (remainder truncated) and the spread
/// of the batch means estimates the error of the overall mean.
inline BatchMeans batch_means_mcse(const Eigen::Ref<const Eigen::VectorXd>& series,
                                   int n_batches) {
  if (n_batches < 2)
    throw std::invalid_argument("batch means: need at least two batches");
  const auto n = static_cast<std::int64_t>(series.size());
  if (n < 2 * n_batches)
    throw std::invalid_argument(
        "batch means: series length must be >= 2 * n_batches");
  const std::int64_t len = n / n_batches;
  const std::int64_t used = len * n_batches;
  BatchMeans out;
  out.mean = series.head(used).mean();
  double ss = 0.0;
  for (int b = 0; b < n_batches; ++b) {
    const double bm = series.segment(b * len, len).mean();
    ss += (bm - out.mean) * (bm - out.mean);
  }
  const double var_batch = ss / (n_batches - 1);
  out.mcse = std::sqrt(var_batch / n_batches);
  return out;
}

/// Standard biased sample autocorrelations rho(1..max_lag).
inline std::vector<double> autocorrelation(
    const Eigen::Ref<const Eigen::VectorXd>& series, int max_lag) {
  const auto n = static_cast<std::int64_t>(series.size());
  if (max_lag < 1 || max_lag >= n / 2)
    throw std::invalid_argument(
        "autocorrelation: need 1 <= max_lag < length/2");
  const double mean = series.mean();
  const Eigen::VectorXd c = series.array() - mean;
  const double denom = c.squaredNorm();
  std::vector<double> rho(max_lag);
  for (int l = 1; l <= max_lag; ++l)
    rho[l - 1] = c.head(n - l).dot(c.tail(n - l)) / denom;
  return rho;
}

/// Flat key-value rendering of a TailReport, one `prefix_key = value` line
/// per entry (the CLI report format).
inline std::string tail_report_to_text(const TailReport& rep,
                                       const std::string& prefix) {
  std::ostringstream out;
  auto kv = [&](const std::string& key, const std::string& value) {
    out << prefix << key << " = " << value << "\n";
  };
  auto join = [&](auto&& values) {
    std::string s;
    for (double v : values) {
      if (!s.empty()) s += ' ';
      s += format_double(v);
    }
    return s;
  };
  kv("classification", to_string(rep.classification));
  if (rep.alpha_estimate) kv("alpha_estimate", format_double(*rep.alpha_estimate));
  kv("curvature", to_string(rep.curvature));
  kv("n_directions", std::to_string(rep.directions.size()));
  kv("radii", join(rep.radii));
  std::vector<double> worst(rep.radii.size()), best(rep.radii.size()),
      curv_worst(rep.radii.size());
  for (std::size_t j = 0; j < rep.radii.size(); ++j) {
    worst[j] = rep.inner_products.col(static_cast<int>(j)).maxCoeff();
    best[j] = rep.inner_products.col(static_cast<int>(j)).minCoeff();
    double w = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < rep.curvature_values.rows(); ++i) {
      const double c = rep.curvature_values(i, static_cast<int>(j));
      if (!std::isnan(c)) w = std::max(w, c);
    }
    curv_worst[j] = w;
  }
  kv("inner_product_max", join(worst));
  kv("inner_product_min", join(best));
  kv("curvature_max", join(curv_worst));
  kv("caveat", rep.caveat);
  return out.str();
}

}  // namespace morphmc
