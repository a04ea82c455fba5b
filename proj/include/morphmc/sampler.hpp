#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "morphmc/rng.hpp"
#include "morphmc/transformed.hpp"

namespace morphmc {

/// Spherical-Gaussian random-walk proposal: candidate = current + step * z
/// with z standard normal per coordinate and step_i = scale (optionally
/// times a per-coordinate multiplier). Symmetric about zero and positive
/// near zero by construction.
class ProposalSpec {
 public:
  explicit ProposalSpec(double scale,
                        std::optional<Eigen::VectorXd> per_coordinate = {})
      : scale_(scale), per_coordinate_(std::move(per_coordinate)) {
    if (!(scale_ > 0.0))
      throw std::invalid_argument("proposal: scale must be > 0");
    if (per_coordinate_ && (per_coordinate_->array() <= 0.0).any())
      throw std::invalid_argument(
          "proposal: per-coordinate multipliers must be > 0");
  }

  double scale() const { return scale_; }
  const std::optional<Eigen::VectorXd>& per_coordinate() const {
    return per_coordinate_;
  }

  Eigen::VectorXd step(const Eigen::VectorXd& z) const {
    if (per_coordinate_) {
      if (per_coordinate_->size() != z.size())
        throw std::invalid_argument(
            "proposal: per-coordinate multiplier length mismatch");
      return scale_ * per_coordinate_->cwiseProduct(z);
    }
    return scale_ * z;
  }

 private:
  double scale_;
  std::optional<Eigen::VectorXd> per_coordinate_;
};

/// Draw one candidate: current + step * z. Advancing the generator is the
/// only side effect.
inline Eigen::VectorXd propose(ChainRng& rng, const ProposalSpec& proposal,
                               const Eigen::VectorXd& current) {
  return current + proposal.step(
                       rng.standard_normal(static_cast<int>(current.size())));
}

/// min(1, exp(log_candidate - log_current)); 0 for a zero-density
/// candidate. A zero-density current state violates the chain invariant
/// (the kernel never moves there) and is a logic error.
inline double accept_probability(double log_pi_current,
                                 double log_pi_candidate) {
  if (log_pi_current == -std::numeric_limits<double>::infinity())
    throw std::logic_error(
        "metropolis kernel: current state has zero density");
  if (log_pi_candidate == -std::numeric_limits<double>::infinity()) return 0.0;
  const double diff = log_pi_candidate - log_pi_current;
  return diff >= 0.0 ? 1.0 : std::exp(diff);
}

/// Chain state: position in gamma space plus its cached log density, so a
/// rejected step re-evaluates nothing.
struct ChainState {
  Eigen::VectorXd gamma;
  double log_density;
};

/// One random-walk Metropolis iteration. Consumes one normal vector and one
/// uniform from the stream; accepts iff u < a (so a = 0 never accepts and
/// a = 1 always does). Candidates beyond the morph's guard radius count as
/// zero density. Returns whether the candidate was accepted.
inline bool metropolis_step(ChainRng& rng, ChainState& state,
                            const TransformedDensity& density,
                            const ProposalSpec& proposal) {
  const Eigen::VectorXd candidate = propose(rng, proposal, state.gamma);
  const double u = rng.uniform01();
  const double log_cand = density.log_density_or_rejected(candidate);
  if (u < accept_probability(state.log_density, log_cand)) {
    state.gamma = candidate;
    state.log_density = log_cand;
    return true;
  }
  return false;
}

/// Run parameters for one chain. initial_beta is given in the original
/// (beta) space and must have positive target density.
struct ChainConfig {
  TargetDensity target;
  Morph morph;
  ProposalSpec proposal;
  Eigen::VectorXd initial_beta;
  std::int64_t n_iterations = 0;
  std::int64_t burn_in = 0;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
};

/// Draws in both spaces plus acceptance bookkeeping. Row i of beta_draws is
/// exactly the morph applied to row i of gamma_draws. Immutable once
/// returned; safe to move across threads.
struct ChainOutput {
  Eigen::MatrixXd beta_draws;
  Eigen::MatrixXd gamma_draws;
  Eigen::VectorXd log_density_trace;
  std::int64_t accept_count = 0;
  std::int64_t n_proposed = 0;
  std::uint64_t seed = 0;
};

/// Random-walk Metropolis in gamma space with results mapped back to beta
/// space. gamma_1 = h^{-1}(initial_beta) is the only inverse evaluation;
/// afterwards each iteration proposes, applies the acceptance rule on the
/// transformed log density, and (after burn_in, every thin-th iteration)
/// records the state. Fully deterministic given the seed.
inline ChainOutput run_chain(const ChainConfig& config) {
  const int k = config.target.dimension();
  if (config.morph.dimension() != k)
    throw std::invalid_argument("run_chain: target/morph dimension mismatch");
  if (config.initial_beta.size() != k)
    throw std::invalid_argument("run_chain: initial point dimension mismatch");
  if (config.n_iterations < 1)
    throw std::invalid_argument("run_chain: n_iterations must be >= 1");
  if (config.burn_in < 0 || config.burn_in >= config.n_iterations)
    throw std::invalid_argument(
        "run_chain: burn_in must be in [0, n_iterations)");
  if (config.thin < 1)
    throw std::invalid_argument("run_chain: thin must be >= 1");

  const TransformedDensity density(config.target, config.morph);
  ChainState state{config.morph.inverse(config.initial_beta), 0.0};
  state.log_density = density.log_density_or_rejected(state.gamma);
  if (!(state.log_density > -std::numeric_limits<double>::infinity()))
    throw std::invalid_argument(
        "run_chain: initial point has zero target density");

  const std::int64_t kept =
      (config.n_iterations - config.burn_in) / config.thin;
  ChainOutput out;
  out.beta_draws.resize(kept, k);
  out.gamma_draws.resize(kept, k);
  out.log_density_trace.resize(kept);
  out.n_proposed = config.n_iterations;
  out.seed = config.seed;

  ChainRng rng(config.seed);
  std::int64_t row = 0;
  for (std::int64_t n = 1; n <= config.n_iterations; ++n) {
    try {
      if (metropolis_step(rng, state, density, config.proposal))
        ++out.accept_count;
    } catch (const std::logic_error&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error("run_chain: iteration " + std::to_string(n) +
                               ": " + e.what());
    }
    if (n > config.burn_in && (n - config.burn_in) % config.thin == 0) {
      out.gamma_draws.row(row) = state.gamma;
      out.beta_draws.row(row) = config.morph.apply(state.gamma);
      out.log_density_trace(row) = state.log_density;
      ++row;
    }
  }
  return out;
}

}  // namespace morphmc
