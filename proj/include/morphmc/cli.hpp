#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "morphmc/diagnostics.hpp"
#include "morphmc/io.hpp"
#include "morphmc/run_config.hpp"
#include "morphmc/sampler.hpp"
#include "morphmc/transformed.hpp"

namespace morphmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

struct Options {
  int chains = 1;
  bool emit_gamma = false;
  bool quiet = false;
};

namespace detail {

inline std::string with_suffix(const std::string& path,
                               const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

inline std::vector<std::int64_t> kept_iterations(const SamplerParams& s) {
  std::vector<std::int64_t> iters;
  const std::int64_t kept = (s.n_iterations - s.burn_in) / s.thin;
  iters.reserve(static_cast<std::size_t>(std::max<std::int64_t>(kept, 0)));
  for (std::int64_t j = 1; j <= kept; ++j)
    iters.push_back(s.burn_in + j * s.thin);
  return iters;
}

inline std::string sample_report(const RunConfig& rc, const ChainOutput& out,
                                 const SamplerParams& sampler,
                                 int chain_index, int n_chains) {
  ReportWriter rep;
  rep.add("format_version", static_cast<std::int64_t>(kFormatVersion));
  rep.add("command", "sample");
  if (n_chains > 1) {
    rep.add("chain_index", static_cast<std::int64_t>(chain_index));
    rep.add("n_chains", static_cast<std::int64_t>(n_chains));
  }
  rep.add("seed", out.seed);
  rep.add("n_iterations", sampler.n_iterations);
  rep.add("burn_in", sampler.burn_in);
  rep.add("thin", sampler.thin);
  const auto kept = out.beta_draws.rows();
  rep.add("kept_rows", static_cast<std::int64_t>(kept));
  rep.add("acceptance_rate", acceptance_rate(out));
  const int k = static_cast<int>(out.beta_draws.cols());
  if (kept >= 4) {
    const int n_batches =
        static_cast<int>(std::clamp<Eigen::Index>(kept / 2, 2, 100));
    for (int j = 0; j < k; ++j) {
      const auto bm = batch_means_mcse(out.beta_draws.col(j), n_batches);
      rep.add("mean_beta_" + std::to_string(j + 1), bm.mean);
      rep.add("mcse_beta_" + std::to_string(j + 1), bm.mcse);
    }
  }
  const int max_lag =
      static_cast<int>(std::min<Eigen::Index>(50, kept / 2 - 1));
  if (max_lag >= 1) {
    for (int j = 0; j < k; ++j) {
      const auto rho = autocorrelation(out.beta_draws.col(j), max_lag);
      std::string line;
      for (double r : rho) {
        if (!line.empty()) line += ' ';
        line += format_double(r);
      }
      rep.add("autocorr_beta_" + std::to_string(j + 1), line);
    }
  }
  rep.add("config_json", config_echo(rc).dump());
  return rep.str();
}

}  // namespace detail

/// `sample <config>`: run the configured chain(s), write draws and a
/// key-value report. With options.chains > 1, chains run concurrently on
/// split seeds and files get a _chainN suffix.
inline int cmd_sample(const std::string& config_path,
                      const Options& options = {}) {
  RunConfig rc;
  std::optional<TargetDensity> target;
  std::optional<Morph> morph;
  try {
    rc = load_run_config(config_path);
    if (!rc.sampler)
      throw ConfigError("config key 'sampler': required for the sample command");
    if (!rc.output || !rc.output->samples_path || !rc.output->report_path)
      throw ConfigError(
          "config key 'output': samples_path and report_path are required "
          "for the sample command");
    if (options.chains < 1)
      throw ConfigError("--chains: must be >= 1");
    target.emplace(rc.make_target());
    morph.emplace(rc.make_morph());
    if (rc.sampler->initial_beta.size() != target->dimension())
      throw ConfigError(
          "config key 'sampler.initial_beta': length does not match the "
          "target dimension");
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const int n_chains = options.chains;
  std::vector<std::exception_ptr> errors(n_chains);
  std::vector<std::string> notes(n_chains);

  auto run_one = [&](int index) {
    try {
      SamplerParams sp = *rc.sampler;
      if (n_chains > 1) sp.seed = split_seed(rc.sampler->seed, index);
      ChainConfig cc{*target,
                     *morph,
                     ProposalSpec(sp.sigma, sp.sigma_scale),
                     sp.initial_beta,
                     sp.n_iterations,
                     sp.burn_in,
                     sp.thin,
                     sp.seed};
      const ChainOutput out = run_chain(cc);
      const std::string suffix =
          n_chains > 1 ? "_chain" + std::to_string(index) : "";
      const std::string samples_path =
          detail::with_suffix(*rc.output->samples_path, suffix);
      const std::string report_path =
          detail::with_suffix(*rc.output->report_path, suffix);
      const auto iters = detail::kept_iterations(sp);
      {
        auto f = open_output(samples_path);
        const Eigen::MatrixXd* gamma =
            options.emit_gamma ? &out.gamma_draws : nullptr;
        if (rc.output->format == "csv")
          write_samples_csv(f, iters, out.beta_draws, gamma);
        else
          write_samples_jsonl(f, iters, out.beta_draws, gamma);
      }
      {
        auto f = open_output(report_path);
        f << detail::sample_report(rc, out, sp, index, n_chains);
      }
      notes[index] = "wrote " + samples_path + " and " + report_path +
                     " (acceptance rate " +
                     format_double(acceptance_rate(out)) + ")";
    } catch (...) {
      errors[index] = std::current_exception();
    }
  };

  if (n_chains == 1) {
    run_one(0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(n_chains);
    for (int i = 0; i < n_chains; ++i) workers.emplace_back(run_one, i);
    for (auto& w : workers) w.join();
  }

  for (int i = 0; i < n_chains; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      std::cerr << "runtime error (chain " << i << "): " << e.what() << "\n";
    }
    return kExitRuntimeError;
  }
  if (!options.quiet)
    for (const auto& n : notes) std::cout << n << "\n";
  return kExitOk;
}

/// `probe <config>`: tail/curvature report for the target density and,
/// when a morph is configured, for the induced density. Written to
/// output.report_path when present, stdout otherwise.
inline int cmd_probe(const std::string& config_path,
                     const Options& options = {}) {
  RunConfig rc;
  std::optional<TargetDensity> target;
  std::optional<Morph> morph;
  bool has_morph = false;
  try {
    rc = load_run_config(config_path);
    target.emplace(rc.make_target());
    has_morph = rc.morph.has_value();
    morph.emplace(rc.make_morph());
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    ReportWriter rep;
    rep.add("format_version", static_cast<std::int64_t>(kFormatVersion));
    rep.add("command", "probe");
    rep.add("config_json", config_echo(rc).dump());
    rep.add_block(tail_report_to_text(ray_tail_probe(*target), "beta_"));
    if (has_morph) {
      const TransformedDensity td(*target, *morph);
      rep.add("gamma_guard_radius", morph->guard_radius());
      rep.add_block(tail_report_to_text(
          ray_tail_probe(td.as_target(), morph->guard_radius()), "gamma_"));
    }
    if (rc.output && rc.output->report_path) {
      auto f = open_output(*rc.output->report_path);
      f << rep.str();
      if (!options.quiet)
        std::cout << "wrote " << *rc.output->report_path << "\n";
    } else {
      std::cout << rep.str();
    }
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace morphmc::cli
