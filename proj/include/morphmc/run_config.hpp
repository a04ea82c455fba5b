#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "morphmc/cauchy_location.hpp"
#include "morphmc/io.hpp"
#include "morphmc/mlogit.hpp"
#include "morphmc/morph.hpp"
#include "morphmc/student_t.hpp"
#include "morphmc/target.hpp"

namespace morphmc {

/// A malformed or inconsistent run configuration (exit code 2 territory).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace cfg {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config key '" + path + "': " + msg);
}

/// Unknown keys are rejected: a misspelled tuning constant silently falling
/// back to a default would invalidate a run.
inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) ok = true;
    if (!ok) fail(path + "." + item.key(), "unknown key");
  }
}

inline const json& require(const json& obj, const std::string& path,
                           const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required key");
  return *it;
}

inline double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

inline std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t as_uint(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() &&
      !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    fail(path, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

inline Eigen::VectorXd as_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out(static_cast<Eigen::Index>(i)) =
        as_double(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

inline Eigen::MatrixXd as_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected an array of rows");
  const Eigen::VectorXd first = as_vector(v[0], path + "[0]");
  Eigen::MatrixXd out(v.size(), first.size());
  out.row(0) = first;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const Eigen::VectorXd row =
        as_vector(v[i], path + "[" + std::to_string(i) + "]");
    if (row.size() != first.size()) fail(path, "ragged rows");
    out.row(static_cast<Eigen::Index>(i)) = row;
  }
  return out;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rows.push_back(vector_to_json(m.row(i).transpose()));
  return rows;
}

}  // namespace cfg

// ----------------------------------------------------------------- target

struct GaussianParams {
  Eigen::VectorXd mean;
  double sd = 1.0;
};

struct MvtParams {
  double nu = 1.0;
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
};

struct CauchyLocationParams {
  std::vector<double> data;
};

struct MlogitParams {
  std::vector<MlogitObservation> observations;
};

using TargetParams =
    std::variant<GaussianParams, MvtParams, CauchyLocationParams, MlogitParams>;

// ----------------------------------------------------------------- config

struct MorphParams {
  Eigen::VectorXd lambda;
  std::optional<std::pair<double, double>> polynomial;  // (R, p)
  std::optional<double> exponential_b;
};

struct SamplerParams {
  double sigma = 1.0;
  std::optional<Eigen::VectorXd> sigma_scale;
  std::int64_t n_iterations = 0;
  std::int64_t burn_in = 0;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
  Eigen::VectorXd initial_beta;
};

struct OutputParams {
  std::optional<std::string> samples_path;
  std::optional<std::string> report_path;
  std::string format = "csv";  // csv | jsonl
};

/// Parsed, defaults-resolved run configuration. Mirrors the construction
/// invariants of the library types; building the actual objects revalidates
/// everything.
struct RunConfig {
  TargetParams target;
  std::optional<MorphParams> morph;
  std::optional<SamplerParams> sampler;
  std::optional<OutputParams> output;

  int target_dimension() const {
    if (const auto* g = std::get_if<GaussianParams>(&target))
      return static_cast<int>(g->mean.size());
    if (const auto* t = std::get_if<MvtParams>(&target))
      return static_cast<int>(t->mu.size());
    if (std::get_if<CauchyLocationParams>(&target)) return 1;
    return static_cast<int>(
        std::get<MlogitParams>(target).observations.front().model_matrix.cols());
  }

  TargetDensity make_target() const {
    if (const auto* g = std::get_if<GaussianParams>(&target))
      return gaussian_target(g->mean, g->sd);
    if (const auto* t = std::get_if<MvtParams>(&target))
      return MultivariateT(t->nu, t->mu, t->sigma).as_target();
    if (const auto* c = std::get_if<CauchyLocationParams>(&target))
      return CauchyLocationPosterior(c->data).as_target();
    return MlogitPosterior(std::get<MlogitParams>(target).observations)
        .as_target();
  }

  Morph make_morph() const {
    const int k = target_dimension();
    if (!morph) return Morph::identity(k);
    if (morph->lambda.size() != k)
      throw ConfigError("config key 'morph.lambda': length " +
                        std::to_string(morph->lambda.size()) +
                        " does not match the target dimension " +
                        std::to_string(k));
    std::vector<RadialFamily> stages;
    if (morph->polynomial)
      stages.push_back(RadialFamily::polynomial(morph->polynomial->first,
                                                morph->polynomial->second));
    if (morph->exponential_b)
      stages.push_back(RadialFamily::exponential_sub(*morph->exponential_b));
    if (stages.empty()) stages.push_back(RadialFamily::identity());
    return Morph(morph->lambda, std::move(stages));
  }
};

namespace cfg {

inline TargetParams parse_target(const json& j) {
  const std::string path = "target";
  const std::string family = as_string(require(j, path, "family"), path + ".family");
  if (family == "gaussian") {
    check_keys(j, path, {"family", "mean", "sd"});
    GaussianParams g;
    g.mean = as_vector(require(j, path, "mean"), path + ".mean");
    if (j.contains("sd")) g.sd = as_double(j["sd"], path + ".sd");
    return g;
  }
  if (family == "mvt") {
    check_keys(j, path, {"family", "nu", "mu", "sigma"});
    MvtParams t;
    t.nu = as_double(require(j, path, "nu"), path + ".nu");
    t.mu = as_vector(require(j, path, "mu"), path + ".mu");
    const json& s = require(j, path, "sigma");
    if (s.is_number()) {
      t.sigma = Eigen::MatrixXd::Constant(1, 1, s.get<double>());
      if (t.mu.size() != 1)
        fail(path + ".sigma", "scalar scale needs a 1-d location");
    } else {
      t.sigma = as_matrix(s, path + ".sigma");
    }
    return t;
  }
  if (family == "cauchy_location") {
    check_keys(j, path, {"family", "data"});
    CauchyLocationParams c;
    const Eigen::VectorXd d = as_vector(require(j, path, "data"), path + ".data");
    c.data.assign(d.data(), d.data() + d.size());
    return c;
  }
  if (family == "mlogit") {
    check_keys(j, path, {"family", "observations"});
    const json& obs = require(j, path, "observations");
    if (!obs.is_array() || obs.empty())
      fail(path + ".observations", "expected a nonempty array");
    MlogitParams m;
    for (std::size_t l = 0; l < obs.size(); ++l) {
      const std::string opath = path + ".observations[" + std::to_string(l) + "]";
      check_keys(obs[l], opath,
                 {"counts", "prior_prob", "prior_size", "model_matrix"});
      MlogitObservation o;
      o.counts = as_vector(require(obs[l], opath, "counts"), opath + ".counts");
      o.prior_prob =
          as_vector(require(obs[l], opath, "prior_prob"), opath + ".prior_prob");
      o.prior_size =
          as_double(require(obs[l], opath, "prior_size"), opath + ".prior_size");
      o.model_matrix = as_matrix(require(obs[l], opath, "model_matrix"),
                                 opath + ".model_matrix");
      m.observations.push_back(std::move(o));
    }
    return m;
  }
  fail(path + ".family", "unknown family '" + family +
                             "' (expected gaussian, mvt, cauchy_location or "
                             "mlogit)");
}

inline MorphParams parse_morph(const json& j) {
  const std::string path = "morph";
  check_keys(j, path, {"lambda", "polynomial", "exponential"});
  MorphParams m;
  m.lambda = as_vector(require(j, path, "lambda"), path + ".lambda");
  if (j.contains("polynomial")) {
    const json& p = j["polynomial"];
    check_keys(p, path + ".polynomial", {"R", "p"});
    const double R = as_double(require(p, path + ".polynomial", "R"),
                               path + ".polynomial.R");
    const double pw =
        p.contains("p") ? as_double(p["p"], path + ".polynomial.p") : 3.0;
    m.polynomial = {R, pw};
  }
  if (j.contains("exponential")) {
    const json& e = j["exponential"];
    check_keys(e, path + ".exponential", {"b"});
    m.exponential_b =
        e.contains("b") ? as_double(e["b"], path + ".exponential.b") : 0.1;
  }
  return m;
}

inline SamplerParams parse_sampler(const json& j) {
  const std::string path = "sampler";
  check_keys(j, path,
             {"sigma", "sigma_scale", "n_iterations", "burn_in", "thin",
              "seed", "initial_beta"});
  SamplerParams s;
  s.sigma = as_double(require(j, path, "sigma"), path + ".sigma");
  if (j.contains("sigma_scale"))
    s.sigma_scale = as_vector(j["sigma_scale"], path + ".sigma_scale");
  s.n_iterations =
      as_int(require(j, path, "n_iterations"), path + ".n_iterations");
  if (j.contains("burn_in")) s.burn_in = as_int(j["burn_in"], path + ".burn_in");
  if (j.contains("thin")) s.thin = as_int(j["thin"], path + ".thin");
  s.seed = as_uint(require(j, path, "seed"), path + ".seed");
  s.initial_beta =
      as_vector(require(j, path, "initial_beta"), path + ".initial_beta");
  return s;
}

inline OutputParams parse_output(const json& j) {
  const std::string path = "output";
  check_keys(j, path, {"samples_path", "report_path", "format"});
  OutputParams o;
  if (j.contains("samples_path"))
    o.samples_path = as_string(j["samples_path"], path + ".samples_path");
  if (j.contains("report_path"))
    o.report_path = as_string(j["report_path"], path + ".report_path");
  if (j.contains("format")) {
    o.format = as_string(j["format"], path + ".format");
    if (o.format != "csv" && o.format != "jsonl")
      fail(path + ".format", "expected 'csv' or 'jsonl'");
  }
  return o;
}

}  // namespace cfg

inline RunConfig parse_run_config(const nlohmann::json& j) {
  cfg::check_keys(j, "(root)",
                  {"format_version", "target", "morph", "sampler", "output"});
  const auto version =
      cfg::as_int(cfg::require(j, "(root)", "format_version"), "format_version");
  if (version != kFormatVersion)
    cfg::fail("format_version", "unsupported version " + std::to_string(version));
  RunConfig rc;
  rc.target = cfg::parse_target(cfg::require(j, "(root)", "target"));
  if (j.contains("morph")) rc.morph = cfg::parse_morph(j["morph"]);
  if (j.contains("sampler")) rc.sampler = cfg::parse_sampler(j["sampler"]);
  if (j.contains("output")) rc.output = cfg::parse_output(j["output"]);
  return rc;
}

inline RunConfig parse_run_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  return parse_run_config(j);
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_run_config_text(text);
}

/// Resolved-config echo: re-serializes with defaults applied; parsing the
/// echo reproduces an equivalent RunConfig.
inline nlohmann::json config_echo(const RunConfig& rc) {
  using nlohmann::json;
  json j;
  j["format_version"] = kFormatVersion;
  json t;
  if (const auto* g = std::get_if<GaussianParams>(&rc.target)) {
    t["family"] = "gaussian";
    t["mean"] = cfg::vector_to_json(g->mean);
    t["sd"] = g->sd;
  } else if (const auto* v = std::get_if<MvtParams>(&rc.target)) {
    t["family"] = "mvt";
    t["nu"] = v->nu;
    t["mu"] = cfg::vector_to_json(v->mu);
    t["sigma"] = cfg::matrix_to_json(v->sigma);
  } else if (const auto* c = std::get_if<CauchyLocationParams>(&rc.target)) {
    t["family"] = "cauchy_location";
    t["data"] = c->data;
  } else {
    const auto& m = std::get<MlogitParams>(rc.target);
    t["family"] = "mlogit";
    json obs = json::array();
    for (const auto& o : m.observations) {
      json jo;
      jo["counts"] = cfg::vector_to_json(o.counts);
      jo["prior_prob"] = cfg::vector_to_json(o.prior_prob);
      jo["prior_size"] = o.prior_size;
      jo["model_matrix"] = cfg::matrix_to_json(o.model_matrix);
      obs.push_back(jo);
    }
    t["observations"] = obs;
  }
  j["target"] = t;
  if (rc.morph) {
    json m;
    m["lambda"] = cfg::vector_to_json(rc.morph->lambda);
    if (rc.morph->polynomial)
      m["polynomial"] = {{"R", rc.morph->polynomial->first},
                         {"p", rc.morph->polynomial->second}};
    if (rc.morph->exponential_b)
      m["exponential"] = {{"b", *rc.morph->exponential_b}};
    j["morph"] = m;
  }
  if (rc.sampler) {
    json s;
    s["sigma"] = rc.sampler->sigma;
    if (rc.sampler->sigma_scale)
      s["sigma_scale"] = cfg::vector_to_json(*rc.sampler->sigma_scale);
    s["n_iterations"] = rc.sampler->n_iterations;
    s["burn_in"] = rc.sampler->burn_in;
    s["thin"] = rc.sampler->thin;
    s["seed"] = rc.sampler->seed;
    s["initial_beta"] = cfg::vector_to_json(rc.sampler->initial_beta);
    j["sampler"] = s;
  }
  if (rc.output) {
    json o;
    if (rc.output->samples_path) o["samples_path"] = *rc.output->samples_path;
    if (rc.output->report_path) o["report_path"] = *rc.output->report_path;
    o["format"] = rc.output->format;
    j["output"] = o;
  }
  return j;
}

}  // namespace morphmc
