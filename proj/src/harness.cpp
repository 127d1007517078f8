#include "lrdemp/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "lrdemp/empirical.hpp"
#include "lrdemp/errors.hpp"
#include "lrdemp/estimators.hpp"
#include "lrdemp/multilinear.hpp"
#include "lrdemp/seeding.hpp"
#include "lrdemp/stats.hpp"

namespace lrdemp {

using nlohmann::json;

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::ks_known:
      return "ks_known";
    case Statistic::ks:
      return "ks";
    case Statistic::cvm:
      return "cvm";
    case Statistic::profile:
      return "profile";
    case Statistic::pointwise:
      return "pointwise";
    case Statistic::reduction:
      return "reduction";
  }
  return "unknown";
}

Statistic parse_statistic(const std::string& name) {
  for (auto s : {Statistic::ks_known, Statistic::ks, Statistic::cvm, Statistic::profile, Statistic::pointwise,
                 Statistic::reduction})
    if (to_string(s) == name) return s;
  throw ParameterError("unknown statistic '" + name +
                       "' (expected ks_known | ks | cvm | profile | pointwise | reduction)");
}

namespace {

const std::vector<std::string> kCheckNames = {
    "negligibility", "profile_proportionality", "m_estimator_branch", "gaussian_regime",
    "reduction_rate", "ks_limit", "z1_normality", "replication_independence",
    "m_equivalence", "cvm_consistency", "sigma_psi", "variance_inflation"};

template <class T>
T field(const json& j, const std::string& key, const std::string& ptr) {
  if (!j.contains(key)) throw ConfigError(ptr + "/" + key, "required field missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(ptr + "/" + key, std::string("wrong type: ") + e.what());
  }
}

template <class T>
T field_or(const json& j, const std::string& key, const std::string& ptr, T fallback) {
  if (!j.contains(key)) return fallback;
  return field<T>(j, key, ptr);
}

std::size_t positive_size(const json& j, const std::string& key, const std::string& ptr) {
  if (!j.contains(key)) throw ConfigError(ptr + "/" + key, "required field missing");
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(ptr + "/" + key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const std::vector<std::string> known = {"name", "process", "n_grid", "reps", "estimators",
                                                   "statistics", "grid_m", "checks", "master_seed",
                                                   "sigma2_budget"};
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("/" + it.key(), "unknown field");
  }
  ExperimentConfig c;
  c.name = field_or<std::string>(j, "name", "", c.name);

  if (!j.contains("process") || !j.at("process").is_object())
    throw ConfigError("/process", "required object missing");
  const auto& p = j.at("process");
  c.process.beta = field<double>(p, "beta", "/process");
  if (p.contains("trunc_K")) c.process.trunc_K = positive_size(p, "trunc_K", "/process");
  c.process.mu = field_or<double>(p, "mu", "/process", 0.0);
  c.process.sigma = field_or<double>(p, "sigma", "/process", 1.0);
  if (p.contains("innovation")) {
    try {
      c.process.innovation = parse_innovation(field<std::string>(p, "innovation", "/process"));
    } catch (const ParameterError& e) {
      throw ConfigError("/process/innovation", e.what());
    }
  }

  if (!j.contains("n_grid") || !j.at("n_grid").is_array()) throw ConfigError("/n_grid", "expected an array");
  for (std::size_t i = 0; i < j.at("n_grid").size(); ++i) {
    const auto& v = j.at("n_grid")[i];
    if (!v.is_number_integer() || v.get<long long>() <= 0)
      throw ConfigError("/n_grid/" + std::to_string(i), "expected a positive integer");
    c.n_grid.push_back(v.get<std::size_t>());
  }
  c.reps = positive_size(j, "reps", "");
  if (j.contains("grid_m")) c.grid_m = positive_size(j, "grid_m", "");
  if (j.contains("sigma2_budget")) c.sigma2_budget = positive_size(j, "sigma2_budget", "");
  if (!j.contains("master_seed") || !j.at("master_seed").is_number_unsigned())
    throw ConfigError("/master_seed", "expected a non-negative integer");
  c.master_seed = j.at("master_seed").get<std::uint64_t>();

  if (!j.contains("estimators") || !j.at("estimators").is_array())
    throw ConfigError("/estimators", "expected an array");
  for (std::size_t i = 0; i < j.at("estimators").size(); ++i) {
    const auto ptr = "/estimators/" + std::to_string(i);
    const auto& v = j.at("estimators")[i];
    if (!v.is_string()) throw ConfigError(ptr, "expected a string");
    try {
      c.estimators.push_back(EstimatorSpec::parse(v.get<std::string>()));
    } catch (const ParameterError& e) {
      throw ConfigError(ptr, e.what());
    }
  }

  if (!j.contains("statistics") || !j.at("statistics").is_array())
    throw ConfigError("/statistics", "expected an array");
  for (std::size_t i = 0; i < j.at("statistics").size(); ++i) {
    const auto ptr = "/statistics/" + std::to_string(i);
    const auto& v = j.at("statistics")[i];
    if (!v.is_string()) throw ConfigError(ptr, "expected a string");
    try {
      c.statistics.push_back(parse_statistic(v.get<std::string>()));
    } catch (const ParameterError& e) {
      throw ConfigError(ptr, e.what());
    }
  }

  if (j.contains("checks")) {
    if (!j.at("checks").is_array()) throw ConfigError("/checks", "expected an array");
    for (std::size_t i = 0; i < j.at("checks").size(); ++i) {
      const auto ptr = "/checks/" + std::to_string(i);
      const auto& v = j.at("checks")[i];
      if (!v.is_object()) throw ConfigError(ptr, "expected an object");
      CheckSpec spec;
      spec.name = field<std::string>(v, "name", ptr);
      spec.params = v;
      spec.params.erase("name");
      c.checks.push_back(std::move(spec));
    }
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  try {
    process.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(process.sigma > 0.0 ? "/process/beta" : "/process/sigma", e.what());
  }
  try {
    regime_of(process.beta);
  } catch (const Error& e) {
    throw ConfigError("/process/beta", e.what());
  }
  if (process.trunc_K == 0) throw ConfigError("/process/trunc_K", "trunc_K = 0 leaves no long-range dependence");
  if (n_grid.empty()) throw ConfigError("/n_grid", "at least one sample size is required");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 3) throw ConfigError("/n_grid/" + std::to_string(i), "sample sizes must be >= 3");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw ConfigError("/n_grid/" + std::to_string(i), "n_grid must be strictly ascending");
  }
  if (reps < kMinReps) throw ConfigError("/reps", "reps must be >= " + std::to_string(kMinReps));
  if (grid_m < 4) throw ConfigError("/grid_m", "grid_m must be >= 4");
  if (statistics.empty()) throw ConfigError("/statistics", "no statistics enabled; records would be empty");
  const bool needs_estimator = has(Statistic::ks) || has(Statistic::cvm) || has(Statistic::profile) ||
                               has(Statistic::pointwise);
  const bool any_estimator = std::any_of(estimators.begin(), estimators.end(),
                                         [](const EstimatorSpec& e) { return e.kind() != EstimatorSpec::Kind::none; });
  if (needs_estimator && !any_estimator)
    throw ConfigError("/estimators", "ks, cvm, profile and pointwise need a mean or m:<psi> estimator");
  for (std::size_t i = 0; i < checks.size(); ++i)
    if (std::find(kCheckNames.begin(), kCheckNames.end(), checks[i].name) == kCheckNames.end())
      throw ConfigError("/checks/" + std::to_string(i) + "/name", "unknown check '" + checks[i].name + "'");
}

bool ExperimentConfig::has(Statistic s) const {
  return std::find(statistics.begin(), statistics.end(), s) != statistics.end();
}

json ExperimentConfig::to_json() const {
  json j;
  j["name"] = name;
  j["process"] = {{"beta", process.beta},
                  {"trunc_K", process.trunc_K},
                  {"mu", process.mu},
                  {"sigma", process.sigma},
                  {"innovation", lrdemp::to_string(process.innovation)}};
  j["n_grid"] = n_grid;
  j["reps"] = reps;
  j["grid_m"] = grid_m;
  j["master_seed"] = master_seed;
  j["sigma2_budget"] = sigma2_budget;
  auto est = json::array();
  for (const auto& e : estimators) est.push_back(e.name());
  j["estimators"] = est;
  auto st = json::array();
  for (auto s : statistics) st.push_back(lrdemp::to_string(s));
  j["statistics"] = st;
  auto ch = json::array();
  for (const auto& c : checks) {
    json o = c.params;
    o["name"] = c.name;
    ch.push_back(o);
  }
  j["checks"] = ch;
  return j;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(to_json().dump()); }

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return ExperimentConfig::from_json(j);
}

LimitProxies limit_proxies(double y1, double y2, double ybar, double m_value, const ScalingSet& s) {
  LimitProxies p;
  p.z1 = y1 / s.sigma_n1;
  p.v_n = y2 / s.sigma_n2 - 0.5 * s.c_n * p.z1 * p.z1;
  p.v1_proxy = std::isnan(m_value)
                   ? std::numeric_limits<double>::quiet_NaN()
                   : (ybar - m_value) * static_cast<double>(s.n) / s.sigma_n1 / s.a_n;
  return p;
}

bool ExperimentResult::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::size_t ExperimentResult::failed_records() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const ReplicationRecord& r) { return !r.error.empty(); }));
}

std::vector<const ReplicationRecord*> ExperimentResult::at(std::size_t n) const {
  std::vector<const ReplicationRecord*> out;
  for (const auto& r : records)
    if (r.n == n && r.error.empty()) out.push_back(&r);
  return out;
}

namespace {

struct RunContext {
  const ExperimentConfig& config;
  const MarginalModel& marginal;
  const std::vector<double>& grid;
  const std::vector<double>& f1;
  const std::vector<double>& f0;
  const std::vector<double>& pointwise_points;
};

void fill_record(ReplicationRecord& rec, const RunContext& ctx, const PathGenerator& gen, const ScalingSet& s) {
  const auto& cfg = ctx.config;
  const auto path = gen.generate(rec.seed);
  const auto sums = compute_sums(path, gen.coefficients());
  const double n = static_cast<double>(path.n());
  const double mu = cfg.process.mu;
  const double ybar = sample_mean(path.y);
  rec.y1 = sums.y1;
  rec.y2 = sums.y2;

  if (cfg.has(Statistic::ks_known)) {
    const auto r = ks_known(path, ctx.marginal, s);
    rec.ks_known_raw = r.statistic_raw;
    rec.ks_known = r.statistic_normalized;
  }
  if (cfg.has(Statistic::reduction))
    rec.reduction = reduction_residual(path, ctx.marginal, sums, 2, s.sigma_n2, cfg.grid_m).normalized_sup;

  const SortedSample sorted(path.y);
  const double pointwise_scale = s.regime == Regime::beta_below_3_4 ? n / s.sigma_n2 : std::sqrt(n);
  double first_m = std::numeric_limits<double>::quiet_NaN();
  for (const auto& est : cfg.estimators) {
    EstimatorRecord e;
    e.theta_hat = est.estimate(path.y, mu);
    e.m_diff = (e.theta_hat - ybar) * n / s.sigma_n1;
    if (est.kind() == EstimatorSpec::Kind::m_estimator && std::isnan(first_m)) first_m = e.theta_hat;
    if (cfg.has(Statistic::ks)) {
      const auto r = ks_at(path, ctx.marginal, e.theta_hat, s, est.name());
      e.ks_raw = r.statistic_raw;
      e.ks_norm = r.statistic_normalized;
      e.ks_sigma_n1 = *r.sigma_n1_scaled;
    }
    if (cfg.has(Statistic::cvm)) {
      const auto r = cvm_at(path, ctx.marginal, e.theta_hat, s, est.name());
      e.cvm_raw = r.statistic_raw;
      e.cvm_norm = r.statistic_normalized;
      e.cvm_limit = *r.limit_scaled;
    }
    if (cfg.has(Statistic::profile)) {
      std::vector<double> trace(ctx.grid.size());
      for (std::size_t g = 0; g < ctx.grid.size(); ++g)
        trace[g] = (n / s.sigma_n2) * (sorted.ecdf(ctx.grid[g]) - ctx.marginal.H(ctx.grid[g], e.theta_hat));
      const auto one = profile_regression(trace, ctx.f1);
      const auto two = two_component_regression(trace, ctx.f1, ctx.f0);
      e.profile_slope = one.slope;
      e.profile_r2 = one.r_squared;
      e.coef_f1 = two.coef_f1;
      e.coef_f0 = two.coef_f0;
      if (rec.rep < kTraceReps) rec.traces.push_back(std::move(trace));
    }
    if (cfg.has(Statistic::pointwise))
      for (std::size_t k = 0; k < ctx.pointwise_points.size(); ++k) {
        const double x = ctx.pointwise_points[k];
        e.pointwise[k] = pointwise_scale * (sorted.ecdf(x) - ctx.marginal.H(x, e.theta_hat));
      }
    rec.estimators.push_back(e);
  }
  rec.proxies = limit_proxies(sums.y1, sums.y2, ybar, first_m, s);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs) {
  config.validate();
  ExperimentResult result;
  result.config = config;

  std::vector<PathGenerator> generators;
  for (auto n : config.n_grid) {
    generators.emplace_back(config.process, n);
    result.scalings.push_back(build_scaling_set(config.process, n, {.sigma2_budget = config.sigma2_budget}));
  }
  const auto marginal = marginal_model(generators.front().coefficients(), config.process.mu, config.process.sigma);
  result.cvm_limit_integral = cvm_limit_constant(marginal).integral;

  result.profile_grid = quantile_grid(marginal, config.process.mu, config.grid_m).points;
  std::vector<double> f0;
  for (double x : result.profile_grid) {
    const double z = (x - config.process.mu) / config.process.sigma;
    result.profile_f1.push_back(marginal.pdf_derivative(1, z));
    f0.push_back(marginal.pdf(z));
  }
  for (double p : kPointwiseLevels) result.pointwise_points.push_back(marginal.quantile_H(p, config.process.mu));

  const RunContext ctx{config, marginal, result.profile_grid, result.profile_f1, f0, result.pointwise_points};
  const std::size_t total = config.n_grid.size() * config.reps;
  result.records.resize(total);
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t idx = 0; idx < total; ++idx) {
    const std::size_t ni = idx / config.reps;
    auto& rec = result.records[idx];
    rec.n = config.n_grid[ni];
    rec.rep = idx % config.reps;
    rec.seed = derive_seed(config.master_seed, rec.n, rec.rep);
    try {
      fill_record(rec, ctx, generators[ni], result.scalings[ni]);
    } catch (const std::exception& e) {
      rec.estimators.clear();
      rec.traces.clear();
      rec.error = e.what();
    }
  }

  result.verdicts = evaluate_checks(result);
  return result;
}

namespace {

std::size_t estimator_index(const ExperimentConfig& c, const json& params, bool require_m) {
  if (params.contains("estimator")) {
    const auto name = EstimatorSpec::parse(params.at("estimator").get<std::string>()).name();
    for (std::size_t i = 0; i < c.estimators.size(); ++i)
      if (c.estimators[i].name() == name) {
        if (require_m && c.estimators[i].kind() != EstimatorSpec::Kind::m_estimator)
          throw ParameterError("check needs an m:<psi> estimator, got " + name);
        return i;
      }
    throw ParameterError("estimator " + name + " is not part of this experiment");
  }
  for (std::size_t i = 0; i < c.estimators.size(); ++i) {
    const auto k = c.estimators[i].kind();
    if (require_m ? k == EstimatorSpec::Kind::m_estimator : k != EstimatorSpec::Kind::none) return i;
  }
  throw ParameterError(require_m ? "no m:<psi> estimator configured" : "no estimator configured");
}

std::size_t mean_index(const ExperimentConfig& c) {
  for (std::size_t i = 0; i < c.estimators.size(); ++i)
    if (c.estimators[i].kind() == EstimatorSpec::Kind::mean) return i;
  throw ParameterError("check compares against the sample mean, which is not configured");
}

std::size_t size_param(const ExperimentConfig& c, const json& params) {
  if (!params.contains("n")) return c.n_grid.back();
  const auto n = params.at("n").get<std::size_t>();
  if (std::find(c.n_grid.begin(), c.n_grid.end(), n) == c.n_grid.end())
    throw ParameterError("n = " + std::to_string(n) + " is not in n_grid");
  return n;
}

double num(const json& params, const char* key, double fallback) {
  return params.contains(key) ? params.at(key).get<double>() : fallback;
}

void require(const ExperimentConfig& c, Statistic s) {
  if (!c.has(s)) throw ParameterError("check needs statistic '" + to_string(s) + "'");
}

template <class F>
std::vector<double> collect(const ExperimentResult& r, std::size_t n, F f) {
  std::vector<double> out;
  for (const auto* rec : r.at(n)) out.push_back(f(*rec));
  if (out.size() < 2) throw ParameterError("fewer than 2 successful records at n = " + std::to_string(n));
  return out;
}

template <class F>
std::vector<double> medians_over_grid(const ExperimentResult& r, F f) {
  std::vector<double> out;
  for (auto n : r.config.n_grid) out.push_back(stats::median(collect(r, n, f)));
  return out;
}

Verdict evaluate_one(const ExperimentResult& r, const CheckSpec& spec) {
  const auto& c = r.config;
  const auto& p = spec.params;
  const auto& name = spec.name;
  if (name == "negligibility") {
    require(c, Statistic::ks);
    const auto e = estimator_index(c, p, false);
    auto v = check_negligibility(medians_over_grid(r, [e](const auto& x) { return x.estimators[e].ks_sigma_n1; }),
                                 num(p, "factor", 0.5));
    v.details["estimator"] = c.estimators[e].name();
    return v;
  }
  if (name == "profile_proportionality") {
    require(c, Statistic::profile);
    const auto e = estimator_index(c, p, false);
    const auto n = size_param(c, p);
    auto v = check_profile_proportionality(collect(r, n, [e](const auto& x) { return x.estimators[e].profile_r2; }),
                                           collect(r, n, [e](const auto& x) { return x.estimators[e].profile_slope; }),
                                           collect(r, n, [](const auto& x) { return x.proxies.v_n; }),
                                           num(p, "r2_min", 0.9), num(p, "corr_min", 0.9));
    v.details["estimator"] = c.estimators[e].name();
    v.details["n"] = n;
    return v;
  }
  if (name == "m_estimator_branch") {
    require(c, Statistic::profile);
    const auto e = estimator_index(c, p, true);
    const auto n = size_param(c, p);
    const auto marginal = MarginalModel(gen_coefficients(c.process.beta, c.process.trunc_K), c.process.mu, c.process.sigma);
    const double lambda2 = lambda_k(c.estimators[e].psi(), marginal, 2);
    const auto classified = second_order_rank(c.process.beta, lambda2);
    const auto claimed = p.contains("rank") ? parse_rank(p.at("rank").get<std::string>()) : classified;
    auto v = check_m_estimator_branch(claimed, classified,
                                      collect(r, n, [e](const auto& x) { return x.estimators[e].coef_f0; }),
                                      num(p, "t_max", 3.0));
    v.details["lambda2"] = lambda2;
    v.details["f1_coefficient_mean"] = stats::mean(collect(r, n, [e](const auto& x) { return x.estimators[e].coef_f1; }));
    v.details["estimator"] = c.estimators[e].name();
    return v;
  }
  if (name == "gaussian_regime") {
    require(c, Statistic::pointwise);
    if (regime_of(c.process.beta) != Regime::beta_above_3_4)
      throw RegimeError("gaussian_regime applies to beta > 3/4 only");
    if (c.n_grid.size() < 2) throw ParameterError("gaussian_regime needs two sample sizes");
    const auto e = estimator_index(c, p, false);
    std::vector<std::vector<double>> a, b;
    for (std::size_t k = 0; k < kPointwiseLevels.size(); ++k) {
      a.push_back(collect(r, c.n_grid.front(), [e, k](const auto& x) { return x.estimators[e].pointwise[k]; }));
      b.push_back(collect(r, c.n_grid.back(), [e, k](const auto& x) { return x.estimators[e].pointwise[k]; }));
    }
    auto v = check_gaussian_regime(a, b, num(p, "skew_max", 0.35), num(p, "kurt_max", 0.7), num(p, "ks_max", 0.1));
    v.details["estimator"] = c.estimators[e].name();
    return v;
  }
  if (name == "reduction_rate") {
    require(c, Statistic::reduction);
    std::vector<double> ns(c.n_grid.begin(), c.n_grid.end());
    return check_reduction_rate(ns, medians_over_grid(r, [](const auto& x) { return x.reduction; }),
                                num(p, "max_slope", -0.05));
  }
  if (name == "ks_limit") {
    require(c, Statistic::ks_known);
    const auto n = size_param(c, p);
    const auto sample = collect(r, n, [](const auto& x) { return x.ks_known; });
    const auto marginal = MarginalModel(gen_coefficients(c.process.beta, c.process.trunc_K), c.process.mu, c.process.sigma);
    std::mt19937_64 rng(derive_seed(c.master_seed, 0x6b735f6c696d6974ULL, 0));
    std::normal_distribution<double> z;
    std::vector<double> reference(sample.size());
    for (auto& v : reference) v = std::abs(z(rng)) * marginal.sup_density();
    auto v = check_distribution_match("ks_limit", sample, reference, num(p, "ks_max", 0.1));
    v.details["n"] = n;
    return v;
  }
  if (name == "z1_normality") {
    const auto n = size_param(c, p);
    return check_standard_normal_moments(collect(r, n, [](const auto& x) { return x.proxies.z1; }),
                                         num(p, "mean_tol", 0.15), num(p, "var_tol", 0.15));
  }
  if (name == "replication_independence") {
    const auto n = size_param(c, p);
    return check_replication_independence(collect(r, n, [](const auto& x) { return x.proxies.z1; }),
                                          num(p, "max_abs", 0.1));
  }
  if (name == "m_equivalence") {
    const auto e = estimator_index(c, p, true);
    auto v = check_strictly_decreasing(
        "m_equivalence", medians_over_grid(r, [e](const auto& x) { return std::abs(x.estimators[e].m_diff); }));
    v.details["estimator"] = c.estimators[e].name();
    return v;
  }
  if (name == "cvm_consistency") {
    require(c, Statistic::cvm);
    const auto e = estimator_index(c, p, false);
    const auto n = size_param(c, p);
    const double k = r.cvm_limit_integral / c.process.sigma;
    auto v = check_correlation("cvm_consistency", collect(r, n, [e](const auto& x) { return x.estimators[e].cvm_norm; }),
                               collect(r, n, [k](const auto& x) { return k * x.proxies.v_n * x.proxies.v_n; }),
                               num(p, "corr_min", 0.9));
    v.details["estimator"] = c.estimators[e].name();
    v.details["limit_integral"] = r.cvm_limit_integral;
    return v;
  }
  if (name == "sigma_psi") {
    if (regime_of(c.process.beta) != Regime::beta_above_3_4)
      throw RegimeError("sigma_psi applies to beta > 3/4 only");
    const auto e = estimator_index(c, p, true);
    const auto n = size_param(c, p);
    const auto ni = static_cast<std::size_t>(std::find(c.n_grid.begin(), c.n_grid.end(), n) - c.n_grid.begin());
    const double to_sqrt_n = r.scalings[ni].sigma_n1 / std::sqrt(static_cast<double>(n));
    auto v = check_positive_variance(
        "sigma_psi", collect(r, n, [e, to_sqrt_n](const auto& x) { return x.estimators[e].m_diff * to_sqrt_n; }),
        num(p, "min_se", 5.0));
    v.details["estimator"] = c.estimators[e].name();
    return v;
  }
  if (name == "variance_inflation") {
    require(c, Statistic::pointwise);
    const auto e = estimator_index(c, p, true);
    const auto b = mean_index(c);
    const auto n = size_param(c, p);
    const std::size_t mid = 2;  // level 0.5, x = mu
    auto v = check_variance_inflation(collect(r, n, [e, mid](const auto& x) { return x.estimators[e].pointwise[mid]; }),
                                      collect(r, n, [b, mid](const auto& x) { return x.estimators[b].pointwise[mid]; }),
                                      num(p, "min_se", 3.0));
    v.details["estimator"] = c.estimators[e].name();
    return v;
  }
  throw ParameterError("unknown check '" + name + "'");
}

}  // namespace

std::vector<Verdict> evaluate_checks(const ExperimentResult& result) {
  std::vector<Verdict> out;
  for (const auto& spec : result.config.checks) {
    try {
      out.push_back(evaluate_one(result, spec));
    } catch (const std::exception& e) {
      Verdict v = named(spec.name);
      v.measured = std::numeric_limits<double>::quiet_NaN();
      v.error = e.what();
      out.push_back(v);
    }
    out.back().details["params"] = spec.params;
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string column_prefix(const EstimatorSpec& e) {
  auto s = e.name();
  for (auto& ch : s)
    if (ch == ':' || ch == '.') ch = '_';
  return s;
}

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void write_results_csv(std::ostream& os, const ExperimentResult& r) {
  const auto& c = r.config;
  os << "n,rep,seed,y1,y2,z1,v_n,v1_proxy,ks_known_raw,ks_known,reduction";
  for (const auto& e : c.estimators) {
    const auto p = column_prefix(e);
    for (const char* f : {"theta_hat", "m_diff", "ks_raw", "ks_norm", "ks_sigma_n1", "cvm_raw", "cvm_norm",
                          "cvm_limit", "profile_slope", "profile_r2", "coef_f1", "coef_f0"})
      os << ',' << p << '_' << f;
    for (double lvl : kPointwiseLevels) os << ',' << p << "_pw_" << static_cast<int>(std::lround(lvl * 10));
  }
  os << ",error\n";
  for (const auto& rec : r.records) {
    os << rec.n << ',' << rec.rep << ',' << rec.seed << ',' << fmt(rec.y1) << ',' << fmt(rec.y2) << ','
       << fmt(rec.proxies.z1) << ',' << fmt(rec.proxies.v_n) << ',' << fmt(rec.proxies.v1_proxy) << ','
       << fmt(rec.ks_known_raw) << ',' << fmt(rec.ks_known) << ',' << fmt(rec.reduction);
    for (std::size_t i = 0; i < c.estimators.size(); ++i) {
      const EstimatorRecord e = i < rec.estimators.size() ? rec.estimators[i] : EstimatorRecord{};
      for (double v : {e.theta_hat, e.m_diff, e.ks_raw, e.ks_norm, e.ks_sigma_n1, e.cvm_raw, e.cvm_norm, e.cvm_limit,
                       e.profile_slope, e.profile_r2, e.coef_f1, e.coef_f0})
        os << ',' << fmt(v);
      for (double v : e.pointwise) os << ',' << fmt(v);
    }
    os << ',' << (rec.error.empty() ? "" : csv_escape(rec.error)) << '\n';
  }
}

json verdicts_json(const ExperimentResult& r, const std::string& tool_version) {
  json j;
  j["tool_version"] = tool_version;
  j["config_hash"] = r.config.hash();
  j["experiment"] = r.config.name;
  j["master_seed"] = r.config.master_seed;
  j["records"] = r.records.size();
  j["failed_records"] = r.failed_records();
  auto errs = json::array();
  for (const auto& rec : r.records)
    if (!rec.error.empty() && errs.size() < 5)
      errs.push_back({{"n", rec.n}, {"rep", rec.rep}, {"error", rec.error}});
  j["record_errors"] = errs;
  auto sc = json::array();
  for (const auto& s : r.scalings) sc.push_back(to_json(s));
  j["scalings"] = sc;
  auto checks = json::array();
  for (const auto& v : r.verdicts) checks.push_back(to_json(v));
  j["checks"] = checks;
  j["all_pass"] = r.all_pass();
  return j;
}

void write_profile_traces_csv(std::ostream& os, const ExperimentResult& r) {
  os << "n,rep,estimator,x,value,f1\n";
  if (!r.config.has(Statistic::profile)) return;
  for (const auto& rec : r.records) {
    for (std::size_t e = 0; e < rec.traces.size(); ++e) {
      const auto& trace = rec.traces[e];
      for (std::size_t g = 0; g < trace.size(); ++g)
        os << rec.n << ',' << rec.rep << ',' << r.config.estimators[e].name() << ',' << fmt(r.profile_grid[g]) << ','
           << fmt(trace[g]) << ',' << fmt(r.profile_f1[g]) << '\n';
    }
  }
}

void write_medians_csv(std::ostream& os, const ExperimentResult& r) {
  const auto& c = r.config;
  os << "n,quantity,estimator,median\n";
  for (auto n : c.n_grid) {
    const auto recs = r.at(n);
    if (recs.empty()) continue;
    auto emit = [&](const std::string& q, const std::string& est, auto f) {
      std::vector<double> v;
      for (const auto* rec : recs) v.push_back(f(*rec));
      os << n << ',' << q << ',' << est << ',' << fmt(stats::median(v)) << '\n';
    };
    if (c.has(Statistic::ks_known)) emit("ks_known", "none", [](const auto& x) { return x.ks_known; });
    if (c.has(Statistic::reduction)) emit("reduction", "none", [](const auto& x) { return x.reduction; });
    for (std::size_t e = 0; e < c.estimators.size(); ++e) {
      const auto name = c.estimators[e].name();
      if (c.has(Statistic::ks)) {
        emit("ks_sigma_n1", name, [e](const auto& x) { return x.estimators[e].ks_sigma_n1; });
        emit("ks_norm", name, [e](const auto& x) { return x.estimators[e].ks_norm; });
      }
      if (c.has(Statistic::cvm)) emit("cvm_norm", name, [e](const auto& x) { return x.estimators[e].cvm_norm; });
      if (c.estimators[e].kind() == EstimatorSpec::Kind::m_estimator)
        emit("abs_m_diff", name, [e](const auto& x) { return std::abs(x.estimators[e].m_diff); });
    }
  }
}

void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentResult& r,
                              const std::string& tool_version) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto open = [&](const char* file) {
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / file).string());
    return out;
  };
  {
    auto out = open("results.csv");
    write_results_csv(out, r);
  }
  {
    auto out = open("verdicts.json");
    out << verdicts_json(r, tool_version).dump(2) << '\n';
  }
  {
    auto out = open("profile_traces.csv");
    write_profile_traces_csv(out, r);
  }
  {
    auto out = open("medians.csv");
    write_medians_csv(out, r);
  }
}

}  // namespace lrdemp
