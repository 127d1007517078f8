#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrdemp/checks.hpp"
#include "lrdemp/gof.hpp"
#include "lrdemp/process.hpp"
#include "lrdemp/scalings.hpp"

namespace lrdemp {

inline constexpr std::size_t kMinReps = 50;
/// Pointwise statistics are taken at these H(.; mu)-quantiles; 0.5 is x = mu.
inline constexpr std::array<double, 5> kPointwiseLevels{0.1, 0.3, 0.5, 0.7, 0.9};
/// Replications per size whose full profile traces are kept for plotting.
inline constexpr std::size_t kTraceReps = 3;

enum class Statistic { ks_known, ks, cvm, profile, pointwise, reduction };
std::string to_string(Statistic s);
Statistic parse_statistic(const std::string& name);

struct CheckSpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

struct ExperimentConfig {
  std::string name = "experiment";
  ProcessConfig process;
  std::vector<std::size_t> n_grid;
  std::size_t reps = kMinReps;
  std::vector<EstimatorSpec> estimators;
  std::vector<Statistic> statistics;
  std::size_t grid_m = 64;
  std::vector<CheckSpec> checks;
  std::uint64_t master_seed = 1;
  std::size_t sigma2_budget = kDefaultSigma2Budget;

  /// Throws ConfigError with the JSON pointer of the offending field.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
  bool has(Statistic s) const;
  /// FNV-1a over the canonical JSON dump.
  std::string hash() const;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct LimitProxies {
  double z1 = 0.0;        ///< Y_{n,1} / sigma_{n,1}
  double v_n = 0.0;       ///< Y_{n,2} / sigma_{n,2} - c_n z1^2 / 2
  double v1_proxy = 0.0;  ///< a_n^{-1} (n / sigma_{n,1}) (Ybar - M), first M-estimator
};

/// Second-order proxy of the limit V. The minus sign comes from expanding
/// H(x; mu) - H(x; theta_hat) with theta_hat - mu = sigma Xbar.
LimitProxies limit_proxies(double y1, double y2, double ybar, double m_value, const ScalingSet& s);

struct EstimatorRecord {
  double theta_hat = 0.0;
  double ks_raw = 0.0, ks_norm = 0.0, ks_sigma_n1 = 0.0;
  double cvm_raw = 0.0, cvm_norm = 0.0, cvm_limit = 0.0;
  double profile_slope = 0.0, profile_r2 = 0.0;
  double coef_f1 = 0.0, coef_f0 = 0.0;
  double m_diff = 0.0;  ///< (n / sigma_{n,1}) (theta_hat - Ybar)
  std::array<double, kPointwiseLevels.size()> pointwise{};
};

struct ReplicationRecord {
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double y1 = 0.0, y2 = 0.0;
  LimitProxies proxies;
  double ks_known_raw = 0.0, ks_known = 0.0;
  double reduction = 0.0;  ///< sup |S_{n,2}| / sigma_{n,2}
  std::vector<EstimatorRecord> estimators;
  std::vector<std::vector<double>> traces;  ///< a_n^{-1} gamma_hat_n per estimator, rep < kTraceReps
  std::string error;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ScalingSet> scalings;  ///< one per n_grid entry
  std::vector<double> profile_grid;  ///< Y-unit quantile grid
  std::vector<double> profile_f1;    ///< f'((grid - mu) / sigma)
  std::vector<double> pointwise_points;
  std::vector<ReplicationRecord> records;  ///< sorted by (n index, rep)
  std::vector<Verdict> verdicts;
  double cvm_limit_integral = 0.0;

  bool all_pass() const;
  std::size_t failed_records() const;
  /// Successful records at grid size n.
  std::vector<const ReplicationRecord*> at(std::size_t n) const;
};

/// Runs every (n, rep) pair, `jobs` at a time (0 = OpenMP default), then evaluates the checks.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 0);

/// Recomputes the verdicts from stored records.
std::vector<Verdict> evaluate_checks(const ExperimentResult& result);

void write_results_csv(std::ostream& os, const ExperimentResult& r);
nlohmann::json verdicts_json(const ExperimentResult& r, const std::string& tool_version);
void write_profile_traces_csv(std::ostream& os, const ExperimentResult& r);
void write_medians_csv(std::ostream& os, const ExperimentResult& r);

/// Writes results.csv, verdicts.json, profile_traces.csv and medians.csv into `dir`.
void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentResult& r,
                              const std::string& tool_version);

std::string fnv1a_hex(const std::string& data);

}  // namespace lrdemp
