#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrdemp/scalings.hpp"

/// Statistical verdicts. Each check works on plain numbers so it can be fed
/// synthetic inputs; the harness extracts those numbers from its records.
namespace lrdemp {

struct Verdict {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  nlohmann::json details = nlohmann::json::object();
  std::string error;  ///< non-empty when the check could not be evaluated
};

inline Verdict named(std::string name) {
  Verdict v;
  v.name = std::move(name);
  return v;
}

nlohmann::json to_json(const Verdict& v);

/// Strictly decreasing medians and last < factor * first. Needs >= 3 sizes.
Verdict check_negligibility(std::span<const double> medians, double factor = 0.5);

struct ProfileRegression {
  double slope = 0.0;
  double r_squared = 0.0;
};
ProfileRegression profile_regression(std::span<const double> trace, std::span<const double> f1);

struct TwoComponentRegression {
  double coef_f1 = 0.0;
  double coef_f0 = 0.0;
  double r_squared = 0.0;
};
TwoComponentRegression two_component_regression(std::span<const double> trace, std::span<const double> f1,
                                                std::span<const double> f0);

/// Mean R^2 >= r2_min and corr(slopes, v) >= corr_min.
Verdict check_profile_proportionality(std::span<const double> r_squared, std::span<const double> slopes,
                                      std::span<const double> v, double r2_min = 0.9,
                                      double corr_min = 0.9);

/// rank_gt_2: pooled |t| of the f-coefficient < t_max; rank_2: |t| >= t_max.
/// Throws ConsistencyError when `claimed` differs from `classified`.
Verdict check_m_estimator_branch(SecondOrderRank claimed, SecondOrderRank classified,
                                 std::span<const double> f0_coefficients, double t_max = 3.0);

struct NormalityScreen {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  bool pass = false;
};
NormalityScreen normality_screen(std::span<const double> x, double skew_max = 0.35, double kurt_max = 0.7);

/// points[k] holds the replication samples at grid point k for the smaller
/// (`a`) and larger (`b`) sample size.
Verdict check_gaussian_regime(const std::vector<std::vector<double>>& a,
                              const std::vector<std::vector<double>>& b, double skew_max = 0.35,
                              double kurt_max = 0.7, double ks_max = 0.1);

/// OLS slope of log median on log n must be <= max_slope. Needs >= 3 sizes.
Verdict check_reduction_rate(std::span<const double> ns, std::span<const double> medians,
                             double max_slope = -0.05);

/// Two-sample KS distance between `sample` and `reference` < ks_max.
Verdict check_distribution_match(const std::string& name, std::span<const double> sample,
                                 std::span<const double> reference, double ks_max = 0.1);

/// Mean within mean_tol of 0 and variance within var_tol of 1.
Verdict check_standard_normal_moments(std::span<const double> z, double mean_tol = 0.15,
                                      double var_tol = 0.15);

Verdict check_replication_independence(std::span<const double> z, double max_abs = 0.1);

/// Strictly decreasing medians over the grid (>= 2 sizes).
Verdict check_strictly_decreasing(const std::string& name, std::span<const double> medians);

Verdict check_correlation(const std::string& name, std::span<const double> x, std::span<const double> y,
                          double corr_min = 0.9);

/// Sample variance positive by at least min_se standard errors.
Verdict check_positive_variance(const std::string& name, std::span<const double> x, double min_se = 5.0);

/// Var(inflated) - Var(base) >= min_se standard errors of the difference.
Verdict check_variance_inflation(std::span<const double> inflated, std::span<const double> base,
                                 double min_se = 3.0);

}  // namespace lrdemp
