#include "lrdemp/checks.hpp"

#include <algorithm>
#include <cmath>

#include "lrdemp/errors.hpp"
#include "lrdemp/stats.hpp"

namespace lrdemp {

nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j;
  j["name"] = v.name;
  j["pass"] = v.pass;
  j["measured"] = std::isfinite(v.measured) ? nlohmann::json(v.measured) : nlohmann::json(nullptr);
  j["threshold"] = v.threshold;
  j["details"] = v.details;
  if (!v.error.empty()) j["error"] = v.error;
  return j;
}

Verdict check_negligibility(std::span<const double> medians, double factor) {
  if (medians.size() < 3) throw ParameterError("negligibility needs at least 3 grid sizes");
  Verdict v = named("negligibility");
  bool decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) decreasing = decreasing && medians[i] < medians[i - 1];
  v.measured = medians.back() / medians.front();
  v.threshold = factor;
  v.pass = decreasing && v.measured < factor;
  v.details["medians"] = std::vector<double>(medians.begin(), medians.end());
  v.details["strictly_decreasing"] = decreasing;
  return v;
}

ProfileRegression profile_regression(std::span<const double> trace, std::span<const double> f1) {
  const std::vector<double> cols[1] = {std::vector<double>(f1.begin(), f1.end())};
  const auto fit = stats::fit_no_intercept(trace, cols);
  return {fit.coefficients[0], fit.r_squared};
}

TwoComponentRegression two_component_regression(std::span<const double> trace, std::span<const double> f1,
                                                std::span<const double> f0) {
  const std::vector<double> cols[2] = {std::vector<double>(f1.begin(), f1.end()),
                                       std::vector<double>(f0.begin(), f0.end())};
  const auto fit = stats::fit_no_intercept(trace, cols);
  return {fit.coefficients[0], fit.coefficients[1], fit.r_squared};
}

Verdict check_profile_proportionality(std::span<const double> r_squared, std::span<const double> slopes,
                                      std::span<const double> v, double r2_min, double corr_min) {
  Verdict out = named("profile_proportionality");
  out.measured = stats::mean(r_squared);
  out.threshold = r2_min;
  const double corr = stats::correlation(slopes, v);
  out.details["mean_r2"] = out.measured;
  out.details["slope_v_correlation"] = corr;
  out.details["corr_min"] = corr_min;
  out.pass = out.measured >= r2_min && corr >= corr_min;
  return out;
}

Verdict check_m_estimator_branch(SecondOrderRank claimed, SecondOrderRank classified,
                                 std::span<const double> f0_coefficients, double t_max) {
  if (claimed != classified)
    throw ConsistencyError("claimed rank " + to_string(claimed) + " but psi and beta give " +
                           to_string(classified));
  if (f0_coefficients.size() < 2) throw ParameterError("m_estimator_branch needs >= 2 replications");
  Verdict v = named("m_estimator_branch");
  const double m = stats::mean(f0_coefficients);
  const double se = std::sqrt(stats::sample_variance(f0_coefficients) / static_cast<double>(f0_coefficients.size()));
  const double t = se > 0.0 ? m / se : (m == 0.0 ? 0.0 : INFINITY);
  v.measured = std::abs(t);
  v.threshold = t_max;
  v.pass = claimed == SecondOrderRank::rank_gt_2 ? v.measured < t_max : v.measured >= t_max;
  v.details["rank"] = to_string(claimed);
  v.details["f_coefficient_mean"] = m;
  v.details["f_coefficient_se"] = se;
  return v;
}

NormalityScreen normality_screen(std::span<const double> x, double skew_max, double kurt_max) {
  NormalityScreen s;
  s.skewness = stats::skewness(x);
  s.excess_kurtosis = stats::excess_kurtosis(x);
  s.pass = std::abs(s.skewness) < skew_max && std::abs(s.excess_kurtosis) < kurt_max;
  return s;
}

Verdict check_gaussian_regime(const std::vector<std::vector<double>>& a,
                              const std::vector<std::vector<double>>& b, double skew_max,
                              double kurt_max, double ks_max) {
  if (a.size() != b.size() || a.empty()) throw ParameterError("gaussian_regime needs matching point sets");
  Verdict v = named("gaussian_regime");
  v.threshold = ks_max;
  bool pass = true;
  double worst_ks = 0.0;
  auto points = nlohmann::json::array();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto sa = normality_screen(a[k], skew_max, kurt_max);
    const auto sb = normality_screen(b[k], skew_max, kurt_max);
    const double ks = stats::ks_distance(a[k], b[k]);
    worst_ks = std::max(worst_ks, ks);
    pass = pass && sa.pass && sb.pass && ks < ks_max;
    points.push_back({{"skew_a", sa.skewness}, {"kurt_a", sa.excess_kurtosis}, {"skew_b", sb.skewness},
                      {"kurt_b", sb.excess_kurtosis}, {"ks", ks}});
  }
  v.measured = worst_ks;
  v.pass = pass;
  v.details["points"] = points;
  v.details["skew_max"] = skew_max;
  v.details["kurt_max"] = kurt_max;
  return v;
}

Verdict check_reduction_rate(std::span<const double> ns, std::span<const double> medians, double max_slope) {
  if (ns.size() < 3 || ns.size() != medians.size())
    throw ParameterError("reduction_rate needs at least 3 grid sizes");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    lx.push_back(std::log(ns[i]));
    ly.push_back(std::log(medians[i]));
  }
  Verdict v = named("reduction_rate");
  v.measured = stats::ols_slope(lx, ly);
  v.threshold = max_slope;
  v.pass = v.measured <= max_slope;
  v.details["medians"] = std::vector<double>(medians.begin(), medians.end());
  return v;
}

Verdict check_distribution_match(const std::string& name, std::span<const double> sample,
                                 std::span<const double> reference, double ks_max) {
  Verdict v = named(name);
  v.measured = stats::ks_distance(sample, reference);
  v.threshold = ks_max;
  v.pass = v.measured < ks_max;
  v.details["sample_median"] = stats::median(sample);
  v.details["reference_median"] = stats::median(reference);
  return v;
}

Verdict check_standard_normal_moments(std::span<const double> z, double mean_tol, double var_tol) {
  Verdict v = named("z1_normality");
  const double m = stats::mean(z);
  const double var = stats::sample_variance(z);
  v.measured = std::max(std::abs(m), std::abs(var - 1.0));
  v.threshold = std::min(mean_tol, var_tol);
  v.pass = std::abs(m) <= mean_tol && std::abs(var - 1.0) <= var_tol;
  v.details["mean"] = m;
  v.details["variance"] = var;
  return v;
}

Verdict check_replication_independence(std::span<const double> z, double max_abs) {
  Verdict v = named("replication_independence");
  v.measured = std::abs(stats::lag1_autocorrelation(z));
  v.threshold = max_abs;
  v.pass = v.measured < max_abs;
  return v;
}

Verdict check_strictly_decreasing(const std::string& name, std::span<const double> medians) {
  if (medians.size() < 2) throw ParameterError(name + " needs at least 2 grid sizes");
  Verdict v = named(name);
  bool decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) decreasing = decreasing && medians[i] < medians[i - 1];
  v.measured = medians.back() / medians.front();
  v.threshold = 1.0;
  v.pass = decreasing;
  v.details["medians"] = std::vector<double>(medians.begin(), medians.end());
  return v;
}

Verdict check_correlation(const std::string& name, std::span<const double> x, std::span<const double> y,
                          double corr_min) {
  Verdict v = named(name);
  v.measured = stats::correlation(x, y);
  v.threshold = corr_min;
  v.pass = v.measured >= corr_min;
  return v;
}

Verdict check_positive_variance(const std::string& name, std::span<const double> x, double min_se) {
  Verdict v = named(name);
  const auto est = stats::variance_with_error(x);
  v.measured = est.std_error > 0.0 ? est.value / est.std_error : 0.0;
  v.threshold = min_se;
  v.pass = est.value > 0.0 && v.measured > min_se;
  v.details["variance"] = est.value;
  v.details["std_error"] = est.std_error;
  return v;
}

Verdict check_variance_inflation(std::span<const double> inflated, std::span<const double> base, double min_se) {
  Verdict v = named("variance_inflation");
  const auto a = stats::variance_with_error(inflated);
  const auto b = stats::variance_with_error(base);
  const double se = std::hypot(a.std_error, b.std_error);
  const double diff = a.value - b.value;
  v.measured = se > 0.0 ? diff / se : 0.0;
  v.threshold = min_se;
  v.pass = v.measured >= min_se;
  v.details["variance_m"] = a.value;
  v.details["variance_base"] = b.value;
  v.details["difference"] = diff;
  v.details["difference_se"] = se;
  return v;
}

}  // namespace lrdemp
