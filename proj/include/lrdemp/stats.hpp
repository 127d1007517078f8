#pragma once

#include <cstddef>
#include <span>
#include <vector>

/// Small descriptive-statistics toolkit used by the estimators and the harness.
namespace lrdemp::stats {

double mean(std::span<const double> x);
/// Unbiased (n - 1) variance.
double sample_variance(std::span<const double> x);
double median(std::span<const double> x);
/// Type-7 (linear interpolation) quantile, p in [0, 1].
double quantile(std::span<const double> x, double p);
double skewness(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);
double correlation(std::span<const double> x, std::span<const double> y);
double lag1_autocorrelation(std::span<const double> x);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Sample variance and its standard error sqrt((m4 - m2^2) / n).
Estimate variance_with_error(std::span<const double> x);

/// sup_t |F_a(t) - F_b(t)| between the two empirical distributions.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// Ordinary least-squares slope of y on x (with intercept).
double ols_slope(std::span<const double> x, std::span<const double> y);

struct ProfileFit {
  std::vector<double> coefficients;
  double r_squared = 0.0;  ///< uncentered: 1 - RSS / sum y^2
};

/// Least squares without intercept of y on the given regressor columns (1 or 2).
ProfileFit fit_no_intercept(std::span<const double> y, std::span<const std::vector<double>> columns);

}  // namespace lrdemp::stats
