#include "lrdemp/stats.hpp"

#include <cmath>

#include <boost/math/statistics/bivariate_statistics.hpp>
#include <boost/math/statistics/univariate_statistics.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrdemp::stats {
namespace bms = boost::math::statistics;

namespace {
void need(std::span<const double> x, std::size_t k, const char* what) {
  if (x.size() < k) throw std::invalid_argument(std::string(what) + ": sample too small");
}
}  // namespace

double mean(std::span<const double> x) {
  need(x, 1, "mean");
  return bms::mean(x.begin(), x.end());
}

double sample_variance(std::span<const double> x) {
  need(x, 2, "sample_variance");
  return bms::sample_variance(x.begin(), x.end());
}

double median(std::span<const double> x) {
  need(x, 1, "median");
  std::vector<double> tmp(x.begin(), x.end());
  return bms::median(tmp.begin(), tmp.end());
}

double quantile(std::span<const double> x, double p) {
  need(x, 1, "quantile");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double h = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double skewness(std::span<const double> x) {
  need(x, 3, "skewness");
  return bms::skewness(x.begin(), x.end());
}

double excess_kurtosis(std::span<const double> x) {
  need(x, 4, "excess_kurtosis");
  return bms::excess_kurtosis(x.begin(), x.end());
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("correlation: size mismatch");
  need(x, 2, "correlation");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  return bms::correlation_coefficient(a, b);
}

double lag1_autocorrelation(std::span<const double> x) {
  need(x, 3, "lag1_autocorrelation");
  const double m = mean(x);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - m) * (x[i] - m);
    if (i + 1 < x.size()) num += (x[i] - m) * (x[i + 1] - m);
  }
  return num / den;
}

Estimate variance_with_error(std::span<const double> x) {
  need(x, 2, "variance_with_error");
  const double m = mean(x);
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    m2 += d;
    m4 += d * d;
  }
  const double n = static_cast<double>(x.size());
  const double mu2 = m2 / n;
  const double mu4 = m4 / n;
  return {m2 / (n - 1.0), std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / n)};
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  need(a, 1, "ks_distance");
  need(b, 1, "ks_distance");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("ols_slope: size mismatch");
  need(x, 2, "ols_slope");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("ols_slope: constant regressor");
  return sxy / sxx;
}

ProfileFit fit_no_intercept(std::span<const double> y, std::span<const std::vector<double>> columns) {
  if (columns.empty() || columns.size() > 2)
    throw std::invalid_argument("fit_no_intercept supports one or two regressors");
  for (const auto& c : columns)
    if (c.size() != y.size()) throw std::invalid_argument("fit_no_intercept: size mismatch");
  auto dot = [&](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  ProfileFit fit;
  const double yy = dot(y, y);
  std::vector<double> fitted(y.size(), 0.0);
  if (columns.size() == 1) {
    const double xx = dot(columns[0], columns[0]);
    if (xx == 0.0) throw std::invalid_argument("fit_no_intercept: zero regressor");
    const double b = dot(columns[0], y) / xx;
    fit.coefficients = {b};
    for (std::size_t i = 0; i < y.size(); ++i) fitted[i] = b * columns[0][i];
  } else {
    const double a11 = dot(columns[0], columns[0]);
    const double a12 = dot(columns[0], columns[1]);
    const double a22 = dot(columns[1], columns[1]);
    const double r1 = dot(columns[0], y);
    const double r2 = dot(columns[1], y);
    const double det = a11 * a22 - a12 * a12;
    if (std::abs(det) <= 1e-14 * a11 * a22)
      throw std::invalid_argument("fit_no_intercept: collinear regressors");
    const double b1 = (a22 * r1 - a12 * r2) / det;
    const double b2 = (a11 * r2 - a12 * r1) / det;
    fit.coefficients = {b1, b2};
    for (std::size_t i = 0; i < y.size(); ++i) fitted[i] = b1 * columns[0][i] + b2 * columns[1][i];
  }
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) rss += (y[i] - fitted[i]) * (y[i] - fitted[i]);
  fit.r_squared = yy > 0.0 ? 1.0 - rss / yy : 0.0;
  return fit;
}

}  // namespace lrdemp::stats
