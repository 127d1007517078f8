#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lrdemp/stats.hpp"

using namespace lrdemp;
using Catch::Approx;

TEST_CASE("descriptive statistics on small samples", "[stats]") {
  const std::vector<double> x{1, 2, 3, 4, 10};
  CHECK(stats::mean(x) == Approx(4.0));
  CHECK(stats::sample_variance(x) == Approx(12.5));
  CHECK(stats::median(x) == Approx(3.0));
  CHECK(stats::median(std::vector<double>{4, 1, 3, 2}) == Approx(2.5));
  CHECK(stats::quantile(x, 0.0) == 1.0);
  CHECK(stats::quantile(x, 1.0) == 10.0);
  CHECK(stats::quantile(x, 0.25) == Approx(2.0));
  CHECK(stats::quantile(x, 0.9) == Approx(7.6));
  CHECK(stats::skewness(std::vector<double>{1, 2, 3}) == Approx(0.0).margin(1e-15));
}

TEST_CASE("moments of known distributions", "[stats]") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  std::vector<double> g(200000), chi(200000);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = z(rng);
    const double w = z(rng);
    chi[i] = w * w;
  }
  CHECK(std::abs(stats::skewness(g)) < 0.02);
  CHECK(std::abs(stats::excess_kurtosis(g)) < 0.05);
  CHECK(stats::skewness(chi) == Approx(std::sqrt(8.0)).epsilon(0.05));
  CHECK(stats::excess_kurtosis(chi) == Approx(12.0).epsilon(0.1));
  const auto ve = stats::variance_with_error(g);
  CHECK(std::abs(ve.value - 1.0) < 4 * ve.std_error);
  CHECK(ve.std_error == Approx(std::sqrt(2.0 / g.size())).epsilon(0.05));
}

TEST_CASE("correlation, slope and lag-1 autocorrelation", "[stats]") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{3, 5, 7, 9, 11};
  CHECK(stats::correlation(x, y) == Approx(1.0));
  CHECK(stats::ols_slope(x, y) == Approx(2.0));
  const std::vector<double> alt{1, -1, 1, -1, 1, -1};
  CHECK(stats::lag1_autocorrelation(alt) < -0.8);
}

TEST_CASE("two-sample KS distance", "[stats]") {
  const std::vector<double> a{1, 2, 3, 4};
  CHECK(stats::ks_distance(a, a) == 0.0);
  CHECK(stats::ks_distance(a, std::vector<double>{10, 11}) == 1.0);
  CHECK(stats::ks_distance(a, std::vector<double>{2.5}) == Approx(0.5));
}

TEST_CASE("no-intercept fits", "[stats]") {
  const std::vector<double> f1{1, -2, 3, 0.5};
  const std::vector<double> f0{0.2, 0.4, 0.1, 0.9};
  std::vector<double> y(4);
  for (int i = 0; i < 4; ++i) y[i] = 3.7 * f1[i];
  const std::vector<double> one[1] = {f1};
  const auto fit = stats::fit_no_intercept(y, one);
  CHECK(fit.coefficients[0] == Approx(3.7));
  CHECK(fit.r_squared == Approx(1.0));
  for (int i = 0; i < 4; ++i) y[i] = 2.0 * f1[i] - 0.5 * f0[i];
  const std::vector<double> two[2] = {f1, f0};
  const auto fit2 = stats::fit_no_intercept(y, two);
  CHECK(fit2.coefficients[0] == Approx(2.0));
  CHECK(fit2.coefficients[1] == Approx(-0.5));
}
