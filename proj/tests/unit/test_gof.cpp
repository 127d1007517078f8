#include <catch2/catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "../support/oracles.hpp"
#include "lrdemp/errors.hpp"
#include "lrdemp/gof.hpp"
#include "lrdemp/seeding.hpp"

using namespace lrdemp;
using Catch::Approx;

namespace {
struct Fixture {
  ProcessConfig cfg;
  std::size_t n;
  PathGenerator gen;
  MarginalModel marginal;
  ScalingSet s;
  Fixture(double beta, std::size_t n_, double mu = 0.0, double sigma = 1.0)
      : cfg(make(beta, mu, sigma)), n(n_), gen(cfg, n_),
        marginal(marginal_model(gen.coefficients(), mu, sigma)), s(build_scaling_set(cfg, n_)) {}
  static ProcessConfig make(double beta, double mu, double sigma) {
    ProcessConfig c;
    c.beta = beta;
    c.trunc_K = 8192;
    c.mu = mu;
    c.sigma = sigma;
    return c;
  }
};
}  // namespace

TEST_CASE("ks_known on a single observation", "[gof]") {
  const auto cfg = Fixture::make(0.7, 0.0, 1.0);
  const PathGenerator gen(cfg, 1);
  const auto marginal = marginal_model(gen.coefficients(), 0.0, 1.0);
  // Scaling sets need n >= 2; only sigma_{1,1} matters here.
  ScalingSet s;
  s.n = 1;
  s.beta = cfg.beta;
  s.sigma_n1 = std::sqrt(exact_sigma1_sq(1, gen.coefficients()));
  const auto path = gen.from_innovations(std::vector<double>(cfg.trunc_K + 1, 0.0));
  const auto r = ks_known(path, marginal, s);
  CHECK(r.statistic_raw == Approx(0.5));
  CHECK(r.normalization == Normalization::sigma_n1_n);
  CHECK(r.statistic_normalized == Approx(0.5 / s.sigma_n1));
}

TEST_CASE("ks at the true theta is ks_known", "[gof]") {
  Fixture f(0.65, 1024, 2.0, 0.5);
  const auto path = f.gen.generate(9);
  const auto known = ks_known(path, f.marginal, f.s);
  const auto at = ks_at(path, f.marginal, 2.0, f.s);
  CHECK(at.statistic_raw == known.statistic_raw);
  CHECK(*at.sigma_n1_scaled == Approx(known.statistic_normalized));
  CHECK(at.normalization == Normalization::sigma_n2_n);
  CHECK(at.normalization_value == Approx(1024.0 / f.s.sigma_n2));
}

TEST_CASE("CvM order statistic formula", "[gof]") {
  CHECK(cvm_order_statistic_sum(std::vector<double>{0.5}) == Approx(1.0 / 12.0));
  CHECK(cvm_order_statistic_sum(std::vector<double>{0.25, 0.75}) == Approx(1.0 / 24.0));
  CHECK_THROWS_AS(cvm_order_statistic_sum(std::vector<double>{0.0, 0.5}), NumericDomainError);
  CHECK_THROWS_AS(cvm_order_statistic_sum(std::vector<double>{0.5, 1.0}), NumericDomainError);

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> u(100);
  for (auto& v : u) v = unif(rng);
  std::sort(u.begin(), u.end());
  CHECK(cvm_order_statistic_sum(u) / 100.0 == Approx(oracle::cvm_trapezoid(u, 100000)).margin(1e-6));
}

TEST_CASE("CvM is bounded by KS squared", "[gof]") {
  Fixture f(0.7, 2048);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto path = f.gen.generate(seed);
    const double theta = sample_mean(path.y);
    const auto ks = ks_at(path, f.marginal, theta, f.s);
    const auto cvm = cvm_at(path, f.marginal, theta, f.s);
    CHECK(cvm.statistic_raw <= ks.statistic_raw * ks.statistic_raw);
    CHECK(*cvm.limit_scaled == Approx(cvm.statistic_raw * std::pow(2048.0 / f.s.sigma_n2, 2)));
  }
}

TEST_CASE("CvM limit constant", "[gof]") {
  const MarginalModel unit(1.0, 0.0, 1.0);
  const double closed = 1.0 / (2.0 * std::numbers::pi * std::pow(3.0, 1.5));
  CHECK(cvm_limit_constant(unit).integral == Approx(closed).epsilon(1e-9));
  CHECK(cvm_limit_constant(unit).integral == Approx(0.030629).margin(5e-7));
  const MarginalModel wide(4.0, 0.0, 2.0);
  CHECK(cvm_limit_constant(wide).integral == Approx(closed / 16.0).epsilon(1e-9));
  CHECK(cvm_limit_constant(wide).sigma_factor == Approx(0.5));

  // (f')^2 f is even, so the half lines carry equal mass.
  auto g = [&](double z) {
    const double d = unit.pdf_derivative(1, z);
    return d * d * unit.pdf(z);
  };
  using boost::math::quadrature::gauss_kronrod;
  const double left = gauss_kronrod<double, 61>::integrate(g, -12.0, 0.0);
  const double right = gauss_kronrod<double, 61>::integrate(g, 0.0, 12.0);
  CHECK(std::abs(left - right) < 1e-10);
}

TEST_CASE("normalisation follows the regime", "[gof]") {
  Fixture low(0.65, 512);
  Fixture high(0.85, 512);
  const auto pl = low.gen.generate(1);
  const auto ph = high.gen.generate(1);
  const auto m = EstimatorSpec::mean();
  CHECK(ks_estimated(pl, low.marginal, m, low.s).normalization == Normalization::sigma_n2_n);
  CHECK(ks_estimated(ph, high.marginal, m, high.s).normalization == Normalization::sqrt_n);
  CHECK(ks_estimated(ph, high.marginal, m, high.s).normalization_value == Approx(std::sqrt(512.0)));
  CHECK_THROWS_AS(ks_estimated(pl, low.marginal, m, low.s, Normalization::sqrt_n), RegimeError);
  CHECK_THROWS_AS(ks_estimated(ph, high.marginal, m, high.s, Normalization::sigma_n2_n), RegimeError);
  CHECK_THROWS_AS(ks_estimated(pl, low.marginal, EstimatorSpec::none(), low.s), ParameterError);
  CHECK(cvm_estimated(pl, low.marginal, m, low.s).normalization == Normalization::sigma_n2_n);
}

TEST_CASE("estimator specs", "[gof]") {
  CHECK(EstimatorSpec::parse("mean").kind() == EstimatorSpec::Kind::mean);
  CHECK(EstimatorSpec::parse("none").kind() == EstimatorSpec::Kind::none);
  CHECK(EstimatorSpec::parse("m:huber").name().rfind("m:huber", 0) == 0);
  CHECK_THROWS_AS(EstimatorSpec::parse("m:bogus"), ParameterError);
  const std::vector<double> y{1.0, 2.0, 6.0};
  CHECK(EstimatorSpec::mean().estimate(y, 0.0) == Approx(3.0));
  CHECK(EstimatorSpec::none().estimate(y, 0.25) == 0.25);
  CHECK(EstimatorSpec::parse("m:sign").estimate(y, 0.0) == Approx(2.0).margin(1e-8));
}

TEST_CASE("gof JSON keys", "[gof]") {
  Fixture f(0.7, 256);
  const auto path = f.gen.generate(5);
  const auto j = to_json(cvm_estimated(path, f.marginal, EstimatorSpec::mean(), f.s));
  for (const char* key : {"stat", "raw", "normalized", "normalization", "estimator", "n", "beta", "seed"})
    CHECK(j.contains(key));
  CHECK(j["stat"] == "cvm");
  CHECK(j["normalization"] == "sigma_n2_n");
}
