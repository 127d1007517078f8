#include <catch2/catch_amalgamated.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <numeric>

#include "lrdemp/errors.hpp"
#include "lrdemp/kernels.hpp"
#include "lrdemp/process.hpp"
#include "lrdemp/seeding.hpp"

using namespace lrdemp;
using Catch::Approx;

TEST_CASE("coefficients follow (k+1)^-beta", "[process]") {
  const auto c = gen_coefficients(0.7, 10);
  CHECK(c.c.size() == 11);
  CHECK(c.c[0] == 1.0);
  CHECK(c.c[1] == Approx(0.615572).margin(1e-6));
  for (std::size_t k = 1; k < c.c.size(); ++k) CHECK(c.c[k] < c.c[k - 1]);
  CHECK(c.trunc_K() == 10);
}

TEST_CASE("coefficients are regularly varying", "[process]") {
  const auto c = gen_coefficients(0.7, 100000);
  const std::size_t k = 50000;
  CHECK(std::abs(c.c[2 * k] / c.c[k] - std::pow(2.0, -0.7)) < 1e-4);
}

TEST_CASE("beta outside (1/2, 1) is rejected", "[process]") {
  for (double b : {0.5, 1.0, 1.2, 0.3, std::nan("")}) {
    CHECK_THROWS_AS(gen_coefficients(b, 4), ParameterError);
    ProcessConfig cfg;
    cfg.beta = b;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
  }
  try {
    gen_coefficients(1.2, 4);
  } catch (const ParameterError& e) {
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("(1/2, 1)"));
  }
  ProcessConfig cfg;
  cfg.sigma = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  CHECK_THROWS_AS(generate_path(ProcessConfig{}, 0), ParameterError);
}

TEST_CASE("path bundle invariants", "[process]") {
  ProcessConfig cfg;
  cfg.trunc_K = 64;
  cfg.mu = 2.5;
  cfg.sigma = 1.7;
  cfg.seed = 99;
  const auto p = generate_path(cfg, 50);
  const auto c = gen_coefficients(cfg.beta, cfg.trunc_K);
  REQUIRE(p.eps.size() == 50 + 64);
  for (std::size_t i = 0; i < p.n(); ++i) {
    const long long t = static_cast<long long>(i) + 1;
    double x = 0.0, u = 0.0, q = 0.0;
    for (long long k = 0; k <= 64; ++k) {
      const double e = p.innovation(t - k);
      x += c.c[k] * e;
      if (k >= 1) {
        u += c.c[k] * e;
        q += c.c[k] * c.c[k] * e * e;
      }
    }
    CHECK(p.x[i] == Approx(x).epsilon(1e-10).margin(1e-12));
    CHECK(p.u[i] == Approx(u).epsilon(1e-10).margin(1e-12));
    CHECK(p.q[i] == Approx(q).epsilon(1e-10).margin(1e-12));
    CHECK(p.x[i] == Approx(p.innovation(t) + p.u[i]).epsilon(1e-12).margin(1e-12));
    CHECK(p.y[i] == Approx(1.7 * p.x[i] + 2.5).epsilon(1e-15));
  }
}

TEST_CASE("same seed reproduces the bundle bit for bit", "[process]") {
  ProcessConfig cfg;
  cfg.trunc_K = 1000;
  cfg.seed = 12345;
  const auto a = generate_path(cfg, 777);
  const auto b = generate_path(cfg, 777);
  CHECK(a.eps == b.eps);
  CHECK(a.x == b.x);
  CHECK(a.q == b.q);
  cfg.seed = 12346;
  CHECK(generate_path(cfg, 777).x != a.x);
}

TEST_CASE("fft and direct convolution agree", "[process]") {
  for (std::size_t K : {1u, 7u, 256u, 1024u})
    for (std::size_t n : {1u, 33u, 1024u}) {
      ProcessConfig cfg;
      cfg.trunc_K = K;
      cfg.seed = 7 + K + n;
      const auto fast = generate_path(cfg, n, ConvolutionMethod::fft);
      const auto slow = generate_path(cfg, n, ConvolutionMethod::direct);
      const auto par = generate_path(cfg, n, ConvolutionMethod::direct_parallel);
      REQUIRE(fast.eps == slow.eps);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(fast.x[i] - slow.x[i]) <= 1e-10 * std::max(1.0, std::abs(slow.x[i])));
        CHECK(std::abs(fast.q[i] - slow.q[i]) <= 1e-10 * std::max(1.0, std::abs(slow.q[i])));
        CHECK(par.x[i] == slow.x[i]);
      }
    }
}

TEST_CASE("zero innovations and white noise", "[process]") {
  ProcessConfig cfg;
  cfg.trunc_K = 16;
  PathGenerator gen(cfg, 10);
  const auto zero = gen.from_innovations(std::vector<double>(26, 0.0));
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(zero.x[i] == 0.0);
    CHECK(zero.u[i] == 0.0);
    CHECK(zero.q[i] == 0.0);
  }
  // K = 0: c = {1}
  cfg.trunc_K = 0;
  const auto white = generate_path(cfg, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    // FFT roundoff only
    CHECK(white.x[i] == Approx(white.eps[i]).margin(1e-13));
    CHECK(white.u[i] == Approx(0.0).margin(1e-13));
    CHECK(white.q[i] == Approx(0.0).margin(1e-13));
  }
  CHECK_THROWS_AS(gen.from_innovations(std::vector<double>(5, 0.0)), ConsistencyError);
}

TEST_CASE("sample variance of x matches var_x", "[process][mc]") {
  ProcessConfig cfg;
  cfg.trunc_K = 4096;
  const std::size_t n = 4096, reps = 200;
  const PathGenerator gen(cfg, n);
  const auto marginal = marginal_model(gen.coefficients(), 0.0, 1.0);
  double sum_sq = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto p = gen.generate(derive_seed(5, n, r));
    for (double x : p.x) sum_sq += x * x;
  }
  const double pooled = sum_sq / static_cast<double>(n * reps);
  CHECK(std::abs(pooled / marginal.var_x() - 1.0) < 0.05);
}

TEST_CASE("marginal model of the truncated process", "[process]") {
  const auto white = marginal_model(gen_coefficients(0.7, 0), 0.0, 1.0);
  CHECK(white.var_x() == 1.0);
  CHECK(white.sup_density() == Approx(0.398942).margin(1e-6));
  CHECK(white.pdf_derivative(1, 0.0) == 0.0);

  const auto c4 = gen_coefficients(0.7, 10000);
  double direct = 0.0;
  for (std::size_t k = 0; k <= 10000; ++k) direct += std::pow(k + 1.0, -1.4);
  const auto m4 = marginal_model(c4, 0.0, 1.0);
  CHECK(m4.var_x() == Approx(direct).epsilon(1e-12));
  // A longer filter adds at most the integral tail bound.
  const auto m5 = marginal_model(gen_coefficients(0.7, 20000), 0.0, 1.0);
  CHECK(m5.var_x() > m4.var_x());
  CHECK(m5.var_x() - m4.var_x() <= c4.variance_tail_bound());
  CHECK(m4.sup_density() == Approx(1.0 / std::sqrt(2.0 * M_PI * m4.var_x())).epsilon(1e-14));
}

TEST_CASE("marginal density integrates to one and derivatives are consistent", "[process]") {
  const MarginalModel m(2.7, 0.0, 1.0);
  double err = 0.0;
  const double total = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double z) { return m.pdf(z); }, -20.0, 20.0, 15, 1e-13, &err);
  CHECK(std::abs(total - 1.0) < 1e-8);
  const double h = 1e-4;
  for (double z = -5.0; z <= 5.0; z += 0.25)
    for (int r = 1; r <= 3; ++r) {
      const double fd = (m.pdf_derivative(r - 1, z + h) - m.pdf_derivative(r - 1, z - h)) / (2.0 * h);
      CHECK(std::abs(fd - m.pdf_derivative(r, z)) < 1e-6);
    }
  // cdf' = pdf
  for (double z = -4.0; z <= 4.0; z += 0.5)
    CHECK(std::abs((m.cdf(z + h) - m.cdf(z - h)) / (2 * h) - m.pdf(z)) < 1e-8);
}

TEST_CASE("sup of |f^(r)| matches a dense scan", "[process]") {
  const MarginalModel m(1.9, 0.0, 1.0);
  for (int r = 0; r <= 3; ++r) {
    double best = 0.0;
    for (double z = -10.0; z <= 10.0; z += 1e-4) best = std::max(best, std::abs(m.pdf_derivative(r, z)));
    CHECK(m.sup_abs_pdf_derivative(r) == Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("theta derivatives of H match finite differences", "[process]") {
  const double mu = 1.3, sigma = 2.0;
  const MarginalModel m(1.5, mu, sigma);
  const double h = 1e-3;
  for (double x = -4.0; x <= 6.0; x += 0.5) {
    auto H = [&](double t) { return m.H(x, t); };
    const double d1 = (H(mu + h) - H(mu - h)) / (2 * h);
    const double d2 = (H(mu + h) - 2 * H(mu) + H(mu - h)) / (h * h);
    const double d3 = (H(mu + 2 * h) - 2 * H(mu + h) + 2 * H(mu - h) - H(mu - 2 * h)) / (2 * h * h * h);
    CHECK(std::abs(d1 - m.grad_theta_H(1, x)) < 1e-6);
    CHECK(std::abs(d2 - m.grad_theta_H(2, x)) < 1e-5);
    CHECK(std::abs(d3 - m.grad_theta_H(3, x)) < 1e-4);
    CHECK(m.H(x, mu) == Approx(m.cdf((x - mu) / sigma)));
  }
  CHECK(m.quantile_H(0.5, mu) == Approx(mu));
  CHECK(m.H(m.quantile_H(0.9, mu), mu) == Approx(0.9).epsilon(1e-12));
}

namespace {

// sum_{j > K-k} (j+1)^{-b} (j+k+1)^{-b}: what truncation at K drops from rho_k.
double truncation_tail(std::size_t K, std::size_t k, double b) {
  const double start = static_cast<double>(K - k) + 1.5;  // midpoint rule offset
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double t) { return std::pow(start + t, -b) * std::pow(start + t + k, -b); });
}

}  // namespace

TEST_CASE("autocovariance law rho_k k^(2b-1) -> B(2b-1, 1-b)", "[process]") {
  // First-order law plus its known corrections: the Euler-Maclaurin term zeta(b) k^{-b}
  // and the part of the sum that truncation at K removes.
  const double b = 0.7;
  const std::size_t K = std::size_t{1} << 24;
  const auto c = gen_coefficients(b, K);
  const double B = boost::math::beta(2 * b - 1, 1 - b);
  double previous = 0.0;
  for (std::size_t k : {1000u, 2000u, 5000u, 10000u}) {
    double rho = 0.0;
    for (std::size_t j = 0; j + k <= K; ++j) rho += c.c[j] * c.c[j + k];
    const double model = B * std::pow(k, 1 - 2 * b) + boost::math::zeta(b) * std::pow(k, -b) - truncation_tail(K, k, b);
    CHECK(std::abs(rho / model - 1.0) < 1e-3);
    // Untruncated first-order ratio climbs monotonically towards 1.
    const double ratio = (rho + truncation_tail(K, k, b)) * std::pow(k, 2 * b - 1) / B;
    CHECK(ratio > previous);
    CHECK(ratio < 1.0);
    previous = ratio;
  }
  CHECK(previous > 0.95);  // within 5% from k = 10^4 on
}
