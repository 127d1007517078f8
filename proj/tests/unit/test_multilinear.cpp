#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "lrdemp/errors.hpp"
#include "lrdemp/multilinear.hpp"
#include "lrdemp/seeding.hpp"
#include "lrdemp/stats.hpp"

using namespace lrdemp;
using Catch::Approx;

namespace {
ProcessConfig cfg_with(double beta, std::size_t K, std::uint64_t seed = 1) {
  ProcessConfig c;
  c.beta = beta;
  c.trunc_K = K;
  c.seed = seed;
  return c;
}
}  // namespace

TEST_CASE("sums of the zero path", "[multilinear]") {
  const PathGenerator gen(cfg_with(0.7, 8), 5);
  const auto s = compute_sums(gen.from_innovations(std::vector<double>(13, 0.0)), gen.coefficients());
  CHECK(s.y0 == 5);
  CHECK(s.y1 == 0.0);
  CHECK(s.y2 == 0.0);
}

TEST_CASE("single pair for n = 1, K = 1", "[multilinear]") {
  const PathGenerator gen(cfg_with(0.7, 1), 1);
  const double e0 = 0.8, e1 = -1.3;  // eps_0, eps_1
  const auto path = gen.from_innovations({e0, e1});
  const auto& c = gen.coefficients().c;
  CHECK(compute_sums(path, gen.coefficients()).y2 == Approx(c[0] * c[1] * e1 * e0).epsilon(1e-14));
}

TEST_CASE("y1 is the path sum and y2 matches the triple sum", "[multilinear]") {
  for (auto method : {ConvolutionMethod::fft, ConvolutionMethod::direct}) {
    const PathGenerator gen(cfg_with(0.7, 8), 8, method);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto path = gen.generate(seed);
      const auto s = compute_sums(path, gen.coefficients());
      double sum = 0.0;
      for (double x : path.x) sum += x;
      CHECK(s.y1 == Approx(sum).epsilon(1e-12));
      const double ref = oracle::y2_triple_sum(path, gen.coefficients().c);
      CHECK(std::abs(s.y2 - ref) <= 1e-12 * std::abs(ref));
    }
  }
}

TEST_CASE("truncation mismatch is a consistency error", "[multilinear]") {
  const auto path = generate_path(cfg_with(0.7, 8), 10);
  CHECK_THROWS_AS(compute_sums(path, gen_coefficients(0.7, 9)), ConsistencyError);
}

TEST_CASE("exact sigma_{n,1}^2", "[multilinear]") {
  CHECK(exact_sigma1_sq(17, gen_coefficients(0.7, 0)) == Approx(17.0));
  const auto c = gen_coefficients(0.7, 50);
  double rho0 = 0.0;
  for (double v : c.c) rho0 += v * v;
  CHECK(exact_sigma1_sq(1, c) == Approx(rho0).epsilon(1e-14));
  for (std::size_t n : {1u, 2u, 7u, 40u, 80u})
    CHECK(exact_sigma1_sq(n, c) == Approx(oracle::sigma1_sq_enumeration(n, c.c)).epsilon(1e-12));
}

TEST_CASE("exact sigma_{n,2}^2 against B enumeration", "[multilinear]") {
  CHECK(exact_sigma2_sq(10, gen_coefficients(0.7, 0)) == 0.0);
  CHECK(exact_sigma2_sq(4, gen_coefficients(0.7, 4)) ==
        Approx(oracle::sigma2_sq_enumeration(4, gen_coefficients(0.7, 4).c)).epsilon(1e-12));
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::size_t K = 1; K <= 8; ++K) {
      const auto c = gen_coefficients(0.65, K);
      const double ref = oracle::sigma2_sq_enumeration(n, c.c);
      CHECK(std::abs(exact_sigma2_sq(n, c) - ref) <= 1e-12 * ref);
    }
  // Larger lag counts go through the FFT autocovariance.
  const auto c = gen_coefficients(0.7, 40);
  CHECK(exact_sigma2_sq(30, c) == Approx(oracle::sigma2_sq_enumeration(30, c.c)).epsilon(1e-11));
}

TEST_CASE("variance pair is positive and the budget is enforced", "[multilinear]") {
  const auto vp = exact_variances(2, gen_coefficients(0.8, 1));
  CHECK(vp.sigma_n1_sq > 0.0);
  CHECK(vp.sigma_n2_sq > 0.0);
  CHECK_THROWS_AS(exact_sigma2_sq(100, gen_coefficients(0.7, 100), 150), BudgetExceededError);
}

TEST_CASE("exact variances agree with Monte Carlo", "[multilinear][mc]") {
  {
    const auto cfg = cfg_with(0.7, 4096, 11);
    const std::size_t n = 1024, reps = 2000;
    const PathGenerator gen(cfg, n);
    std::vector<double> y1(reps);
    for (std::size_t r = 0; r < reps; ++r) y1[r] = compute_sums(gen.generate(derive_seed(11, n, r)), gen.coefficients()).y1;
    const auto est = stats::variance_with_error(y1);
    CHECK(std::abs(est.value - exact_sigma1_sq(n, gen.coefficients())) < 3 * est.std_error);
  }
  {
    const auto cfg = cfg_with(0.7, 1024, 12);
    const std::size_t n = 256;
    const auto mc = monte_carlo_sigma2(cfg, n, 5000);
    CHECK(std::abs(mc.variance - exact_sigma2_sq(n, gen_coefficients(0.7, 1024))) < 3 * mc.std_error);
  }
}

TEST_CASE("monte_carlo_sigma2 contract", "[multilinear][mc]") {
  CHECK_THROWS_AS(monte_carlo_sigma2(cfg_with(0.7, 8), 16, 99), ParameterError);
  const auto white = monte_carlo_sigma2(cfg_with(0.7, 0), 32, 100);
  CHECK(white.variance == Approx(0.0).margin(1e-20));
  CHECK(white.std_error == Approx(0.0).margin(1e-20));
  // sqrt(reps) law: four times the replications halve the standard error.
  const auto a = monte_carlo_sigma2(cfg_with(0.7, 256, 3), 64, 1000);
  const auto b = monte_carlo_sigma2(cfg_with(0.7, 256, 4), 64, 4000);
  CHECK(std::abs(b.std_error / a.std_error - 0.5) < 0.1);
}

TEST_CASE("normalised Y_{n,1} is approximately standard normal", "[multilinear][mc]") {
  const auto cfg = cfg_with(0.7, 65536, 21);
  const std::size_t n = 8192, reps = 500;
  const PathGenerator gen(cfg, n);
  const double s1 = std::sqrt(exact_sigma1_sq(n, gen.coefficients()));
  std::vector<double> z(reps), ref(reps);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd;
  for (std::size_t r = 0; r < reps; ++r) {
    z[r] = compute_sums(gen.generate(derive_seed(21, n, r)), gen.coefficients()).y1 / s1;
    ref[r] = nd(rng);
  }
  CHECK(stats::ks_distance(z, ref) < 0.1);
}

TEST_CASE("variance scaling exponents", "[multilinear]") {
  std::vector<double> ln, l1, l2;
  const auto c07 = gen_coefficients(0.7, std::size_t{1} << 16);
  const auto c065 = gen_coefficients(0.65, std::size_t{1} << 16);
  for (std::size_t n = 256; n <= 16384; n *= 2) {
    ln.push_back(std::log(static_cast<double>(n)));
    l1.push_back(std::log(exact_sigma1_sq(n, c07)));
    l2.push_back(std::log(exact_sigma2_sq(n, c065)));
  }
  CHECK(std::abs(stats::ols_slope(ln, l1) - (3 - 2 * 0.7)) <= 0.05);
  CHECK(std::abs(stats::ols_slope(ln, l2) - (4 - 4 * 0.65)) <= 0.08);
}
