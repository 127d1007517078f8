#include "lrdemp/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrdemp/errors.hpp"
#include "lrdemp/kernels.hpp"
#include "lrdemp/seeding.hpp"

namespace lrdemp {

MultilinearSums compute_sums(const PathBundle& path, const CoefficientSet& coeffs) {
  if (path.trunc_K != coeffs.trunc_K())
    throw ConsistencyError("path and coefficient set use different truncation lengths");
  MultilinearSums out;
  out.y0 = path.n();
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < path.n(); ++i) {
    s1 += path.x[i];
    s2 += path.x[i] * path.x[i] - path.q_full(i);
  }
  out.y1 = s1;
  out.y2 = 0.5 * s2;
  return out;
}

double exact_sigma1_sq(std::size_t n, const CoefficientSet& coeffs) {
  if (n == 0) throw ParameterError("n must be >= 1");
  const auto rho = kernels::autocovariance(coeffs.c, n);
  const double nd = static_cast<double>(n);
  double total = nd * rho[0];
  for (std::size_t k = 1; k < n; ++k) total += 2.0 * (nd - static_cast<double>(k)) * rho[k];
  return total;
}

double exact_sigma2_sq(std::size_t n, const CoefficientSet& coeffs, std::size_t budget) {
  if (n == 0) throw ParameterError("n must be >= 1");
  if (n + coeffs.trunc_K() > budget)
    throw BudgetExceededError("n + K exceeds the exact sigma_{n,2} budget; use monte_carlo_sigma2");
  std::vector<double> c_sq(coeffs.c.size());
  for (std::size_t k = 0; k < c_sq.size(); ++k) c_sq[k] = coeffs.c[k] * coeffs.c[k];
  const auto rho = kernels::autocovariance(coeffs.c, n);
  const auto rho2 = kernels::autocovariance(c_sq, n);
  const double nd = static_cast<double>(n);
  double total = nd * (rho[0] * rho[0] - rho2[0]);
  for (std::size_t k = 1; k < n; ++k)
    total += 2.0 * (nd - static_cast<double>(k)) * (rho[k] * rho[k] - rho2[k]);
  // Round-off can leave a tiny negative residue when K = 0.
  return std::max(0.0, 0.5 * total);
}

VariancePair exact_variances(std::size_t n, const CoefficientSet& coeffs, std::size_t budget) {
  return {exact_sigma1_sq(n, coeffs), exact_sigma2_sq(n, coeffs, budget), n};
}

VarianceEstimate monte_carlo_sigma2(const ProcessConfig& config, std::size_t n, std::size_t reps) {
  if (reps < 100) throw ParameterError("monte_carlo_sigma2 needs reps >= 100");
  const PathGenerator gen(config, n);
  std::vector<double> y2(reps);
  const auto m = static_cast<long long>(reps);
#pragma omp parallel for schedule(dynamic)
  for (long long r = 0; r < m; ++r) {
    const auto path = gen.generate(derive_seed(config.seed, n, static_cast<std::uint64_t>(r)));
    y2[static_cast<std::size_t>(r)] = compute_sums(path, gen.coefficients()).y2;
  }
  double mean = 0.0;
  for (double v : y2) mean += v;
  mean /= static_cast<double>(reps);
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : y2) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  const double R = static_cast<double>(reps);
  VarianceEstimate out;
  out.reps = reps;
  out.variance = m2 / (R - 1.0);
  // se of the sample variance from the fourth central moment
  const double mu2 = m2 / R;
  const double mu4 = m4 / R;
  out.std_error = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / R);
  return out;
}

}  // namespace lrdemp
