#pragma once

#include <cstddef>
#include <cstdint>

#include "lrdemp/process.hpp"

namespace lrdemp {

/// Y_{n,0}, Y_{n,1}, Y_{n,2} with Y_{n,2} = sum_i sum_{0<=j1<j2<=K} c_{j1} c_{j2} eps_{i-j1} eps_{i-j2}.
struct MultilinearSums {
  std::size_t y0 = 0;
  double y1 = 0.0;
  double y2 = 0.0;
};

/// Uses sum_{j1<j2} a_{j1} a_{j2} = ((sum a)^2 - sum a^2) / 2 per time index.
MultilinearSums compute_sums(const PathBundle& path, const CoefficientSet& coeffs);

/// Var(Y_{n,1}) = n rho_0 + 2 sum_{k=1}^{n-1} (n-k) rho_k under unit-variance innovations.
double exact_sigma1_sq(std::size_t n, const CoefficientSet& coeffs);

/// Default cap on n + K for the exact second-order variance.
inline constexpr std::size_t kDefaultSigma2Budget = std::size_t{1} << 24;

/// Var(Y_{n,2}) = sum_{t1<t2} B(t1,t2)^2, evaluated through
/// (1/2) sum_{|k|<n} (n-|k|) (rho_k^2 - rho2_k), rho2_k = sum_j c_j^2 c_{j+k}^2.
/// Throws BudgetExceededError when n + K exceeds `budget`.
double exact_sigma2_sq(std::size_t n, const CoefficientSet& coeffs,
                       std::size_t budget = kDefaultSigma2Budget);

struct VariancePair {
  double sigma_n1_sq = 0.0;
  double sigma_n2_sq = 0.0;
  std::size_t n = 0;
};

VariancePair exact_variances(std::size_t n, const CoefficientSet& coeffs,
                             std::size_t budget = kDefaultSigma2Budget);

struct VarianceEstimate {
  double variance = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
};

/// Sample variance of Y_{n,2} over `reps` independent paths (reps >= 100).
/// Fallback normaliser when the exact value is over budget.
VarianceEstimate monte_carlo_sigma2(const ProcessConfig& config, std::size_t n, std::size_t reps);

}  // namespace lrdemp
