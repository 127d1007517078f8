#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "lrdemp/multilinear.hpp"
#include "lrdemp/process.hpp"

namespace lrdemp {

enum class Regime { beta_below_3_4, beta_above_3_4 };
enum class SecondOrderRank { rank_2, rank_gt_2 };

std::string to_string(Regime regime);
std::string to_string(SecondOrderRank rank);
SecondOrderRank parse_rank(const std::string& name);

/// Throws UnsupportedBoundaryError at beta == 3/4.
Regime regime_of(double beta);

/// k* = floor(1 / (2 beta - 1)).
int k_star(double beta);

/// Default tolerance under which lambda_2 counts as zero.
inline constexpr double kLambdaZeroTol = 1e-8;

SecondOrderRank second_order_rank(double beta, double lambda2, double tol = kLambdaZeroTol);

/// d_{n,p} with L_0 == 1. Needs n >= 3 and (p+1)(2 beta - 1) != 1.
double d_np(std::size_t n, double beta, int p);

/// Xi_n of the reduction principle (L_0 == 1); with `full_bound` adds n (log n)^2.
double xi_rate(std::size_t n, double beta, int p, bool full_bound = false);

struct ScalingSet {
  std::size_t n = 0;
  double beta = 0.0;
  double sigma_n1 = 0.0;
  double sigma_n2 = 0.0;
  double a_n = 0.0;  ///< sigma_{n,2} / sigma_{n,1}
  double c_n = 0.0;  ///< sigma_{n,1}^2 / (n sigma_{n,2})
  std::optional<double> d_n2;  ///< empty at the boundary beta = 2/3
  int k_star = 0;
  Regime regime = Regime::beta_below_3_4;
  bool sigma_n2_from_monte_carlo = false;
};

struct ScalingOptions {
  std::size_t sigma2_budget = kDefaultSigma2Budget;
  std::size_t monte_carlo_reps = 2000;  ///< used only past the budget
};

ScalingSet build_scaling_set(const ProcessConfig& config, std::size_t n,
                             const ScalingOptions& options = {});

nlohmann::json to_json(const ScalingSet& s);

}  // namespace lrdemp
