#include "lrdemp/scalings.hpp"

#include <cmath>
#include <sstream>

#include "lrdemp/errors.hpp"

namespace lrdemp {
namespace {

void check_beta(double beta) {
  if (!(beta > 0.5 && beta < 1.0)) {
    std::ostringstream os;
    os << "beta = " << beta << " outside the allowed range (1/2, 1)";
    throw ParameterError(os.str());
  }
}

// Sign of (p+1)(2 beta - 1) - 1; throws at the boundary.
bool long_memory_branch(double beta, int p) {
  const double v = (p + 1) * (2.0 * beta - 1.0);
  if (std::abs(v - 1.0) < 1e-12) {
    std::ostringstream os;
    os << "(p+1)(2 beta - 1) = 1 at p = " << p << ", beta = " << beta
       << ": rate is undefined at the boundary";
    throw UnsupportedBoundaryError(os.str());
  }
  return v < 1.0;
}

}  // namespace

std::string to_string(Regime regime) {
  return regime == Regime::beta_below_3_4 ? "beta_below_3_4" : "beta_above_3_4";
}

std::string to_string(SecondOrderRank rank) {
  return rank == SecondOrderRank::rank_2 ? "rank_2" : "rank_gt_2";
}

SecondOrderRank parse_rank(const std::string& name) {
  if (name == "rank_2") return SecondOrderRank::rank_2;
  if (name == "rank_gt_2") return SecondOrderRank::rank_gt_2;
  throw ParameterError("unknown rank '" + name + "' (expected rank_2 or rank_gt_2)");
}

Regime regime_of(double beta) {
  check_beta(beta);
  if (beta == 0.75)
    throw UnsupportedBoundaryError("beta = 3/4 separates the two regimes; no limit theorem applies");
  return beta < 0.75 ? Regime::beta_below_3_4 : Regime::beta_above_3_4;
}

int k_star(double beta) {
  check_beta(beta);
  return static_cast<int>(std::floor(1.0 / (2.0 * beta - 1.0)));
}

SecondOrderRank second_order_rank(double beta, double lambda2, double tol) {
  if (k_star(beta) == 1) return SecondOrderRank::rank_2;
  return std::abs(lambda2) <= tol ? SecondOrderRank::rank_gt_2 : SecondOrderRank::rank_2;
}

double d_np(std::size_t n, double beta, int p) {
  check_beta(beta);
  if (n < 3) throw ParameterError("d_np needs n >= 3 so that log log n > 0");
  if (p < 1) throw ParameterError("d_np needs p >= 1");
  const double nd = static_cast<double>(n);
  const double ln = std::log(nd);
  const double lln = std::log(ln);
  if (!long_memory_branch(beta, p))
    return std::pow(nd, -(1.0 - beta)) * std::pow(ln, 2.5) * std::pow(lln, 0.75);
  return std::pow(nd, -p * (beta - 0.5)) * std::sqrt(ln) * std::pow(lln, 0.75);
}

double xi_rate(std::size_t n, double beta, int p, bool full_bound) {
  check_beta(beta);
  if (p < 0) throw ParameterError("xi_rate needs p >= 0");
  const double nd = static_cast<double>(n);
  const double xi = long_memory_branch(beta, p) ? std::pow(nd, 2.0 - (p + 1) * (2.0 * beta - 1.0)) : nd;
  if (!full_bound) return xi;
  const double ln = std::log(nd);
  return xi + nd * ln * ln;
}

ScalingSet build_scaling_set(const ProcessConfig& config, std::size_t n, const ScalingOptions& options) {
  config.validate();
  if (n < 2) throw ParameterError("scalings need n >= 2");
  ScalingSet s;
  s.n = n;
  s.beta = config.beta;
  s.regime = regime_of(config.beta);
  s.k_star = k_star(config.beta);
  const auto coeffs = gen_coefficients(config.beta, config.trunc_K);
  s.sigma_n1 = std::sqrt(exact_sigma1_sq(n, coeffs));
  double s2sq = 0.0;
  try {
    s2sq = exact_sigma2_sq(n, coeffs, options.sigma2_budget);
  } catch (const BudgetExceededError&) {
    s2sq = monte_carlo_sigma2(config, n, options.monte_carlo_reps).variance;
    s.sigma_n2_from_monte_carlo = true;
  }
  if (!(s2sq > 0.0))
    throw DegenerateModelError("sigma_{n,2} = 0 (no second-order term; K = 0?)");
  s.sigma_n2 = std::sqrt(s2sq);
  s.a_n = s.sigma_n2 / s.sigma_n1;
  s.c_n = s.sigma_n1 * s.sigma_n1 / (static_cast<double>(n) * s.sigma_n2);
  if (n >= 3) {
    try {
      s.d_n2 = d_np(n, config.beta, 2);
    } catch (const UnsupportedBoundaryError&) {
      s.d_n2.reset();
    }
  }
  return s;
}

nlohmann::json to_json(const ScalingSet& s) {
  nlohmann::json j;
  j["n"] = s.n;
  j["beta"] = s.beta;
  j["sigma_n1"] = s.sigma_n1;
  j["sigma_n2"] = s.sigma_n2;
  j["a_n"] = s.a_n;
  j["c_n"] = s.c_n;
  j["d_n2"] = s.d_n2 ? nlohmann::json(*s.d_n2) : nlohmann::json(nullptr);
  j["k_star"] = s.k_star;
  j["regime"] = to_string(s.regime);
  j["sigma_n2_source"] = s.sigma_n2_from_monte_carlo ? "monte_carlo" : "exact";
  return j;
}

}  // namespace lrdemp
