#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "lrdemp/estimators.hpp"
#include "lrdemp/process.hpp"
#include "lrdemp/scalings.hpp"

namespace lrdemp {

/// Which location estimate replaces theta0 = mu.
class EstimatorSpec {
 public:
  enum class Kind { none, mean, m_estimator };

  static EstimatorSpec none() { return EstimatorSpec(Kind::none, std::nullopt); }
  static EstimatorSpec mean() { return EstimatorSpec(Kind::mean, std::nullopt); }
  static EstimatorSpec m_estimator(PsiFunction psi) { return EstimatorSpec(Kind::m_estimator, psi); }
  /// "none" | "mean" | "m:<psi>"
  static EstimatorSpec parse(const std::string& spec);

  Kind kind() const noexcept { return kind_; }
  const PsiFunction& psi() const;
  std::string name() const;
  /// theta_hat for the Y sample (mu itself for `none`).
  double estimate(std::span<const double> y, double mu) const;

 private:
  EstimatorSpec(Kind k, std::optional<PsiFunction> psi) : kind_(k), psi_(psi) {}
  Kind kind_;
  std::optional<PsiFunction> psi_;
};

enum class Normalization { sigma_n1_n, sigma_n2_n, sqrt_n };
std::string to_string(Normalization n);
Normalization parse_normalization(const std::string& name);

struct GofResult {
  std::string stat;               ///< "ks" or "cvm"
  double statistic_raw = 0.0;     ///< sup |H_n - H| or int (H_n - H)^2 dH
  Normalization normalization = Normalization::sigma_n1_n;
  double normalization_value = 0.0;
  double statistic_normalized = 0.0;  ///< raw * normalization_value
  /// (n / sigma_{n,1}) * raw, recorded for KS so that the o_P(1) statement is testable.
  std::optional<double> sigma_n1_scaled;
  /// CvM only: (n / sigma_{n,2})^2 * raw.
  std::optional<double> limit_scaled;
  std::string estimator = "none";
  double theta_hat = 0.0;
  Regime regime = Regime::beta_below_3_4;
  std::size_t n = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const GofResult& r);

/// (n / sigma_{n,1}) sup_x |F_n(x) - F(x)|, evaluated on Y against H(.; mu).
GofResult ks_known(const PathBundle& path, const MarginalModel& marginal, const ScalingSet& scalings);

/// KS against H(.; theta_hat). Normalisation by regime: n / sigma_{n,2} below 3/4,
/// sqrt(n) above. A `requested` normalisation that disagrees with the regime throws RegimeError.
GofResult ks_estimated(const PathBundle& path, const MarginalModel& marginal,
                       const EstimatorSpec& estimator, const ScalingSet& scalings,
                       std::optional<Normalization> requested = std::nullopt);
GofResult ks_at(const PathBundle& path, const MarginalModel& marginal, double theta_hat,
                const ScalingSet& scalings, const std::string& estimator_name = "fixed");

/// n int (H_n - H)^2 dH = 1/(12 n) + sum_i (u_i - (2i - 1)/(2n))^2, u_i = H(Y_(i); theta_hat).
double cvm_order_statistic_sum(std::span<const double> sorted_u);

GofResult cvm_estimated(const PathBundle& path, const MarginalModel& marginal,
                        const EstimatorSpec& estimator, const ScalingSet& scalings);
GofResult cvm_at(const PathBundle& path, const MarginalModel& marginal, double theta_hat,
                 const ScalingSet& scalings, const std::string& estimator_name = "fixed");

struct CvmLimitConstant {
  double integral = 0.0;      ///< int (f'(z))^2 f(z) dz
  double sigma_factor = 1.0;  ///< the 1/sigma in front of the limit
};

CvmLimitConstant cvm_limit_constant(const MarginalModel& marginal);

}  // namespace lrdemp
