#include "lrdemp/gof.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrdemp/empirical.hpp"
#include "lrdemp/errors.hpp"

namespace lrdemp {

EstimatorSpec EstimatorSpec::parse(const std::string& spec) {
  if (spec == "none") return none();
  if (spec == "mean") return mean();
  if (spec.rfind("m:", 0) == 0) return m_estimator(PsiFunction::parse(spec.substr(2)));
  throw ParameterError("unknown estimator '" + spec +
                       "' (expected none | mean | m:<psi>, psi in sign, huber:<c>, ssign:<h>)");
}

const PsiFunction& EstimatorSpec::psi() const {
  if (!psi_) throw ParameterError("estimator has no psi function");
  return *psi_;
}

std::string EstimatorSpec::name() const {
  switch (kind_) {
    case Kind::none:
      return "none";
    case Kind::mean:
      return "mean";
    case Kind::m_estimator:
      return "m:" + psi_->name();
  }
  return "unknown";
}

double EstimatorSpec::estimate(std::span<const double> y, double mu) const {
  switch (kind_) {
    case Kind::none:
      return mu;
    case Kind::mean:
      return sample_mean(y);
    case Kind::m_estimator:
      return m_estimate(y, *psi_);
  }
  return mu;
}

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::sigma_n1_n:
      return "sigma_n1_n";
    case Normalization::sigma_n2_n:
      return "sigma_n2_n";
    case Normalization::sqrt_n:
      return "sqrt_n";
  }
  return "unknown";
}

Normalization parse_normalization(const std::string& name) {
  if (name == "sigma_n1_n") return Normalization::sigma_n1_n;
  if (name == "sigma_n2_n") return Normalization::sigma_n2_n;
  if (name == "sqrt_n") return Normalization::sqrt_n;
  throw ParameterError("unknown normalization '" + name + "'");
}

nlohmann::json to_json(const GofResult& r) {
  nlohmann::json j;
  j["stat"] = r.stat;
  j["raw"] = r.statistic_raw;
  j["normalized"] = r.statistic_normalized;
  j["normalization"] = to_string(r.normalization);
  j["normalization_value"] = r.normalization_value;
  j["estimator"] = r.estimator;
  j["theta_hat"] = r.theta_hat;
  j["n"] = r.n;
  j["beta"] = r.beta;
  j["seed"] = r.seed;
  j["regime"] = to_string(r.regime);
  if (r.sigma_n1_scaled) j["sigma_n1_scaled"] = *r.sigma_n1_scaled;
  if (r.limit_scaled) j["limit_scaled"] = *r.limit_scaled;
  return j;
}

namespace {

GofResult base_result(const PathBundle& path, const ScalingSet& s, std::string stat) {
  GofResult r;
  r.stat = std::move(stat);
  r.n = path.n();
  r.beta = s.beta;
  r.seed = path.seed;
  r.regime = s.regime;
  return r;
}

Normalization regime_normalization(Regime regime) {
  return regime == Regime::beta_below_3_4 ? Normalization::sigma_n2_n : Normalization::sqrt_n;
}

}  // namespace

GofResult ks_known(const PathBundle& path, const MarginalModel& marginal, const ScalingSet& scalings) {
  auto r = base_result(path, scalings, "ks");
  r.estimator = "none";
  r.theta_hat = marginal.mu();
  r.statistic_raw = sup_norm_exact(path.y, [&](double x) { return marginal.H(x, marginal.mu()); });
  r.normalization = Normalization::sigma_n1_n;
  r.normalization_value = static_cast<double>(path.n()) / scalings.sigma_n1;
  r.statistic_normalized = r.statistic_raw * r.normalization_value;
  r.sigma_n1_scaled = r.statistic_normalized;
  return r;
}

GofResult ks_at(const PathBundle& path, const MarginalModel& marginal, double theta_hat,
                const ScalingSet& scalings, const std::string& estimator_name) {
  auto r = base_result(path, scalings, "ks");
  r.estimator = estimator_name;
  r.theta_hat = theta_hat;
  r.statistic_raw = sup_norm_exact(path.y, [&](double x) { return marginal.H(x, theta_hat); });
  const double n = static_cast<double>(path.n());
  r.normalization = regime_normalization(scalings.regime);
  r.normalization_value = r.normalization == Normalization::sigma_n2_n ? n / scalings.sigma_n2 : std::sqrt(n);
  r.statistic_normalized = r.statistic_raw * r.normalization_value;
  r.sigma_n1_scaled = r.statistic_raw * n / scalings.sigma_n1;
  return r;
}

GofResult ks_estimated(const PathBundle& path, const MarginalModel& marginal,
                       const EstimatorSpec& estimator, const ScalingSet& scalings,
                       std::optional<Normalization> requested) {
  if (estimator.kind() == EstimatorSpec::Kind::none)
    throw ParameterError("ks_estimated needs an estimator (mean or m:<psi>); use ks_known");
  if (requested && *requested != regime_normalization(scalings.regime))
    throw RegimeError("normalization " + to_string(*requested) + " does not match regime " +
                      to_string(scalings.regime));
  return ks_at(path, marginal, estimator.estimate(path.y, marginal.mu()), scalings, estimator.name());
}

double cvm_order_statistic_sum(std::span<const double> sorted_u) {
  const double n = static_cast<double>(sorted_u.size());
  if (sorted_u.empty()) throw ParameterError("cvm of an empty sample");
  double s = 1.0 / (12.0 * n);
  for (std::size_t i = 0; i < sorted_u.size(); ++i) {
    const double u = sorted_u[i];
    if (!(u > 0.0 && u < 1.0)) throw NumericDomainError("H(Y_(i); theta_hat) outside (0, 1)");
    const double d = u - (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n);
    s += d * d;
  }
  return s;
}

GofResult cvm_at(const PathBundle& path, const MarginalModel& marginal, double theta_hat,
                 const ScalingSet& scalings, const std::string& estimator_name) {
  auto r = base_result(path, scalings, "cvm");
  r.estimator = estimator_name;
  r.theta_hat = theta_hat;
  std::vector<double> u(path.y.begin(), path.y.end());
  std::sort(u.begin(), u.end());
  for (auto& v : u) v = marginal.H(v, theta_hat);
  const double n = static_cast<double>(path.n());
  r.statistic_raw = cvm_order_statistic_sum(u) / n;
  r.normalization = regime_normalization(scalings.regime);
  // For beta > 3/4 the squared statistic carries (sqrt n)^2 = n.
  r.normalization_value = r.normalization == Normalization::sigma_n2_n ? n / scalings.sigma_n2 : n;
  r.statistic_normalized = r.statistic_raw * r.normalization_value;
  const double k = n / scalings.sigma_n2;
  r.limit_scaled = r.statistic_raw * k * k;
  return r;
}

GofResult cvm_estimated(const PathBundle& path, const MarginalModel& marginal,
                        const EstimatorSpec& estimator, const ScalingSet& scalings) {
  if (estimator.kind() == EstimatorSpec::Kind::none)
    throw ParameterError("cvm_estimated needs an estimator (mean or m:<psi>)");
  return cvm_at(path, marginal, estimator.estimate(path.y, marginal.mu()), scalings, estimator.name());
}

CvmLimitConstant cvm_limit_constant(const MarginalModel& marginal) {
  auto integrand = [&](double z) {
    const double d = marginal.pdf_derivative(1, z);
    return d * d * marginal.pdf(z);
  };
  const double span = 12.0 * marginal.sd_x();
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -span, span,
                                                                                15, 1e-13, &err);
  if (!std::isfinite(v) || err > 1e-10 * std::max(1.0, std::abs(v)))
    throw QuadratureError("cvm_limit_constant quadrature did not converge");
  return {v, 1.0 / marginal.sigma()};
}

}  // namespace lrdemp
