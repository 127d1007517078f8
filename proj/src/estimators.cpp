#include "lrdemp/estimators.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "lrdemp/errors.hpp"
#include "lrdemp/seeding.hpp"
#include "lrdemp/stats.hpp"

namespace lrdemp {

PsiFunction PsiFunction::sign() { return {Kind::sign, 0.0}; }

PsiFunction PsiFunction::huber(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("huber constant must be positive");
  return {Kind::huber, c};
}

PsiFunction PsiFunction::smoothed_sign(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("smoothing width must be positive");
  return {Kind::smoothed_sign, h};
}

PsiFunction PsiFunction::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  auto number = [&](double fallback) {
    if (colon == std::string::npos) return fallback;
    const std::string tail = spec.substr(colon + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tail.size())
      throw ParameterError("bad psi parameter in '" + spec + "'");
    return v;
  };
  if (head == "sign" && colon == std::string::npos) return sign();
  if (head == "huber") return huber(number(1.345));
  if (head == "ssign") return smoothed_sign(number(0.1));
  throw ParameterError("unknown psi '" + spec + "' (catalog: sign, huber:<c>, ssign:<h>)");
}

double PsiFunction::operator()(double r) const noexcept {
  switch (kind_) {
    case Kind::sign:
      return static_cast<double>((r > 0.0) - (r < 0.0));
    case Kind::huber:
      return std::clamp(r, -param_, param_);
    case Kind::smoothed_sign:
      return std::tanh(r / param_);
  }
  return 0.0;
}

std::string PsiFunction::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::sign:
      return "sign";
    case Kind::huber:
      os << "huber:" << param_;
      break;
    case Kind::smoothed_sign:
      os << "ssign:" << param_;
      break;
  }
  return os.str();
}

std::vector<double> PsiFunction::kinks() const {
  switch (kind_) {
    case Kind::sign:
      return {0.0};
    case Kind::huber:
      return {-param_, param_};
    case Kind::smoothed_sign:
      return {0.0};
  }
  return {};
}

double sample_mean(std::span<const double> y) {
  if (y.empty()) throw ParameterError("sample_mean of an empty sample");
  return stats::mean(y);
}

namespace {

double psi_sum(std::span<const double> y, const PsiFunction& psi, double x) {
  double s = 0.0;
  for (double v : y) s += psi(v - x);
  return s;
}

// Boundary of the monotone predicate `pred` (true at lo, false at hi) to width tol.
template <class Pred>
double bisect_boundary(double lo, double hi, double tol, Pred pred) {
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace

double m_estimate(std::span<const double> y, const PsiFunction& psi, double tol) {
  if (y.empty()) throw ParameterError("m_estimate of an empty sample");
  if (!(tol > 0.0)) throw ParameterError("m_estimate tolerance must be positive");
  for (double v : y)
    if (!std::isfinite(v)) throw ParameterError("m_estimate of a sample with non-finite values");
  const double med = stats::median(y);
  double lo = med - 1.0;
  double hi = med + 1.0;
  double width = 1.0;
  int expansions = 0;
  while (psi_sum(y, psi, lo) <= 0.0 || psi_sum(y, psi, hi) >= 0.0) {
    if (++expansions > 64)
      throw NoRootError("sum psi(y - x) does not change sign over the expanded bracket");
    width *= 2.0;
    lo = med - width;
    hi = med + width;
  }
  const double left = bisect_boundary(lo, hi, tol, [&](double x) { return psi_sum(y, psi, x) > 0.0; });
  const double right = bisect_boundary(lo, hi, tol, [&](double x) { return psi_sum(y, psi, x) >= 0.0; });
  return 0.5 * (left + right);
}

double lambda_k(const PsiFunction& psi, const MarginalModel& marginal, int k) {
  if (k != 1 && k != 2) throw ParameterError("lambda_k: k must be 1 or 2");
  const double span = 8.0 * marginal.sd_x();
  std::vector<double> cuts{-span};
  for (double kink : psi.kinks())
    if (kink > -span && kink < span) cuts.push_back(kink);
  cuts.push_back(span);
  std::sort(cuts.begin(), cuts.end());

  auto integrand = [&](double y) { return psi(y) * marginal.pdf_derivative(k, y); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    const double piece = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, cuts[i], cuts[i + 1], 15, 1e-12, &err);
    if (!std::isfinite(piece) || err > 1e-10)
      throw QuadratureError("lambda_k quadrature did not converge");
    total += piece;
  }
  return total;
}

SigmaPsiEstimate estimate_sigma_psi_sq(const ProcessConfig& config, const PsiFunction& psi,
                                       std::size_t n, std::size_t reps) {
  config.validate();
  if (!(config.beta > 0.75))
    throw RegimeError("sigma_psi^2 is defined for beta > 3/4 only");
  if (reps < 200) throw ParameterError("estimate_sigma_psi_sq needs reps >= 200");
  const PathGenerator gen(config, n);
  std::vector<double> d(reps);
  const double root_n = std::sqrt(static_cast<double>(n));
  const auto m = static_cast<long long>(reps);
#pragma omp parallel for schedule(dynamic)
  for (long long r = 0; r < m; ++r) {
    const auto path = gen.generate(derive_seed(config.seed, n, static_cast<std::uint64_t>(r)));
    d[static_cast<std::size_t>(r)] = root_n * (m_estimate(path.y, psi) - sample_mean(path.y));
  }
  const auto v = stats::variance_with_error(d);
  return {v.value, v.std_error, reps};
}

}  // namespace lrdemp
