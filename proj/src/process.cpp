#include "lrdemp/process.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lrdemp/errors.hpp"
#include "lrdemp/fft.hpp"
#include "lrdemp/kernels.hpp"

namespace lrdemp {

std::string to_string(Innovation innovation) {
  switch (innovation) {
    case Innovation::standard_gaussian:
      return "standard_gaussian";
  }
  return "unknown";
}

Innovation parse_innovation(const std::string& name) {
  if (name == "standard_gaussian" || name == "gaussian") return Innovation::standard_gaussian;
  throw ParameterError("unknown innovation law '" + name + "' (supported: standard_gaussian)");
}

namespace {

void check_beta(double beta) {
  if (!(beta > 0.5 && beta < 1.0)) {
    std::ostringstream os;
    os << "beta = " << beta << " outside the allowed range (1/2, 1)";
    throw ParameterError(os.str());
  }
}

}  // namespace

void ProcessConfig::validate() const {
  check_beta(beta);
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ParameterError("sigma must be a finite positive scale");
  if (!std::isfinite(mu)) throw ParameterError("mu must be finite");
}

double CoefficientSet::variance_tail_bound() const {
  // sum_{k>K} (k+1)^{-2b} <= int_{K+1}^inf t^{-2b} dt
  const double start = static_cast<double>(trunc_K()) + 1.0;
  return std::pow(start, 1.0 - 2.0 * beta) / (2.0 * beta - 1.0);
}

CoefficientSet gen_coefficients(double beta, std::size_t trunc_K) {
  check_beta(beta);
  CoefficientSet out;
  out.beta = beta;
  out.c.resize(trunc_K + 1);
  for (std::size_t k = 0; k <= trunc_K; ++k)
    out.c[k] = std::pow(static_cast<double>(k) + 1.0, -beta);
  return out;
}

struct PathGenerator::Spectra {
  RealFft fft;
  std::vector<std::complex<double>> c;
  std::vector<std::complex<double>> c_sq;
};

PathGenerator::PathGenerator(const ProcessConfig& config, std::size_t n, ConvolutionMethod method)
    : config_(config), n_(n), method_(method) {
  config_.validate();
  if (n == 0) throw ParameterError("n must be >= 1");
  if (config.trunc_K > (std::size_t{1} << 40) || n > (std::size_t{1} << 40))
    throw std::overflow_error("innovation index range too large");
  coeffs_ = gen_coefficients(config.beta, config.trunc_K);
  c_sq_.resize(coeffs_.c.size());
  for (std::size_t k = 0; k < c_sq_.size(); ++k) c_sq_[k] = coeffs_.c[k] * coeffs_.c[k];
  if (method_ == ConvolutionMethod::fft) {
    RealFft fft(std::max<std::size_t>(2, next_pow2(n + config.trunc_K)));
    auto cs = fft.forward(coeffs_.c);
    auto csq = fft.forward(c_sq_);
    spectra_ = std::make_unique<Spectra>(Spectra{fft, std::move(cs), std::move(csq)});
  }
}

PathGenerator::~PathGenerator() = default;
PathGenerator::PathGenerator(PathGenerator&&) noexcept = default;
PathGenerator& PathGenerator::operator=(PathGenerator&&) noexcept = default;

PathBundle PathGenerator::generate(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> eps(n_ + config_.trunc_K);
  for (auto& e : eps) e = normal(rng);
  return from_innovations(std::move(eps), seed);
}

PathBundle PathGenerator::from_innovations(std::vector<double> eps, std::uint64_t seed) const {
  const std::size_t K = config_.trunc_K;
  if (eps.size() != n_ + K) throw ConsistencyError("innovation vector must have length n + K");
  std::vector<double> eps_sq(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) eps_sq[i] = eps[i] * eps[i];

  PathBundle out;
  out.trunc_K = K;
  out.seed = seed;
  std::vector<double> q_hat;
  switch (method_) {
    case ConvolutionMethod::fft: {
      const auto& fft = spectra_->fft;
      const double scale = 1.0 / static_cast<double>(fft.length());
      auto run = [&](const std::vector<double>& input, const std::vector<std::complex<double>>& filt) {
        auto spec = fft.forward(input);
        for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= filt[i];
        auto full = fft.inverse(spec);
        std::vector<double> r(n_);
        for (std::size_t s = 0; s < n_; ++s) r[s] = full[K + s] * scale;
        return r;
      };
      out.x = run(eps, spectra_->c);
      q_hat = run(eps_sq, spectra_->c_sq);
      break;
    }
    case ConvolutionMethod::direct:
      out.x = kernels::causal_filter_serial(coeffs_.c, eps, K, n_);
      q_hat = kernels::causal_filter_serial(c_sq_, eps_sq, K, n_);
      break;
    case ConvolutionMethod::direct_parallel:
      out.x = kernels::causal_filter_omp(coeffs_.c, eps, K, n_);
      q_hat = kernels::causal_filter_omp(c_sq_, eps_sq, K, n_);
      break;
  }

  const double c0 = coeffs_.c[0];
  out.y.resize(n_);
  out.u.resize(n_);
  out.q.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const double e = eps[K + i];
    out.u[i] = out.x[i] - c0 * e;
    out.q[i] = q_hat[i] - c0 * c0 * e * e;
    out.y[i] = config_.sigma * out.x[i] + config_.mu;
  }
  out.eps = std::move(eps);
  return out;
}

PathBundle generate_path(const ProcessConfig& config, std::size_t n, ConvolutionMethod method) {
  return PathGenerator(config, n, method).generate(config.seed);
}

MarginalModel::MarginalModel(double var_x, double mu, double sigma)
    : var_x_(var_x), sd_x_(std::sqrt(var_x)), mu_(mu), sigma_(sigma) {
  if (!(var_x > 0.0) || !std::isfinite(var_x)) throw ParameterError("marginal variance must be positive");
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
}

MarginalModel::MarginalModel(const CoefficientSet& coeffs, double mu, double sigma)
    : MarginalModel(
          [&] {
            double v = 0.0;
            for (double c : coeffs.c) {
              if (!std::isfinite(c)) throw ParameterError("non-finite coefficient");
              v += c * c;
            }
            return v;
          }(),
          mu, sigma) {}

double MarginalModel::cdf(double z) const {
  return 0.5 * std::erfc(-z / (sd_x_ * std::numbers::sqrt2));
}

double MarginalModel::pdf(double z) const {
  return std::exp(-0.5 * z * z / var_x_) / (sd_x_ * std::sqrt(2.0 * std::numbers::pi));
}

double MarginalModel::pdf_derivative(int r, double z) const {
  const double v = var_x_;
  const double f = pdf(z);
  switch (r) {
    case 0:
      return f;
    case 1:
      return -z / v * f;
    case 2:
      return (z * z / (v * v) - 1.0 / v) * f;
    case 3:
      return (-z * z * z / (v * v * v) + 3.0 * z / (v * v)) * f;
    default:
      throw ParameterError("pdf_derivative: order must be in 0..3");
  }
}

double MarginalModel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("quantile level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, sd_x_), p);
}

double MarginalModel::sup_abs_pdf_derivative(int r) const {
  // In units t = z / sd the maximisers are t = 0, 1, 0 and sqrt(3 - sqrt 6).
  switch (r) {
    case 0:
      return std::abs(pdf_derivative(0, 0.0));
    case 1:
      return std::abs(pdf_derivative(1, sd_x_));
    case 2:
      return std::abs(pdf_derivative(2, 0.0));
    case 3:
      return std::abs(pdf_derivative(3, sd_x_ * std::sqrt(3.0 - std::sqrt(6.0))));
    default:
      throw ParameterError("sup_abs_pdf_derivative: order must be in 0..3");
  }
}

double MarginalModel::grad_theta_H(int r, double x) const {
  if (r < 1 || r > 4) throw ParameterError("grad_theta_H: order must be in 1..4");
  const double sign = (r % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(sigma_, -r) * pdf_derivative(r - 1, (x - mu_) / sigma_);
}

MarginalModel marginal_model(const CoefficientSet& coeffs, double mu, double sigma) {
  return MarginalModel(coeffs, mu, sigma);
}

}  // namespace lrdemp
