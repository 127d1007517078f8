#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lrdemp {

enum class Innovation { standard_gaussian };

std::string to_string(Innovation innovation);
Innovation parse_innovation(const std::string& name);

/// Everything needed to simulate one model Y_i = sigma * X_i + mu with
/// X_i = sum_{k=0}^{K} c_k eps_{i-k}.
struct ProcessConfig {
  double beta = 0.7;
  std::size_t trunc_K = std::size_t{1} << 16;
  Innovation innovation = Innovation::standard_gaussian;
  double mu = 0.0;
  double sigma = 1.0;
  std::uint64_t seed = 1;

  /// Throws ParameterError unless 1/2 < beta < 1 and sigma > 0.
  void validate() const;
};

/// c_k = (k+1)^{-beta}, k = 0..K (slowly varying part L_0 == 1).
struct CoefficientSet {
  std::vector<double> c;
  double beta = 0.0;

  std::size_t trunc_K() const noexcept { return c.empty() ? 0 : c.size() - 1; }
  /// Sum_{k>K} (k+1)^{-2 beta} bounded by the integral tail; the variance the truncation drops.
  double variance_tail_bound() const;
};

CoefficientSet gen_coefficients(double beta, std::size_t trunc_K);

/// One realization. Index t of eps runs over 1-K..n and is stored at eps[t+K-1].
struct PathBundle {
  std::vector<double> eps;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> u;  ///< U_i = sum_{j>=1} c_j eps_{i-j}
  std::vector<double> q;  ///< Q_i = sum_{j>=1} c_j^2 eps_{i-j}^2
  std::size_t trunc_K = 0;
  std::uint64_t seed = 0;

  std::size_t n() const noexcept { return x.size(); }
  /// eps_t for t in [1-K, n].
  double innovation(long long t) const { return eps.at(static_cast<std::size_t>(t + static_cast<long long>(trunc_K) - 1)); }
  /// Q_i + eps_i^2 = sum_{j>=0} c_j^2 eps_{i-j}^2 for i = 1..n (index i-1).
  double q_full(std::size_t i) const { return q[i] + eps[i + trunc_K] * eps[i + trunc_K]; }
};

enum class ConvolutionMethod { fft, direct, direct_parallel };

/// Precomputes coefficient spectra for a fixed (config, n) so that many paths
/// can be drawn cheaply. `generate` is const and thread-safe.
class PathGenerator {
 public:
  PathGenerator(const ProcessConfig& config, std::size_t n,
                ConvolutionMethod method = ConvolutionMethod::fft);
  ~PathGenerator();
  PathGenerator(PathGenerator&&) noexcept;
  PathGenerator& operator=(PathGenerator&&) noexcept;

  PathBundle generate(std::uint64_t seed) const;
  /// Builds the bundle from caller-supplied innovations (length n + K).
  PathBundle from_innovations(std::vector<double> eps, std::uint64_t seed = 0) const;

  const ProcessConfig& config() const noexcept { return config_; }
  const CoefficientSet& coefficients() const noexcept { return coeffs_; }
  std::size_t n() const noexcept { return n_; }

 private:
  struct Spectra;
  ProcessConfig config_;
  std::size_t n_;
  ConvolutionMethod method_;
  CoefficientSet coeffs_;
  std::vector<double> c_sq_;
  std::unique_ptr<Spectra> spectra_;
};

PathBundle generate_path(const ProcessConfig& config, std::size_t n,
                         ConvolutionMethod method = ConvolutionMethod::fft);

/// Closed-form marginal of X_1 (centered normal, variance sum c_k^2) and the
/// location-scale family H(x; theta) = F((x - theta) / sigma).
class MarginalModel {
 public:
  MarginalModel(const CoefficientSet& coeffs, double mu, double sigma);
  MarginalModel(double var_x, double mu, double sigma);

  double var_x() const noexcept { return var_x_; }
  double sd_x() const noexcept { return sd_x_; }
  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }

  double cdf(double z) const;
  double pdf(double z) const;
  /// f^{(r)}(z) for r = 0..3.
  double pdf_derivative(int r, double z) const;
  double quantile(double p) const;
  /// sup_z |f^{(r)}(z)|, r = 0..3.
  double sup_abs_pdf_derivative(int r) const;
  double sup_density() const { return sup_abs_pdf_derivative(0); }

  double H(double x, double theta) const { return cdf((x - theta) / sigma_); }
  double h(double x, double theta) const { return pdf((x - theta) / sigma_) / sigma_; }
  /// r-th derivative in theta of H(x; theta) at theta = mu:
  /// (-1)^r sigma^{-r} f^{(r-1)}((x - mu) / sigma).
  double grad_theta_H(int r, double x) const;
  double quantile_H(double p, double theta) const { return theta + sigma_ * quantile(p); }

 private:
  double var_x_;
  double sd_x_;
  double mu_;
  double sigma_;
};

MarginalModel marginal_model(const CoefficientSet& coeffs, double mu, double sigma);

}  // namespace lrdemp
