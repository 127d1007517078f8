#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "lrdemp/process.hpp"

namespace lrdemp {

/// Catalog of odd, nondecreasing, bounded score functions.
class PsiFunction {
 public:
  enum class Kind { sign, huber, smoothed_sign };

  static PsiFunction sign();
  /// psi(r) = clamp(r, -c, c).
  static PsiFunction huber(double c = 1.345);
  /// psi(r) = tanh(r / h).
  static PsiFunction smoothed_sign(double h = 0.1);
  /// "sign" | "huber:<c>" | "ssign:<h>" (bare "huber"/"ssign" take the defaults).
  static PsiFunction parse(const std::string& spec);

  double operator()(double r) const noexcept;

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return param_; }
  /// Canonical CLI spelling, e.g. "huber:1.345".
  std::string name() const;
  /// Points where psi is not smooth (quadrature breakpoints).
  std::vector<double> kinks() const;

 private:
  PsiFunction(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

double sample_mean(std::span<const double> y);

/// Location M-estimate: the zero crossing of x -> sum_j psi(y_j - x), a
/// nonincreasing function. Returns the midpoint of [sup{g > 0}, inf{g < 0}],
/// each end located by bisection to width `tol` after doubling a bracket that
/// starts at [median - 1, median + 1].
double m_estimate(std::span<const double> y, const PsiFunction& psi, double tol = 1e-10);

/// lambda_k = int psi(y) f^{(k)}(y) dy over +-8 standard deviations, k in {1, 2}.
double lambda_k(const PsiFunction& psi, const MarginalModel& marginal, int k);

struct SigmaPsiEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
};

/// Sample variance of sqrt(n) (M_n - Ybar_n) across `reps` >= 200 paths; beta > 3/4 only.
SigmaPsiEstimate estimate_sigma_psi_sq(const ProcessConfig& config, const PsiFunction& psi,
                                       std::size_t n, std::size_t reps);

}  // namespace lrdemp
