#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lrdemp/multilinear.hpp"
#include "lrdemp/process.hpp"
#include "lrdemp/scalings.hpp"

namespace lrdemp {

enum class GridOrigin { sample_jumps, quantile_grid };

struct EvaluationGrid {
  std::vector<double> points;  ///< strictly increasing
  GridOrigin origin = GridOrigin::quantile_grid;
  std::size_t m = 0;
};

/// Points H^{-1}(g / (m+1); theta0), g = 1..m.
EvaluationGrid quantile_grid(const MarginalModel& marginal, double theta0, std::size_t m);
/// Same grid in X units: F^{-1}(g / (m+1)).
EvaluationGrid quantile_grid_x(const MarginalModel& marginal, std::size_t m);
EvaluationGrid jump_grid(std::span<const double> sample);

/// Right-continuous F_n(x) = #{i : sample_i <= x} / n.
double ecdf(std::span<const double> sample, double x);

/// Sorted copy of a sample with O(log n) ecdf queries.
class SortedSample {
 public:
  explicit SortedSample(std::span<const double> sample);
  std::size_t size() const noexcept { return s_.size(); }
  const std::vector<double>& values() const noexcept { return s_; }
  /// #{i : x_i <= x}
  std::size_t count_le(double x) const;
  /// #{i : x_i < x}
  std::size_t count_lt(double x) const;
  double ecdf(double x) const { return static_cast<double>(count_le(x)) / static_cast<double>(s_.size()); }

 private:
  std::vector<double> s_;
};

enum class ProcessLabel { beta_n, gamma_n, gamma_hat_n, s_np_residual };
std::string to_string(ProcessLabel label);

struct ProcessTrace {
  EvaluationGrid grid;
  std::vector<double> values;
  ProcessLabel label = ProcessLabel::beta_n;
  double scaling_used = 0.0;
};

/// beta_n(x) = (n / sigma_{n,1}) (F_n(x) - F(x)) on X-unit points;
/// gamma_n, gamma_hat_n on Y-unit points, the latter against H(x; theta_hat).
ProcessTrace process_trace(const PathBundle& path, const MarginalModel& marginal,
                           std::optional<double> theta_hat, const ScalingSet& scalings,
                           ProcessLabel which, const EvaluationGrid& grid);

/// sup_x |G_n(x) - G(x)| for the empirical cdf of `sample` and a continuous
/// nondecreasing `cdf`, evaluated exactly at the order statistics.
double sup_norm_exact(std::span<const double> sample, const std::function<double(double)>& cdf);

struct ReductionResult {
  ProcessTrace trace;        ///< S_{n,p} on jump points and the quantile grid
  double sup_abs = 0.0;      ///< includes left limits at the jumps
  double normalized_sup = 0.0;  ///< sup_abs / sigma_{n,p}
};

/// S_{n,p}(x) = sum_i (1{X_i <= x} - F(x)) + sum_{r=1}^{p} (-1)^{r-1} F^{(r)}(x) Y_{n,r}.
ReductionResult reduction_residual(const PathBundle& path, const MarginalModel& marginal,
                                   const MultilinearSums& sums, int p, double sigma_np,
                                   std::size_t grid_m = 512);

/// Second-order expansion of gamma_hat_n about theta0 = mu on a Y-unit grid.
struct TaylorTerms {
  std::vector<double> grid;
  std::vector<double> gamma_n;
  std::vector<double> first_order;   ///< (n / sigma_{n,1}) (theta0 - theta_hat) dH/dtheta
  std::vector<double> second_order;  ///< -(1/2) (n / sigma_{n,1}) (theta0 - theta_hat)^2 d2H/dtheta2
  std::vector<double> reconstructed; ///< gamma_n + first_order + second_order
  std::vector<double> gamma_hat;
  double max_reconstruction_error = 0.0;
  /// 2 * sup|f''| / (6 sigma^3) * |theta0 - theta_hat|^3 * n / sigma_{n,1}
  double remainder_bound = 0.0;
  /// max |first_order - f((x-mu)/sigma) sum X_i / sigma_{n,1}|; ~0 when theta_hat = Ybar.
  double mean_cancellation_error = 0.0;
};

TaylorTerms taylor_decomposition(const PathBundle& path, const MarginalModel& marginal,
                                 double theta_hat, const ScalingSet& scalings,
                                 const EvaluationGrid& grid);

/// CSV with header "x,value,label".
void write_trace_csv(std::ostream& os, const ProcessTrace& trace);

}  // namespace lrdemp
