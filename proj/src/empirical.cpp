#include "lrdemp/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lrdemp/errors.hpp"

namespace lrdemp {

EvaluationGrid quantile_grid(const MarginalModel& marginal, double theta0, std::size_t m) {
  if (m == 0) throw ParameterError("quantile grid needs m >= 1");
  EvaluationGrid g;
  g.origin = GridOrigin::quantile_grid;
  g.m = m;
  g.points.reserve(m);
  for (std::size_t k = 1; k <= m; ++k)
    g.points.push_back(marginal.quantile_H(static_cast<double>(k) / static_cast<double>(m + 1), theta0));
  return g;
}

EvaluationGrid quantile_grid_x(const MarginalModel& marginal, std::size_t m) {
  if (m == 0) throw ParameterError("quantile grid needs m >= 1");
  EvaluationGrid g;
  g.origin = GridOrigin::quantile_grid;
  g.m = m;
  for (std::size_t k = 1; k <= m; ++k)
    g.points.push_back(marginal.quantile(static_cast<double>(k) / static_cast<double>(m + 1)));
  return g;
}

EvaluationGrid jump_grid(std::span<const double> sample) {
  EvaluationGrid g;
  g.origin = GridOrigin::sample_jumps;
  g.points.assign(sample.begin(), sample.end());
  std::sort(g.points.begin(), g.points.end());
  g.points.erase(std::unique(g.points.begin(), g.points.end()), g.points.end());
  g.m = g.points.size();
  return g;
}

double ecdf(std::span<const double> sample, double x) {
  if (sample.empty()) throw ParameterError("ecdf of an empty sample");
  const auto c = std::count_if(sample.begin(), sample.end(), [x](double v) { return v <= x; });
  return static_cast<double>(c) / static_cast<double>(sample.size());
}

SortedSample::SortedSample(std::span<const double> sample) : s_(sample.begin(), sample.end()) {
  if (s_.empty()) throw ParameterError("empty sample");
  std::sort(s_.begin(), s_.end());
}

std::size_t SortedSample::count_le(double x) const {
  return static_cast<std::size_t>(std::upper_bound(s_.begin(), s_.end(), x) - s_.begin());
}

std::size_t SortedSample::count_lt(double x) const {
  return static_cast<std::size_t>(std::lower_bound(s_.begin(), s_.end(), x) - s_.begin());
}

std::string to_string(ProcessLabel label) {
  switch (label) {
    case ProcessLabel::beta_n:
      return "beta_n";
    case ProcessLabel::gamma_n:
      return "gamma_n";
    case ProcessLabel::gamma_hat_n:
      return "gamma_hat_n";
    case ProcessLabel::s_np_residual:
      return "s_np_residual";
  }
  return "unknown";
}

ProcessTrace process_trace(const PathBundle& path, const MarginalModel& marginal,
                           std::optional<double> theta_hat, const ScalingSet& scalings,
                           ProcessLabel which, const EvaluationGrid& grid) {
  if (which == ProcessLabel::gamma_hat_n && !theta_hat)
    throw ParameterError("gamma_hat_n needs an estimate theta_hat");
  if (which == ProcessLabel::s_np_residual)
    throw ParameterError("use reduction_residual for S_{n,p}");
  const double n = static_cast<double>(path.n());
  ProcessTrace t;
  t.grid = grid;
  t.label = which;
  t.scaling_used = n / scalings.sigma_n1;
  t.values.resize(grid.points.size());
  const SortedSample sorted(which == ProcessLabel::beta_n ? path.x : path.y);
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const double x = grid.points[k];
    double model = 0.0;
    switch (which) {
      case ProcessLabel::beta_n:
        model = marginal.cdf(x);
        break;
      case ProcessLabel::gamma_n:
        model = marginal.H(x, marginal.mu());
        break;
      default:
        model = marginal.H(x, *theta_hat);
        break;
    }
    t.values[k] = t.scaling_used * (sorted.ecdf(x) - model);
  }
  return t;
}

double sup_norm_exact(std::span<const double> sample, const std::function<double(double)>& cdf) {
  const SortedSample s(sample);
  const auto& v = s.values();
  const double n = static_cast<double>(v.size());
  double prev = -1.0;
  double sup = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double g = cdf(v[i]);
    if (!(g >= 0.0 && g <= 1.0) || g < prev)
      throw ContractError("cdf evaluator is not a nondecreasing map into [0, 1]");
    prev = g;
    const double k = static_cast<double>(i + 1);
    sup = std::max({sup, k / n - g, g - (k - 1.0) / n});
  }
  return sup;
}

ReductionResult reduction_residual(const PathBundle& path, const MarginalModel& marginal,
                                   const MultilinearSums& sums, int p, double sigma_np,
                                   std::size_t grid_m) {
  if (p != 1 && p != 2) throw ParameterError("reduction_residual supports p in {1, 2}");
  if (!(sigma_np > 0.0)) throw ParameterError("sigma_{n,p} must be positive");
  const SortedSample sorted(path.x);
  const double n = static_cast<double>(path.n());
  auto correction = [&](double x) {
    double v = marginal.pdf(x) * sums.y1;
    if (p == 2) v -= marginal.pdf_derivative(1, x) * sums.y2;
    return v;
  };

  auto grid = quantile_grid_x(marginal, grid_m);
  std::vector<double> pts = sorted.values();
  pts.insert(pts.end(), grid.points.begin(), grid.points.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  ReductionResult out;
  out.trace.label = ProcessLabel::s_np_residual;
  out.trace.scaling_used = 1.0 / sigma_np;
  out.trace.grid.points = pts;
  out.trace.grid.origin = GridOrigin::sample_jumps;
  out.trace.grid.m = pts.size();
  out.trace.values.resize(pts.size());
  double sup = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double x = pts[k];
    const double base = correction(x) - n * marginal.cdf(x);
    const double right = static_cast<double>(sorted.count_le(x)) + base;
    const double left = static_cast<double>(sorted.count_lt(x)) + base;
    out.trace.values[k] = right;
    sup = std::max({sup, std::abs(right), std::abs(left)});
  }
  out.sup_abs = sup;
  out.normalized_sup = sup / sigma_np;
  return out;
}

TaylorTerms taylor_decomposition(const PathBundle& path, const MarginalModel& marginal,
                                 double theta_hat, const ScalingSet& scalings,
                                 const EvaluationGrid& grid) {
  if (!std::isfinite(theta_hat)) throw ParameterError("theta_hat must be finite");
  const double n = static_cast<double>(path.n());
  const double scale = n / scalings.sigma_n1;
  const double delta = marginal.mu() - theta_hat;
  const double sigma = marginal.sigma();
  double sum_x = 0.0;
  for (double v : path.x) sum_x += v;

  const SortedSample sorted(path.y);
  TaylorTerms t;
  t.grid = grid.points;
  const std::size_t m = grid.points.size();
  t.gamma_n.resize(m);
  t.first_order.resize(m);
  t.second_order.resize(m);
  t.reconstructed.resize(m);
  t.gamma_hat.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double x = grid.points[k];
    const double hn = sorted.ecdf(x);
    t.gamma_n[k] = scale * (hn - marginal.H(x, marginal.mu()));
    t.gamma_hat[k] = scale * (hn - marginal.H(x, theta_hat));
    t.first_order[k] = scale * delta * marginal.grad_theta_H(1, x);
    t.second_order[k] = -0.5 * scale * delta * delta * marginal.grad_theta_H(2, x);
    t.reconstructed[k] = t.gamma_n[k] + t.first_order[k] + t.second_order[k];
    t.max_reconstruction_error =
        std::max(t.max_reconstruction_error, std::abs(t.gamma_hat[k] - t.reconstructed[k]));
    const double cancel = marginal.pdf((x - marginal.mu()) / sigma) * sum_x / scalings.sigma_n1;
    t.mean_cancellation_error = std::max(t.mean_cancellation_error, std::abs(t.first_order[k] - cancel));
  }
  const double c = marginal.sup_abs_pdf_derivative(2) / (6.0 * sigma * sigma * sigma);
  t.remainder_bound = 2.0 * c * std::abs(delta * delta * delta) * scale;
  return t;
}

void write_trace_csv(std::ostream& os, const ProcessTrace& trace) {
  os << "x,value,label\n";
  const std::string label = to_string(trace.label);
  char buf[96];
  for (std::size_t k = 0; k < trace.values.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", trace.grid.points[k], trace.values[k]);
    os << buf << label << '\n';
  }
}

}  // namespace lrdemp
