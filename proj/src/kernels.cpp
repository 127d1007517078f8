#include "lrdemp/kernels.hpp"

#include <algorithm>
#include <stdexcept>

#include "lrdemp/fft.hpp"

namespace lrdemp::kernels {
namespace {

void check_filter_args(std::span<const double> c, std::span<const double> e, std::size_t first,
                       std::size_t count) {
  if (c.empty()) throw std::invalid_argument("causal_filter: empty coefficient set");
  if (first + 1 < c.size()) throw std::invalid_argument("causal_filter: first < K");
  if (first + count > e.size()) throw std::out_of_range("causal_filter: output beyond input");
}

}  // namespace

std::vector<double> causal_filter_serial(std::span<const double> c, std::span<const double> e,
                                         std::size_t first, std::size_t count) {
  check_filter_args(c, e, first, count);
  std::vector<double> out(count, 0.0);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t t = first + s;
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * e[t - k];
    out[s] = acc;
  }
  return out;
}

std::vector<double> causal_filter_omp(std::span<const double> c, std::span<const double> e,
                                      std::size_t first, std::size_t count) {
  check_filter_args(c, e, first, count);
  std::vector<double> out(count, 0.0);
  const auto m = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < m; ++s) {
    const std::size_t t = first + static_cast<std::size_t>(s);
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * e[t - k];
    out[static_cast<std::size_t>(s)] = acc;
  }
  return out;
}

std::vector<double> causal_filter_fft(std::span<const double> c, std::span<const double> e,
                                      std::size_t first, std::size_t count) {
  check_filter_args(c, e, first, count);
  // Cyclic convolution of length L >= first + count leaves outputs at index >= K
  // free of wrap-around.
  const std::size_t used = first + count;
  const RealFft fft(std::max<std::size_t>(2, next_pow2(std::max(used, c.size()))));
  auto ec = fft.forward(e.first(used));
  const auto cc = fft.forward(c);
  for (std::size_t i = 0; i < ec.size(); ++i) ec[i] *= cc[i];
  const auto full = fft.inverse(ec);
  const double scale = 1.0 / static_cast<double>(fft.length());
  std::vector<double> out(count);
  for (std::size_t s = 0; s < count; ++s) out[s] = full[first + s] * scale;
  return out;
}

std::vector<double> autocovariance_serial(std::span<const double> c, std::size_t max_lag) {
  std::vector<double> rho(max_lag, 0.0);
  for (std::size_t k = 0; k < max_lag && k < c.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j + k < c.size(); ++j) acc += c[j] * c[j + k];
    rho[k] = acc;
  }
  return rho;
}

std::vector<double> autocovariance_omp(std::span<const double> c, std::size_t max_lag) {
  std::vector<double> rho(max_lag, 0.0);
  const auto lags = static_cast<long long>(std::min(max_lag, c.size()));
#pragma omp parallel for schedule(dynamic, 16)
  for (long long kk = 0; kk < lags; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    double acc = 0.0;
    for (std::size_t j = 0; j + k < c.size(); ++j) acc += c[j] * c[j + k];
    rho[k] = acc;
  }
  return rho;
}

std::vector<double> autocovariance_fft(std::span<const double> c, std::size_t max_lag) {
  std::vector<double> rho(max_lag, 0.0);
  if (c.empty() || max_lag == 0) return rho;
  const std::size_t lags = std::min(max_lag, c.size());
  // Wrap-around is absent for lags < L - K.
  const RealFft fft(std::max<std::size_t>(2, next_pow2(c.size() + lags)));
  auto spec = fft.forward(c);
  for (auto& z : spec) z = std::norm(z);
  const auto full = fft.inverse(spec);
  const double scale = 1.0 / static_cast<double>(fft.length());
  for (std::size_t k = 0; k < lags; ++k) rho[k] = full[k] * scale;
  return rho;
}

std::vector<double> autocovariance(std::span<const double> c, std::size_t max_lag) {
  const double work = static_cast<double>(c.size()) * static_cast<double>(std::min(max_lag, c.size()));
  if (work <= 4.0e6) return autocovariance_serial(c, max_lag);
  return autocovariance_fft(c, max_lag);
}

}  // namespace lrdemp::kernels
