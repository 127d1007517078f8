#pragma once

#include <cstddef>
#include <span>
#include <vector>

/// Data-parallel inner loops. Every kernel has a serial reference that the
/// tests compare the parallel and FFT variants against.
namespace lrdemp::kernels {

/// out[s] = sum_{k=0}^{K} c[k] * e[first + s - k] for s = 0..count-1, where
/// first >= K = c.size()-1 so no index falls below zero.
std::vector<double> causal_filter_serial(std::span<const double> c, std::span<const double> e,
                                         std::size_t first, std::size_t count);
std::vector<double> causal_filter_omp(std::span<const double> c, std::span<const double> e,
                                      std::size_t first, std::size_t count);
std::vector<double> causal_filter_fft(std::span<const double> c, std::span<const double> e,
                                      std::size_t first, std::size_t count);

/// rho[k] = sum_j c[j] c[j+k] for k = 0..max_lag-1 (zero beyond the support).
std::vector<double> autocovariance_serial(std::span<const double> c, std::size_t max_lag);
std::vector<double> autocovariance_omp(std::span<const double> c, std::size_t max_lag);
std::vector<double> autocovariance_fft(std::span<const double> c, std::size_t max_lag);

/// Dispatches to the direct loop for small work and to the FFT otherwise.
std::vector<double> autocovariance(std::span<const double> c, std::size_t max_lag);

}  // namespace lrdemp::kernels
