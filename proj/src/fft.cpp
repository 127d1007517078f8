#include "lrdemp/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace lrdemp {
namespace {

struct PlanPair {
  fftw_plan fwd;
  fftw_plan inv;
};

// FFTW's planner is not thread-safe; execution with fresh arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(std::size_t length) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(length); it != cache.end()) return it->second;
  auto* in = fftw_alloc_real(length);
  auto* out = fftw_alloc_complex(length / 2 + 1);
  const int len = static_cast<int>(length);
  PlanPair p{fftw_plan_dft_r2c_1d(len, in, out, FFTW_ESTIMATE),
             fftw_plan_dft_c2r_1d(len, out, in, FFTW_ESTIMATE)};
  fftw_free(in);
  fftw_free(out);
  if (!p.fwd || !p.inv) throw std::runtime_error("fftw planning failed");
  cache.emplace(length, p);
  return p;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double[], FftwFree>;
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwFree>;

}  // namespace

std::size_t next_pow2(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

RealFft::RealFft(std::size_t length) : length_(length) {
  if (length < 2 || (length & (length - 1)) != 0)
    throw std::invalid_argument("RealFft length must be a power of two >= 2");
  auto p = plans_for(length);
  plan_fwd_ = p.fwd;
  plan_inv_ = p.inv;
}

std::vector<std::complex<double>> RealFft::forward(std::span<const double> in) const {
  if (in.size() > length_) throw std::invalid_argument("RealFft::forward: input longer than length");
  RealBuf buf(fftw_alloc_real(length_));
  ComplexBuf spec(fftw_alloc_complex(spectrum_size()));
  std::copy(in.begin(), in.end(), buf.get());
  std::fill(buf.get() + in.size(), buf.get() + length_, 0.0);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), buf.get(), spec.get());
  std::vector<std::complex<double>> out(spectrum_size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {spec[i][0], spec[i][1]};
  return out;
}

std::vector<double> RealFft::inverse(std::span<const std::complex<double>> spectrum) const {
  if (spectrum.size() != spectrum_size())
    throw std::invalid_argument("RealFft::inverse: spectrum size mismatch");
  ComplexBuf spec(fftw_alloc_complex(spectrum_size()));
  RealBuf buf(fftw_alloc_real(length_));
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    spec[i][0] = spectrum[i].real();
    spec[i][1] = spectrum[i].imag();
  }
  // c2r destroys its input; spec is a private copy.
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inv_), spec.get(), buf.get());
  return std::vector<double>(buf.get(), buf.get() + length_);
}

}  // namespace lrdemp
