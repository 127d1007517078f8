#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lrdemp {

/// Real-to-complex FFT of a fixed power-of-two length. Plans are shared and
/// cached per length; `forward`/`inverse` are safe to call concurrently.
class RealFft {
 public:
  explicit RealFft(std::size_t length);

  std::size_t length() const noexcept { return length_; }
  std::size_t spectrum_size() const noexcept { return length_ / 2 + 1; }

  /// Zero-pads `in` to length(). Requires in.size() <= length().
  std::vector<std::complex<double>> forward(std::span<const double> in) const;
  /// Unnormalized inverse (result is length() times the true inverse).
  std::vector<double> inverse(std::span<const std::complex<double>> spectrum) const;

 private:
  std::size_t length_;
  void* plan_fwd_;
  void* plan_inv_;
};

std::size_t next_pow2(std::size_t n) noexcept;

}  // namespace lrdemp
