#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace earshot {

using Complex = std::complex<double>;

/// Real-input FFT of a fixed size, backed by cached FFTW plans.
///
/// Instances own scratch buffers and must not be shared between threads;
/// create one per thread. Plans are shared and created under a lock.
class RealFft {
 public:
  explicit RealFft(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  std::size_t bins() const noexcept { return size_ / 2 + 1; }

  /// `out` receives bins 0..size/2 (unnormalized).
  void forward(std::span<const double> in, std::span<Complex> out);
  /// Inverse of `forward`, scaled by 1/size so that inverse(forward(x)) == x.
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  std::size_t size_;
  void* forward_plan_;
  void* inverse_plan_;
  std::vector<double> real_scratch_;
  std::vector<Complex> complex_scratch_;
};

/// Complex-to-complex FFT of a fixed size. Same threading rules as RealFft.
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  void forward(std::span<const Complex> in, std::span<Complex> out);
  /// Scaled by 1/size.
  void inverse(std::span<const Complex> in, std::span<Complex> out);

 private:
  std::size_t size_;
  void* forward_plan_;
  void* inverse_plan_;
  std::vector<Complex> scratch_;
};

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

}  // namespace earshot
