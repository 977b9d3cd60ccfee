#include "earshot/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include "earshot/error.hpp"

namespace earshot {
namespace {

enum class PlanKind { kR2C, kC2R, kC2CForward, kC2CBackward };

// FFTW's planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan cached_plan(PlanKind kind, std::size_t n) {
  static std::map<std::pair<PlanKind, std::size_t>, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  const auto key = std::make_pair(kind, n);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int size = static_cast<int>(n);
  constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  double* real = fftw_alloc_real(n);
  fftw_complex* cin = fftw_alloc_complex(n);
  fftw_complex* cout = fftw_alloc_complex(n);
  fftw_plan plan = nullptr;
  switch (kind) {
    case PlanKind::kR2C: plan = fftw_plan_dft_r2c_1d(size, real, cout, kFlags); break;
    case PlanKind::kC2R: plan = fftw_plan_dft_c2r_1d(size, cin, real, kFlags); break;
    case PlanKind::kC2CForward:
      plan = fftw_plan_dft_1d(size, cin, cout, FFTW_FORWARD, kFlags);
      break;
    case PlanKind::kC2CBackward:
      plan = fftw_plan_dft_1d(size, cin, cout, FFTW_BACKWARD, kFlags);
      break;
  }
  fftw_free(real);
  fftw_free(cin);
  fftw_free(cout);
  if (plan == nullptr) throw Error(Errc::kShapeMismatch, "FFTW could not plan size " + std::to_string(n));
  cache.emplace(key, plan);
  return plan;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

void check_span(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(Errc::kShapeMismatch, std::string(what) + ": expected " + std::to_string(want) +
                                          " elements, got " + std::to_string(got));
  }
}

std::size_t checked_size(std::size_t n) {
  if (n < 2) throw Error(Errc::kShapeMismatch, "FFT size must be >= 2");
  return n;
}

}  // namespace

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

RealFft::RealFft(std::size_t size)
    : size_(checked_size(size)),
      forward_plan_(cached_plan(PlanKind::kR2C, size)),
      inverse_plan_(cached_plan(PlanKind::kC2R, size)),
      real_scratch_(size),
      complex_scratch_(size / 2 + 1) {}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) {
  check_span(in.size(), size_, "RealFft::forward input");
  check_span(out.size(), bins(), "RealFft::forward output");
  std::copy(in.begin(), in.end(), real_scratch_.begin());
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), real_scratch_.data(),
                       as_fftw(out.data()));
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) {
  check_span(in.size(), bins(), "RealFft::inverse input");
  check_span(out.size(), size_, "RealFft::inverse output");
  // c2r destroys its input.
  std::copy(in.begin(), in.end(), complex_scratch_.begin());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), as_fftw(complex_scratch_.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& v : out) v *= scale;
}

ComplexFft::ComplexFft(std::size_t size)
    : size_(checked_size(size)),
      forward_plan_(cached_plan(PlanKind::kC2CForward, size)),
      inverse_plan_(cached_plan(PlanKind::kC2CBackward, size)),
      scratch_(size) {}

void ComplexFft::forward(std::span<const Complex> in, std::span<Complex> out) {
  check_span(in.size(), size_, "ComplexFft::forward input");
  check_span(out.size(), size_, "ComplexFft::forward output");
  std::copy(in.begin(), in.end(), scratch_.begin());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(scratch_.data()),
                   as_fftw(out.data()));
}

void ComplexFft::inverse(std::span<const Complex> in, std::span<Complex> out) {
  check_span(in.size(), size_, "ComplexFft::inverse input");
  check_span(out.size(), size_, "ComplexFft::inverse output");
  std::copy(in.begin(), in.end(), scratch_.begin());
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(scratch_.data()),
                   as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& v : out) v *= scale;
}

}  // namespace earshot
