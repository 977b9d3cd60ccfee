#include "earshot/spatializer.hpp"

#include <algorithm>
#include <cmath>

#include "earshot/error.hpp"
#include "earshot/fft.hpp"

namespace earshot {
namespace {

constexpr double kMinEarDistance = 0.01;

// Fills every frame of `field` for one ear with the same per-bin rows, then derives.
void fill_static(TransferField& field, Ear ear, std::span<const double> raw_scale,
                 std::span<const double> raw_shift, double g) {
  for (std::size_t f = 0; f < field.frames(); ++f) {
    std::copy(raw_scale.begin(), raw_scale.end(), field.raw_scale(f, ear).begin());
    std::copy(raw_shift.begin(), raw_shift.end(), field.raw_shift(f, ear).begin());
    field.geometric_delay(f, ear) = g;
  }
}

// varsigma such that varsigma / phi^2 == magnitude * g_ref / max(g, g_floor).
double raw_scale_for(double magnitude, double phi, double g, double g_ref, double g_floor) {
  return magnitude * g_ref * phi * phi / std::max(g, g_floor);
}

void check_fft_size(std::size_t fft_size) {
  if (!is_power_of_two(fft_size) || fft_size < 4) {
    throw Error(Errc::kShapeMismatch, "FFT size must be a power of two >= 4");
  }
}

}  // namespace

double geometric_delay(const SourcePose& pose, Ear ear, int sample_rate,
                       const SpatialConstants& constants) {
  const double side = ear == Ear::kLeft ? -constants.head_radius : constants.head_radius;
  const double d = (pose.position - Vec3{0.0, side, 0.0}).norm();
  if (!(d >= kMinEarDistance)) {
    throw Error(Errc::kDegenerateDistance,
                "source is " + std::to_string(d) + " m from the ear (minimum 0.01 m)");
  }
  return d * sample_rate / constants.speed_of_sound;
}

double woodworth_itd(double lateral_angle, double head_radius, double speed_of_sound) noexcept {
  return head_radius * (lateral_angle + std::sin(lateral_angle)) / speed_of_sound;
}

double head_shadow_gain(double frequency, double alpha, double head_radius,
                        double speed_of_sound) noexcept {
  if (head_radius <= 0.0) return 1.0;
  const double f0 = speed_of_sound / (2.0 * kPi * head_radius);
  const double r = frequency / f0;
  return std::sqrt((1.0 + alpha * alpha * r * r) / (1.0 + r * r));
}

TransferField parametric_field(const SourcePose& pose, std::size_t frames, std::size_t fft_size,
                               int sample_rate, const SpatialConstants& constants) {
  check_fft_size(fft_size);
  const double g_left = geometric_delay(pose, Ear::kLeft, sample_rate, constants);
  const double g_right = geometric_delay(pose, Ear::kRight, sample_rate, constants);

  const double d = pose.distance();
  const double lateral = d > 0.0 ? std::clamp(pose.position.y / d, -1.0, 1.0) : 0.0;
  const double theta = std::asin(std::abs(lateral));
  const double samples_per_meter = sample_rate / constants.speed_of_sound;
  const double g_ref = constants.reference_distance * samples_per_meter;
  const double g_floor = constants.distance_floor * samples_per_meter;

  TransferField field(frames, fft_size, 1);
  const std::size_t bins = field.bins();
  std::vector<double> scale_row(bins), shift_row(bins);

  for (Ear ear : kEars) {
    const double g = ear == Ear::kLeft ? g_left : g_right;
    // Source to the right (lateral > 0) shadows the left ear.
    const bool far = (lateral > 0.0 && ear == Ear::kLeft) || (lateral < 0.0 && ear == Ear::kRight);
    double varphi = 0.0;
    double alpha = 1.0;
    if (far) {
      const double g_near = ear == Ear::kLeft ? g_right : g_left;
      const double itd = woodworth_itd(theta, constants.head_radius, constants.speed_of_sound) * sample_rate;
      varphi = std::clamp(itd - (g - g_near), 0.0, shift_cap(fft_size));
      alpha = 1.0 - std::abs(lateral);
    }
    const double phi = varphi + g;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(fft_size);
      const double shadow =
          far ? head_shadow_gain(f, alpha, constants.head_radius, constants.speed_of_sound) : 1.0;
      scale_row[k] = raw_scale_for(shadow, phi, g, g_ref, g_floor);
      shift_row[k] = varphi;
    }
    fill_static(field, ear, scale_row, shift_row, g);
  }
  field.derive();
  return field;
}

ResponseTransfer response_transfer(std::span<const double> response, std::size_t fft_size) {
  check_fft_size(fft_size);
  if (2 * response.size() > fft_size) {
    throw Error(Errc::kResponseTooLong, "response of " + std::to_string(response.size()) +
                                            " samples needs K >= " +
                                            std::to_string(2 * response.size()) + ", got " +
                                            std::to_string(fft_size));
  }
  std::vector<double> padded(fft_size, 0.0);
  std::copy(response.begin(), response.end(), padded.begin());
  RealFft fft(fft_size);
  std::vector<Complex> spectrum(fft.bins());
  fft.forward(padded, spectrum);

  ResponseTransfer out;
  out.magnitude.resize(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) out.magnitude[k] = std::abs(spectrum[k]);

  double weighted = 0.0, total = 0.0;
  for (std::size_t n = 0; n < response.size(); ++n) {
    const double e = response[n] * response[n];
    weighted += static_cast<double>(n) * e;
    total += e;
  }
  out.delay = total > 0.0 ? weighted / total : 0.0;
  return out;
}

TransferField hrir_field(const SourcePose& pose, std::size_t frames, std::size_t fft_size,
                         const HrirSet& set, const SpatialConstants& constants) {
  check_fft_size(fft_size);
  if (2 * set.max_response_length() > fft_size) {
    throw Error(Errc::kResponseTooLong, "HRIRs of " + std::to_string(set.max_response_length()) +
                                            " samples need K >= " +
                                            std::to_string(2 * set.max_response_length()));
  }
  const double d = pose.distance();
  if (!(d >= kMinEarDistance)) {
    throw Error(Errc::kDegenerateDistance, "source is closer than 0.01 m to the listener");
  }
  const int fs = set.sample_rate();
  const double samples_per_meter = fs / constants.speed_of_sound;
  const double g = d * samples_per_meter;
  const double g_ref = constants.reference_distance * samples_per_meter;
  const double g_floor = constants.distance_floor * samples_per_meter;

  const HrirPair pair = set.interpolate(pose.azimuth_deg(), pose.elevation_deg());
  TransferField field(frames, fft_size, 1);
  std::vector<double> scale_row(field.bins()), shift_row(field.bins());
  for (Ear ear : kEars) {
    const auto transfer = response_transfer(ear == Ear::kLeft ? pair.left : pair.right, fft_size);
    const double varphi = std::clamp(transfer.delay, 0.0, shift_cap(fft_size));
    const double phi = varphi + g;
    for (std::size_t k = 0; k < field.bins(); ++k) {
      scale_row[k] = raw_scale_for(transfer.magnitude[k], phi, g, g_ref, g_floor);
      shift_row[k] = varphi;
    }
    fill_static(field, ear, scale_row, shift_row, g);
  }
  field.derive();
  return field;
}

}  // namespace earshot
