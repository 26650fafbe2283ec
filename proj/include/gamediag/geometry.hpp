#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "gamediag/error.hpp"

namespace gamediag {

inline constexpr double kArcminPerRadian = 60.0 * 180.0 / std::numbers::pi;

/// Physical display description; the anchor for all visual-angle math.
struct ScreenProfile {
  double width_mm = 0.0;
  double height_mm = 0.0;
  int width_px = 0;
  int height_px = 0;
  double max_luminance_cdm2 = 0.0;
  double black_luminance_cdm2 = 0.0;

  /// Millimetres per pixel, taken from the horizontal axis.
  double pitch_mm() const { return width_mm / width_px; }

  double luminance_range() const { return max_luminance_cdm2 - black_luminance_cdm2; }

  void validate() const {
    if (!(width_mm > 0 && height_mm > 0 && width_px > 0 && height_px > 0)) {
      throw Error(ErrorCode::InvalidGeometry, "screen dimensions must be positive");
    }
    const double pitch_w = width_mm / width_px;
    const double pitch_h = height_mm / height_px;
    if (std::abs(pitch_w - pitch_h) > 0.01 * pitch_w) {
      throw Error(ErrorCode::InvalidGeometry, "pixel pitch is not square within 1%");
    }
    if (!(black_luminance_cdm2 >= 0 && black_luminance_cdm2 < max_luminance_cdm2)) {
      throw Error(ErrorCode::InvalidGeometry, "need 0 <= black luminance < max luminance");
    }
  }

  friend bool operator==(const ScreenProfile&, const ScreenProfile&) = default;
};

/// One reading of the distance sensor and ambient light sensor.
struct ViewingSample {
  double distance_mm = 0.0;
  double ambient_lux = 0.0;
  std::int64_t timestamp_ms = 0;

  void validate() const {
    if (!(distance_mm > 0)) throw Error(ErrorCode::InvalidGeometry, "distance must be positive");
    if (!(ambient_lux >= 0)) throw Error(ErrorCode::InvalidGeometry, "ambient lux must be >= 0");
  }

  friend bool operator==(const ViewingSample&, const ViewingSample&) = default;
};

/// Full visual angle subtended by a centred extent of `size_px` pixels.
inline double px_to_arcmin(double size_px, const ScreenProfile& screen, double distance_mm) {
  if (!(distance_mm > 0)) throw Error(ErrorCode::InvalidGeometry, "distance must be positive");
  if (!(size_px >= 0)) throw Error(ErrorCode::InvalidGeometry, "size must be non-negative");
  const double extent_mm = size_px * screen.pitch_mm();
  return 2.0 * std::atan(extent_mm / (2.0 * distance_mm)) * kArcminPerRadian;
}

/// Exact inverse of px_to_arcmin. The result is fractional; quantisation is
/// left to the caller.
inline double arcmin_to_px(double angle_arcmin, const ScreenProfile& screen, double distance_mm) {
  if (!(distance_mm > 0)) throw Error(ErrorCode::InvalidGeometry, "distance must be positive");
  if (!(angle_arcmin >= 0)) throw Error(ErrorCode::InvalidGeometry, "angle must be non-negative");
  if (angle_arcmin >= 90.0 * 60.0) throw Error(ErrorCode::InvalidGeometry, "angle must be below 90 degrees");
  const double half_angle_rad = angle_arcmin / kArcminPerRadian / 2.0;
  return 2.0 * distance_mm * std::tan(half_angle_rad) / screen.pitch_mm();
}

}  // namespace gamediag
