#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "gamediag/channel.hpp"
#include "gamediag/geometry.hpp"

namespace gamediag {

enum class ProbeMode { MiniGame, Integrated };

constexpr std::string_view to_string(ProbeMode mode) noexcept {
  return mode == ProbeMode::MiniGame ? "MiniGame" : "Integrated";
}

using Rgb = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

namespace detail {

inline Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline Rgb apply(const Mat3& m, const Rgb& v) {
  Rgb out{};
  for (int i = 0; i < 3; ++i) out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return out;
}

inline Mat3 inverse(const Mat3& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 inv{};
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

}  // namespace detail

/// Linear-RGB <-> cone-excitation transform used for color probes.
///
/// An intensity of 1.0 on a color axis is the full-scale cone contrast of
/// that axis' confusion cone (L for protan, M for deutan, S for tritan); the
/// other cones compensate so the probe stays isoluminant with its background.
struct ColorTransform {
  /// Linear sRGB (D65) to CIE XYZ.
  Mat3 xyz_from_rgb{{{0.4124, 0.3576, 0.1805}, {0.2126, 0.7152, 0.0722}, {0.0193, 0.1192, 0.9505}}};
  /// Hunt-Pointer-Estevez cone fundamentals.
  Mat3 lms_from_xyz{{{0.38971, 0.68898, -0.07868}, {-0.22981, 1.18340, 0.04641}, {0.0, 0.0, 1.0}}};
  /// Confusion-cone contrast reached at intensity 1.0, per axis.
  std::array<double, 3> full_scale_contrast{0.10, 0.06, 0.70};
  Rgb background{0.5, 0.5, 0.5};

  Mat3 lms_from_rgb() const { return detail::multiply(lms_from_xyz, xyz_from_rgb); }

  double luminance(const Rgb& rgb) const {
    const auto& y = xyz_from_rgb[1];
    return y[0] * rgb[0] + y[1] * rgb[1] + y[2] * rgb[2];
  }
};

/// Target and background colors for one isoluminant color probe.
inline std::pair<Rgb, Rgb> color_axis_colors(ColorAxis axis, double contrast, const Rgb& background,
                                             const ColorTransform& transform = {}) {
  if (!(contrast >= 0.0 && contrast <= 1.0)) {
    throw Error(ErrorCode::InvalidIntensity, "cone contrast must lie in [0, 1]");
  }
  for (double c : background) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::GamutExceeded, "background outside [0,1]^3");
  }
  if (contrast == 0.0) return {background, background};

  const Mat3 to_lms = transform.lms_from_rgb();
  const Mat3 to_rgb = detail::inverse(to_lms);
  // Luminance expressed as a row acting on LMS, so compensation is exact.
  std::array<double, 3> lum_row{};
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) lum_row[j] += transform.xyz_from_rgb[1][k] * to_rgb[k][j];
  }

  const Rgb lms = detail::apply(to_lms, background);
  const int confusion = static_cast<int>(axis);
  // Protan compensates in M; deutan and tritan compensate in L.
  const int compensate = axis == ColorAxis::Protan ? 1 : 0;
  Rgb delta{};
  delta[confusion] = contrast * transform.full_scale_contrast[confusion] * lms[confusion];
  delta[compensate] = -lum_row[confusion] * delta[confusion] / lum_row[compensate];

  Rgb target_lms = lms;
  for (int i = 0; i < 3; ++i) target_lms[i] += delta[i];
  const Rgb target = detail::apply(to_rgb, target_lms);
  for (double c : target) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::GamutExceeded, "color excursion leaves [0,1]^3");
  }
  return {target, background};
}

struct StimulusConfig {
  double orientation_cycles_per_degree = 6.0;
  double orientation_patch_arcmin = 120.0;
  double color_patch_arcmin = 60.0;
  double scotopic_target_arcmin = 60.0;
  /// Landolt ring outer diameter as a multiple of its gap.
  double acuity_extent_ratio = 5.0;
  double scotopic_max_lux = 10.0;
  ColorTransform color;
};

/// Parametric description of one probe; the contract shared by the game UI
/// and the observer simulator.
struct StimulusSpec {
  Channel channel;
  double intensity = 0.0;
  int target_descriptor = 0;
  std::vector<int> distractor_descriptors;
  std::array<double, 2> position_px{0.0, 0.0};
  double rendered_size_px = 0.0;
  ProbeMode mode = ProbeMode::MiniGame;
  bool feasible = false;

  int alphabet_size() const { return static_cast<int>(distractor_descriptors.size()) + 1; }

  friend bool operator==(const StimulusSpec&, const StimulusSpec&) = default;
};

/// Throws InvalidIntensity when `intensity` is outside the channel's domain.
inline void check_intensity(const Channel& channel, double intensity, const ScreenProfile& screen) {
  bool ok = false;
  switch (channel.kind) {
    case ChannelKind::Acuity: ok = intensity > 0.0 && std::isfinite(intensity); break;
    case ChannelKind::ColorAxis:
    case ChannelKind::Orientation: ok = intensity > 0.0 && intensity <= 1.0; break;
    case ChannelKind::Scotopic: ok = intensity > 0.0 && intensity <= screen.luminance_range(); break;
  }
  if (!ok) throw Error(ErrorCode::InvalidIntensity, channel.name() + " intensity out of bounds");
}

/// Critical feature and overall extent of a probe, both in arcmin.
inline std::pair<double, double> probe_angles(const Channel& channel, double intensity,
                                              const StimulusConfig& config) {
  switch (channel.kind) {
    case ChannelKind::Acuity: return {intensity, intensity * config.acuity_extent_ratio};
    case ChannelKind::ColorAxis: return {config.color_patch_arcmin, config.color_patch_arcmin};
    case ChannelKind::Orientation:
      return {60.0 / (2.0 * config.orientation_cycles_per_degree), config.orientation_patch_arcmin};
    case ChannelKind::Scotopic: return {config.scotopic_target_arcmin, config.scotopic_target_arcmin};
  }
  return {0.0, 0.0};
}

inline StimulusSpec make_stimulus(const Channel& channel, double intensity, const ScreenProfile& screen,
                                  const ViewingSample& view, ProbeMode mode, int alphabet_size,
                                  std::uint64_t seed, const StimulusConfig& config = {}) {
  view.validate();
  if (alphabet_size < 2) throw Error(ErrorCode::InvalidIntensity, "alphabet needs at least 2 symbols");
  if (channel.kind == ChannelKind::Scotopic && view.ambient_lux > config.scotopic_max_lux) {
    throw Error(ErrorCode::AmbientTooBright, "scotopic probes need ambient <= " +
                                                 std::to_string(config.scotopic_max_lux) + " lux");
  }
  check_intensity(channel, intensity, screen);

  std::mt19937_64 rng(seed);
  StimulusSpec spec;
  spec.channel = channel;
  spec.intensity = intensity;
  spec.mode = mode;
  spec.target_descriptor = std::uniform_int_distribution<int>(0, alphabet_size - 1)(rng);
  for (int s = 0; s < alphabet_size; ++s) {
    if (s != spec.target_descriptor) spec.distractor_descriptors.push_back(s);
  }

  const auto [feature_arcmin, extent_arcmin] = probe_angles(channel, intensity, config);
  const double max_arcmin = 90.0 * 60.0 - 1e-9;
  spec.rendered_size_px = arcmin_to_px(std::min(feature_arcmin, max_arcmin), screen, view.distance_mm);
  const double extent_px = arcmin_to_px(std::min(extent_arcmin, max_arcmin), screen, view.distance_mm);

  const bool fits = extent_px <= screen.width_px && extent_px <= screen.height_px;
  const double half = extent_px / 2.0;
  if (fits) {
    spec.position_px[0] = std::uniform_real_distribution<double>(half, screen.width_px - half)(rng);
    spec.position_px[1] = std::uniform_real_distribution<double>(half, screen.height_px - half)(rng);
  } else {
    spec.position_px = {screen.width_px / 2.0, screen.height_px / 2.0};
  }

  bool in_gamut = true;
  if (channel.kind == ChannelKind::ColorAxis) {
    try {
      color_axis_colors(channel.color_axis, intensity, config.color.background, config.color);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GamutExceeded) throw;
      in_gamut = false;
    }
  }
  spec.feasible = fits && in_gamut && spec.rendered_size_px >= 1.0;
  return spec;
}

}  // namespace gamediag
