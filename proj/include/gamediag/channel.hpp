#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "gamediag/conditions.hpp"
#include "gamediag/error.hpp"

namespace gamediag {

enum class ChannelKind { Acuity, ColorAxis, Orientation, Scotopic };
enum class ColorAxis { Protan, Deutan, Tritan };

constexpr std::string_view to_string(ChannelKind kind) noexcept {
  switch (kind) {
    case ChannelKind::Acuity: return "Acuity";
    case ChannelKind::ColorAxis: return "ColorAxis";
    case ChannelKind::Orientation: return "Orientation";
    case ChannelKind::Scotopic: return "Scotopic";
  }
  return "?";
}

constexpr std::string_view to_string(ColorAxis axis) noexcept {
  switch (axis) {
    case ColorAxis::Protan: return "Protan";
    case ColorAxis::Deutan: return "Deutan";
    case ColorAxis::Tritan: return "Tritan";
  }
  return "?";
}

inline ColorAxis color_axis_from_string(std::string_view s) {
  if (s == "Protan") return ColorAxis::Protan;
  if (s == "Deutan") return ColorAxis::Deutan;
  if (s == "Tritan") return ColorAxis::Tritan;
  throw Error(ErrorCode::BadRequest, "unknown color axis '" + std::string(s) + "'");
}

/// Impairment channel a probe targets. `color_axis` is meaningful only for
/// ColorAxis, `axis_deg` only for Orientation (bar orientation, [0, 180)).
struct Channel {
  ChannelKind kind = ChannelKind::Acuity;
  ColorAxis color_axis = ColorAxis::Protan;
  double axis_deg = 0.0;

  static Channel acuity() { return {ChannelKind::Acuity, ColorAxis::Protan, 0.0}; }
  static Channel color(ColorAxis axis) { return {ChannelKind::ColorAxis, axis, 0.0}; }
  static Channel orientation(double axis_deg) {
    if (!(axis_deg >= 0.0 && axis_deg < 180.0)) {
      throw Error(ErrorCode::InvalidIntensity, "orientation axis must lie in [0, 180)");
    }
    return {ChannelKind::Orientation, ColorAxis::Protan, axis_deg};
  }
  static Channel scotopic() { return {ChannelKind::Scotopic, ColorAxis::Protan, 0.0}; }

  std::string name() const {
    switch (kind) {
      case ChannelKind::ColorAxis: return "ColorAxis:" + std::string(to_string(color_axis));
      case ChannelKind::Orientation: {
        std::string deg = std::to_string(axis_deg);
        deg.erase(deg.find_last_not_of('0') + 1);
        if (deg.back() == '.') deg.pop_back();
        return "Orientation:" + deg;
      }
      default: return std::string(to_string(kind));
    }
  }

  auto operator<=>(const Channel&) const = default;
  bool operator==(const Channel&) const = default;
};

/// Channel x condition bin. Acuity is resolved per distance bin because the
/// refraction screen compares distances; every other channel pools distance.
struct ConditionKey {
  Channel channel;
  std::optional<DistanceBin> distance;
  AmbientBin ambient = AmbientBin::Photopic;

  static ConditionKey for_view(const Channel& channel, DistanceBin distance, AmbientBin ambient) {
    if (channel.kind == ChannelKind::Acuity) return {channel, distance, ambient};
    return {channel, std::nullopt, ambient};
  }

  std::string name() const {
    std::string out = channel.name();
    if (distance) out += "|" + std::string(to_string(*distance));
    out += "|" + std::string(to_string(ambient));
    return out;
  }

  auto operator<=>(const ConditionKey&) const = default;
  bool operator==(const ConditionKey&) const = default;
};

}  // namespace gamediag
