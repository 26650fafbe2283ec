#pragma once

#include <string_view>
#include <utility>

#include "gamediag/geometry.hpp"

namespace gamediag {

enum class DistanceBin { Near, Mid, Far };
enum class AmbientBin { Scotopic, Mesopic, Photopic };

constexpr std::string_view to_string(DistanceBin bin) noexcept {
  switch (bin) {
    case DistanceBin::Near: return "near";
    case DistanceBin::Mid: return "mid";
    case DistanceBin::Far: return "far";
  }
  return "?";
}

constexpr std::string_view to_string(AmbientBin bin) noexcept {
  switch (bin) {
    case AmbientBin::Scotopic: return "scotopic";
    case AmbientBin::Mesopic: return "mesopic";
    case AmbientBin::Photopic: return "photopic";
  }
  return "?";
}

/// Lower edges belong to the upper bin on the distance axis; the scotopic
/// edge is inclusive and the photopic edge is inclusive.
struct BinEdges {
  double near_mid_mm = 450.0;
  double mid_far_mm = 900.0;
  double scotopic_max_lux = 10.0;
  double photopic_min_lux = 100.0;

  DistanceBin distance(double distance_mm) const {
    if (distance_mm < near_mid_mm) return DistanceBin::Near;
    if (distance_mm < mid_far_mm) return DistanceBin::Mid;
    return DistanceBin::Far;
  }

  AmbientBin ambient(double lux) const {
    if (lux <= scotopic_max_lux) return AmbientBin::Scotopic;
    if (lux >= photopic_min_lux) return AmbientBin::Photopic;
    return AmbientBin::Mesopic;
  }
};

inline std::pair<DistanceBin, AmbientBin> bin_view(const ViewingSample& view,
                                                   const BinEdges& edges = {}) {
  return {edges.distance(view.distance_mm), edges.ambient(view.ambient_lux)};
}

}  // namespace gamediag
