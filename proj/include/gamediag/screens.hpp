#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gamediag/channel.hpp"
#include "gamediag/psychometric.hpp"

namespace gamediag {

enum class ScreenKind {
  MyopiaSuspect,
  HyperopiaSuspect,
  AstigmatismSuspect,
  CVDSuspect,
  NyctalopiaSuspect,
  NoFlag,
};

constexpr std::string_view to_string(ScreenKind kind) noexcept {
  switch (kind) {
    case ScreenKind::MyopiaSuspect: return "MyopiaSuspect";
    case ScreenKind::HyperopiaSuspect: return "HyperopiaSuspect";
    case ScreenKind::AstigmatismSuspect: return "AstigmatismSuspect";
    case ScreenKind::CVDSuspect: return "CVDSuspect";
    case ScreenKind::NyctalopiaSuspect: return "NyctalopiaSuspect";
    case ScreenKind::NoFlag: return "NoFlag";
  }
  return "?";
}

struct Evidence {
  std::string label;
  PsychometricFit fit;

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

/// Outcome of one impairment screen. `effect_size` is the magnitude of a
/// statistically supported effect and is 0 when the interval test fails, so
/// NoFlag holds exactly when it is below the screen's flag threshold.
struct ScreenResult {
  std::string screen;
  ScreenKind kind = ScreenKind::NoFlag;
  std::optional<double> axis_deg;
  std::optional<ColorAxis> cvd_type;
  double effect_size = 0.0;
  std::vector<Evidence> evidence;

  bool flagged() const { return kind != ScreenKind::NoFlag; }

  friend bool operator==(const ScreenResult&, const ScreenResult&) = default;
};

struct ScreenThresholds {
  double refraction_ratio = 2.0;
  /// Ratio required when the mean viewing distance points the same way.
  double refraction_supported_ratio = 1.5;
  double myopia_mean_distance_mm = 450.0;
  double hyperopia_mean_distance_mm = 900.0;
  double astigmatism_anisotropy = 1.5;
  int astigmatism_min_axes = 4;
  double cvd_factor = 2.0;
  double nyctalopia_ratio = 2.0;
  /// Population references: median emmetrope fits over 50 simulated
  /// 600-trial sessions on the reference screen (seeds 5000..5049).
  double reference_photopic_acuity_arcmin = 1.12;
  double reference_scotopic_cdm2 = 0.0219;
  int min_trials = 40;
};

struct DistanceStats {
  double mean_mm = 0.0;
  double sd_mm = 0.0;
};

namespace detail {
inline void require_trials(const PsychometricFit& fit, int min_trials, const std::string& what) {
  if (fit.n_trials < min_trials) {
    throw Error(ErrorCode::InsufficientData, what + " fit has " + std::to_string(fit.n_trials) + " trials");
  }
}
}  // namespace detail

/// Two-criteria refraction screen: threshold ratio between the farthest and
/// nearest fitted distance bins, with the mean viewing distance lowering the
/// required ratio when it points the same way.
inline ScreenResult refraction_screen(const std::map<DistanceBin, PsychometricFit>& fits_by_bin,
                                      const DistanceStats& distance, const ScreenThresholds& t = {}) {
  if (fits_by_bin.size() < 2) throw Error(ErrorCode::InsufficientData, "refraction needs >= 2 distance bins");
  const auto& [near_bin, near] = *fits_by_bin.begin();
  const auto& [far_bin, far] = *fits_by_bin.rbegin();
  detail::require_trials(near, t.min_trials, "near");
  detail::require_trials(far, t.min_trials, "far");

  ScreenResult result;
  result.screen = "refraction";
  result.evidence = {{"acuity|" + std::string(to_string(near_bin)), near},
                     {"acuity|" + std::string(to_string(far_bin)), far}};

  const double r_far = far.threshold() / near.threshold();
  const double myopia_needed =
      distance.mean_mm < t.myopia_mean_distance_mm ? t.refraction_supported_ratio : t.refraction_ratio;
  const double hyperopia_needed =
      distance.mean_mm > t.hyperopia_mean_distance_mm ? t.refraction_supported_ratio : t.refraction_ratio;

  const bool far_worse = far.ci_low() > near.ci_high();
  const bool near_worse = near.ci_low() > far.ci_high();
  if (r_far >= myopia_needed && far_worse) {
    result.kind = ScreenKind::MyopiaSuspect;
    result.effect_size = r_far - 1.0;
  } else if (1.0 / r_far >= hyperopia_needed && near_worse) {
    result.kind = ScreenKind::HyperopiaSuspect;
    result.effect_size = 1.0 / r_far - 1.0;
  } else if (far_worse || near_worse) {
    result.effect_size = std::max(r_far, 1.0 / r_far) - 1.0;
  }
  return result;
}

/// Orientation anisotropy of grating contrast thresholds. Reports the bar
/// orientation that is hardest to see.
inline ScreenResult astigmatism_index(const std::map<double, PsychometricFit>& fits_by_axis,
                                      const ScreenThresholds& t = {}) {
  if (static_cast<int>(fits_by_axis.size()) < t.astigmatism_min_axes) {
    throw Error(ErrorCode::InsufficientData, "astigmatism needs >= " + std::to_string(t.astigmatism_min_axes) +
                                                 " orientation axes");
  }
  for (const auto& [axis, fit] : fits_by_axis) {
    detail::require_trials(fit, t.min_trials, "orientation " + std::to_string(axis));
  }
  auto by_threshold = [](const auto& a, const auto& b) { return a.second.threshold() < b.second.threshold(); };
  const auto best = std::min_element(fits_by_axis.begin(), fits_by_axis.end(), by_threshold);
  const auto worst = std::max_element(fits_by_axis.begin(), fits_by_axis.end(), by_threshold);

  ScreenResult result;
  result.screen = "astigmatism";
  result.evidence = {{"orientation|" + Channel::orientation(best->first).name(), best->second},
                     {"orientation|" + Channel::orientation(worst->first).name(), worst->second}};
  const double anisotropy = worst->second.threshold() / best->second.threshold();
  const bool disjoint = worst->second.ci_low() > best->second.ci_high();
  if (disjoint) result.effect_size = anisotropy - 1.0;
  if (anisotropy >= t.astigmatism_anisotropy && disjoint) {
    result.kind = ScreenKind::AstigmatismSuspect;
    result.axis_deg = worst->first;
  }
  return result;
}

inline ScreenResult cvd_classify(const std::map<ColorAxis, PsychometricFit>& fits_by_axis,
                                 const ScreenThresholds& t = {}) {
  for (ColorAxis axis : {ColorAxis::Protan, ColorAxis::Deutan, ColorAxis::Tritan}) {
    auto it = fits_by_axis.find(axis);
    if (it == fits_by_axis.end()) {
      throw Error(ErrorCode::InsufficientData, "no fit for color axis " + std::string(to_string(axis)));
    }
    detail::require_trials(it->second, t.min_trials, std::string(to_string(axis)));
  }

  ScreenResult result;
  result.screen = "color";
  for (const auto& [axis, fit] : fits_by_axis) result.evidence.push_back({"color|" + std::string(to_string(axis)), fit});

  ColorAxis suspect = ColorAxis::Protan;
  double best_factor = 0.0;
  bool best_disjoint = false;
  for (const auto& [axis, fit] : fits_by_axis) {
    std::vector<const PsychometricFit*> others;
    for (const auto& [other_axis, other] : fits_by_axis) {
      if (other_axis != axis) others.push_back(&other);
    }
    const double median_other = (others[0]->threshold() + others[1]->threshold()) / 2.0;
    const double factor = fit.threshold() / median_other;
    if (factor > best_factor) {
      best_factor = factor;
      suspect = axis;
      best_disjoint = fit.ci_low() > others[0]->ci_high() && fit.ci_low() > others[1]->ci_high();
    }
  }
  if (best_disjoint) result.effect_size = std::max(0.0, best_factor - 1.0);
  if (best_factor >= t.cvd_factor && best_disjoint) {
    result.kind = ScreenKind::CVDSuspect;
    result.cvd_type = suspect;
  }
  return result;
}

/// Dark-to-daylight comparison; both thresholds are normalised by their
/// population references before taking the ratio.
inline ScreenResult scotopic_ratio(const std::optional<PsychometricFit>& photopic,
                                   const std::optional<PsychometricFit>& scotopic,
                                   const ScreenThresholds& t = {}) {
  if (!scotopic) throw Error(ErrorCode::InsufficientData, "no scotopic fit (never played in the dark)");
  if (!photopic) throw Error(ErrorCode::InsufficientData, "no photopic fit");
  detail::require_trials(*scotopic, t.min_trials, "scotopic");
  detail::require_trials(*photopic, t.min_trials, "photopic");

  const double s_ref = t.reference_scotopic_cdm2;
  const double p_ref = t.reference_photopic_acuity_arcmin;
  const double ratio = (scotopic->threshold() / s_ref) / (photopic->threshold() / p_ref);
  const bool disjoint = scotopic->ci_low() / s_ref > photopic->ci_high() / p_ref;

  ScreenResult result;
  result.screen = "scotopic";
  result.evidence = {{"photopic", *photopic}, {"scotopic", *scotopic}};
  if (disjoint) result.effect_size = std::max(0.0, ratio - 1.0);
  if (ratio >= t.nyctalopia_ratio && disjoint) result.kind = ScreenKind::NyctalopiaSuspect;
  return result;
}

}  // namespace gamediag
