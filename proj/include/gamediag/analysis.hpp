#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gamediag/screens.hpp"
#include "gamediag/session.hpp"

namespace gamediag {

/// A trial reduced to what the estimators need.
struct Observation {
  std::int64_t timestamp_ms = 0;
  ConditionKey key;
  double intensity = 0.0;
  bool correct = false;
  double distance_mm = 0.0;
  int alternatives = 4;
};

struct AnalysisConfig {
  BinEdges bins;
  FitOptions fit;
  ScreenThresholds screens;
};

/// Fit-eligible observation for a trial, or nullopt. NoResponse trials
/// (inattention) and mesopic trials never enter fits.
inline std::optional<Observation> observe(const TrialRecord& t, const BinEdges& bins) {
  if (t.response == Response::NoResponse) return std::nullopt;
  const auto [dist, amb] = bin_view(t.view, bins);
  if (amb == AmbientBin::Mesopic) return std::nullopt;
  return Observation{t.view.timestamp_ms, ConditionKey::for_view(t.spec.channel, dist, amb), t.spec.intensity,
                     t.response == Response::Correct, t.view.distance_mm, t.spec.alphabet_size()};
}

struct KeyFit {
  int n_trials = 0;
  std::optional<PsychometricFit> fit;
  std::string error;
};

struct SkippedScreen {
  std::string screen;
  std::string reason;
};

struct Analysis {
  std::map<ConditionKey, KeyFit> fits;
  std::vector<ScreenResult> screens;
  std::vector<SkippedScreen> skipped;
  DistanceStats distance;
};

inline KeyFit fit_outcomes(std::span<const TrialOutcome> outcomes, int alternatives, const FitOptions& options) {
  KeyFit out;
  out.n_trials = static_cast<int>(outcomes.size());
  try {
    out.fit = fit_psychometric(outcomes, alternatives, options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    out.error = e.what();
  }
  return out;
}

/// Fits every condition bin and runs the four impairment screens.
inline Analysis analyze(std::span<const Observation> observations, const AnalysisConfig& config = {}) {
  Analysis a;
  std::map<ConditionKey, std::vector<TrialOutcome>> by_key;
  std::map<ConditionKey, int> alternatives;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& o : observations) {
    by_key[o.key].push_back({o.intensity, o.correct});
    alternatives[o.key] = o.alternatives;
    sum += o.distance_mm;
    sum_sq += o.distance_mm * o.distance_mm;
  }
  if (!observations.empty()) {
    const double n = static_cast<double>(observations.size());
    a.distance.mean_mm = sum / n;
    a.distance.sd_mm = std::sqrt(std::max(0.0, sum_sq / n - a.distance.mean_mm * a.distance.mean_mm));
  }
  for (const auto& [key, outcomes] : by_key) a.fits[key] = fit_outcomes(outcomes, alternatives[key], config.fit);

  std::map<DistanceBin, PsychometricFit> acuity;
  std::map<double, PsychometricFit> orientation;
  std::map<ColorAxis, PsychometricFit> color;
  std::optional<PsychometricFit> scotopic;
  for (const auto& [key, kf] : a.fits) {
    if (!kf.fit) continue;
    const bool photopic = key.ambient == AmbientBin::Photopic;
    switch (key.channel.kind) {
      case ChannelKind::Acuity:
        if (photopic && key.distance) acuity[*key.distance] = *kf.fit;
        break;
      case ChannelKind::Orientation:
        if (photopic) orientation[key.channel.axis_deg] = *kf.fit;
        break;
      case ChannelKind::ColorAxis:
        if (photopic) color[key.channel.color_axis] = *kf.fit;
        break;
      case ChannelKind::Scotopic:
        if (key.ambient == AmbientBin::Scotopic) scotopic = *kf.fit;
        break;
    }
  }
  // The photopic reference is the child's best daylight acuity: the distance
  // bin whose threshold has the lowest upper confidence bound. Refractive
  // blur at other distances then does not mask a night-vision deficit.
  std::optional<PsychometricFit> photopic;
  for (const auto& [bin, fit] : acuity) {
    if (fit.n_trials < config.screens.min_trials) continue;
    if (!photopic || fit.ci_high() < photopic->ci_high()) photopic = fit;
  }

  auto run = [&](const char* name, auto&& screen) {
    try {
      a.screens.push_back(screen());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData) throw;
      a.skipped.push_back({name, e.what()});
    }
  };
  const auto& t = config.screens;
  run("refraction", [&] { return refraction_screen(acuity, a.distance, t); });
  run("astigmatism", [&] { return astigmatism_index(orientation, t); });
  run("color", [&] { return cvd_classify(color, t); });
  run("scotopic", [&] { return scotopic_ratio(photopic, scotopic, t); });
  return a;
}

inline std::vector<Observation> observe_all(std::span<const TrialRecord> trials, const BinEdges& bins = {}) {
  std::vector<Observation> out;
  out.reserve(trials.size());
  for (const auto& t : trials) {
    if (auto o = observe(t, bins)) out.push_back(*o);
  }
  return out;
}

}  // namespace gamediag
