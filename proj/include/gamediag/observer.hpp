#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gamediag/psychometric.hpp"
#include "gamediag/session.hpp"

namespace gamediag {

/// Ground-truth deficits of a simulated child.
struct ImpairmentProfile {
  double sphere_d = 0.0;  // negative = myopia
  double cyl_d = 0.0;
  double cyl_axis_deg = 0.0;
  double accommodation_d = 8.0;
  double pupil_photopic_mm = 4.0;
  double pupil_scotopic_mm = 6.0;
  double baseline_acuity_arcmin = 1.0;
  std::optional<ColorAxis> cvd_type;
  double cvd_severity = 0.0;
  double nyctalopia_factor = 1.0;
  double lapse_lambda = 0.02;
  double slope_beta = 8.0;

  void validate() const {
    if (!(cyl_d >= 0)) throw Error(ErrorCode::BadRequest, "cylinder must be >= 0");
    if (!(cyl_axis_deg >= 0 && cyl_axis_deg < 180)) throw Error(ErrorCode::BadRequest, "cylinder axis in [0,180)");
    if (!(cvd_severity >= 0 && cvd_severity <= 1)) throw Error(ErrorCode::BadRequest, "severity in [0,1]");
    if (!(nyctalopia_factor >= 1)) throw Error(ErrorCode::BadRequest, "nyctalopia factor must be >= 1");
    if (!(lapse_lambda >= 0 && lapse_lambda < 1)) throw Error(ErrorCode::BadRequest, "lapse in [0,1)");
    if (!(slope_beta > 0 && baseline_acuity_arcmin > 0)) throw Error(ErrorCode::BadRequest, "slope and acuity > 0");
    if (!(pupil_photopic_mm > 0 && pupil_scotopic_mm > 0)) throw Error(ErrorCode::BadRequest, "pupils > 0");
  }

  friend bool operator==(const ImpairmentProfile&, const ImpairmentProfile&) = default;
};

/// Constants of the simulated optics and behaviour.
struct ObserverModel {
  /// Blur angle per mm of pupil per dioptre: 1e-3 rad in arcmin.
  double blur_arcmin_per_mm_d = 3.44;
  double color_base_contrast = 0.02;
  double color_severity_gain = 9.0;
  double orientation_base_contrast = 0.01;
  double scotopic_base_cdm2 = 0.02;
  double comfort_distance_m = 0.7;
  double comfort_sigma_log10 = 0.15;
  BinEdges bins;
};

/// Uncorrected defocus at viewing distance `distance_m`, in dioptres.
inline double defocus_diopters(const ImpairmentProfile& p, double distance_m) {
  if (!(distance_m > 0)) throw Error(ErrorCode::InvalidGeometry, "distance must be positive");
  const double vergence = 1.0 / distance_m;
  if (p.sphere_d < 0) return std::max(0.0, -p.sphere_d - vergence);
  return std::max(0.0, vergence + p.sphere_d - p.accommodation_d);
}

inline double pupil_mm(const ImpairmentProfile& p, AmbientBin bin) {
  switch (bin) {
    case AmbientBin::Photopic: return p.pupil_photopic_mm;
    case AmbientBin::Scotopic: return p.pupil_scotopic_mm;
    case AmbientBin::Mesopic: return (p.pupil_photopic_mm + p.pupil_scotopic_mm) / 2.0;
  }
  return p.pupil_photopic_mm;
}

/// Threshold of the simulated child in the channel's own intensity units.
///
/// Orientation channels are indexed by bar orientation; the grating's
/// modulation direction is perpendicular to it, so bars parallel to the
/// cylinder axis receive the full cylinder blur.
inline double effective_threshold(const ImpairmentProfile& p, const Channel& channel, const ViewingSample& view,
                                  const ObserverModel& model = {}) {
  view.validate();
  const AmbientBin ambient = model.bins.ambient(view.ambient_lux);
  const double defocus = defocus_diopters(p, view.distance_mm / 1000.0);
  auto blurred_acuity = [&](double effective_defocus) {
    const double blur = model.blur_arcmin_per_mm_d * pupil_mm(p, ambient) * effective_defocus;
    return std::hypot(p.baseline_acuity_arcmin, blur);
  };

  switch (channel.kind) {
    case ChannelKind::Acuity: return blurred_acuity(defocus);
    case ChannelKind::Orientation: {
      const double modulation_deg = channel.axis_deg + 90.0;
      const double s = std::sin((modulation_deg - p.cyl_axis_deg) * std::numbers::pi / 180.0);
      const double theta = blurred_acuity(defocus + p.cyl_d * s * s);
      return model.orientation_base_contrast * theta / p.baseline_acuity_arcmin;
    }
    case ChannelKind::ColorAxis: {
      const bool affected = p.cvd_type && *p.cvd_type == channel.color_axis;
      return model.color_base_contrast * (affected ? 1.0 + model.color_severity_gain * p.cvd_severity : 1.0);
    }
    case ChannelKind::Scotopic: return model.scotopic_base_cdm2 * p.nyctalopia_factor;
  }
  return 0.0;
}

inline double p_correct(const ImpairmentProfile& p, const StimulusSpec& spec, const ViewingSample& view,
                        const ObserverModel& model = {}) {
  const double threshold = effective_threshold(p, spec.channel, view, model);
  const PsychometricParams params{std::log10(threshold), p.slope_beta, p.lapse_lambda};
  return psychometric_p(std::log10(spec.intensity), params, 1.0 / spec.alphabet_size());
}

template <class Rng>
Response respond(const ImpairmentProfile& p, const StimulusSpec& spec, const ViewingSample& view, Rng& rng,
                 const ObserverModel& model = {}) {
  if (!spec.feasible) throw Error(ErrorCode::InfeasibleStimulus, "cannot respond to an infeasible probe");
  const double prob = p_correct(p, spec, view, model);
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < prob ? Response::Correct : Response::Incorrect;
}

/// Comfortable viewing distance in metres: log-normal around the comfort
/// distance, clamped into the zero-defocus zone when one exists.
template <class Rng>
double preferred_distance(const ImpairmentProfile& p, Rng& rng, const ObserverModel& model = {}) {
  const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
  double d = model.comfort_distance_m * std::pow(10.0, model.comfort_sigma_log10 * z);
  if (p.sphere_d < 0) {
    d = std::min(d, 1.0 / -p.sphere_d);
  } else if (p.accommodation_d > p.sphere_d) {
    d = std::max(d, 1.0 / (p.accommodation_d - p.sphere_d));
  }
  return d;
}

/// 27-inch 5K desktop display used by the simulated sessions: fine enough
/// pitch (0.117 mm) that 1 arcmin gaps stay renderable beyond 40 cm.
inline ScreenProfile reference_screen() {
  return ScreenProfile{596.7, 335.7, 5120, 2880, 300.0, 0.3};
}

struct AmbientSegment {
  double fraction = 1.0;
  double lux = 300.0;
};

/// Ambient light over a session, as consecutive fractions of its trials.
struct AmbientSchedule {
  std::vector<AmbientSegment> segments{{0.75, 300.0}, {0.05, 50.0}, {0.20, 3.0}};

  double lux_at(std::size_t trial_index, std::size_t n_trials) const {
    double total = 0.0;
    for (const auto& s : segments) total += s.fraction;
    const double position = (static_cast<double>(trial_index) + 0.5) / static_cast<double>(n_trials) * total;
    double acc = 0.0;
    for (const auto& s : segments) {
      acc += s.fraction;
      if (position < acc) return s.lux;
    }
    return segments.back().lux;
  }
};

struct SimulationOptions {
  std::string child_id = "sim-child";
  std::string session_id = "s1";
  std::int64_t start_time_ms = 1'700'000'000'000;
  /// Gap between consecutive probe opportunities.
  std::int64_t gap_min_ms = 5'000;
  std::int64_t gap_max_ms = 15'000;
  ProbeMode mode = ProbeMode::MiniGame;
  /// Probability that a trial is played from wherever the child happens to
  /// be rather than from the preferred distance.
  double roam_probability = 0.5;
  double roam_min_m = 0.3;
  double roam_max_m = 1.5;
  std::int64_t response_time_ms = 1'200;
  /// Opportunities allowed per requested trial before giving up.
  int max_attempts_per_trial = 20;
  SessionConfig session;
  ObserverModel model;
};

inline std::string make_trial_id(const std::string& session_id, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return session_id + "-" + buf;
}

/// Plays `n_trials` probes against the simulated child and returns the event
/// log. Deterministic in (profile, screen, schedule, seed, options).
inline std::vector<TrialRecord> run_session(const ImpairmentProfile& profile, const ScreenProfile& screen,
                                            int n_trials, const AmbientSchedule& schedule, std::uint64_t seed,
                                            const SimulationOptions& options = {}) {
  if (n_trials < 1) throw Error(ErrorCode::BadRequest, "n_trials must be >= 1");
  profile.validate();
  std::mt19937_64 rng(seed);
  Session session(options.child_id, options.session_id, screen, options.session, detail::splitmix64(seed));
  std::uniform_int_distribution<std::int64_t> gap(options.gap_min_ms, options.gap_max_ms);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::int64_t now = options.start_time_ms;
  const long long max_attempts = static_cast<long long>(n_trials) * options.max_attempts_per_trial;
  for (long long attempt = 0; attempt < max_attempts && session.trials().size() < static_cast<std::size_t>(n_trials);
       ++attempt) {
    now += gap(rng);
    double distance_m = 0.0;
    if (unit(rng) < options.roam_probability) {
      distance_m = options.roam_min_m * std::pow(options.roam_max_m / options.roam_min_m, unit(rng));
    } else {
      distance_m = preferred_distance(profile, rng, options.model);
    }
    const ViewingSample view{distance_m * 1000.0, schedule.lux_at(session.trials().size(), n_trials), now};
    NextTrial next = session.next_trial(view, options.mode);
    if (std::holds_alternative<Defer>(next)) continue;

    TrialRecord trial;
    trial.spec = std::get<StimulusSpec>(std::move(next));
    trial.trial_id = make_trial_id(options.session_id, session.trials().size());
    trial.session_id = options.session_id;
    trial.view = view;
    trial.response = respond(profile, trial.spec, view, rng, options.model);
    trial.response_time_ms = options.response_time_ms;
    session.record_response(trial);
  }
  return session.trials();
}

/// Several sessions, one per day, each with its own profile (for onset
/// scenarios). Session i is named "<prefix><i+1>".
inline std::vector<TrialRecord> run_study(const std::vector<ImpairmentProfile>& profile_per_session,
                                          const ScreenProfile& screen, int trials_per_session,
                                          const AmbientSchedule& schedule, std::uint64_t seed,
                                          SimulationOptions options = {}, const std::string& session_prefix = "s") {
  constexpr std::int64_t kDayMs = 24LL * 3600 * 1000;
  const std::int64_t start = options.start_time_ms;
  std::vector<TrialRecord> log;
  for (std::size_t i = 0; i < profile_per_session.size(); ++i) {
    options.session_id = session_prefix + std::to_string(i + 1);
    options.start_time_ms = start + static_cast<std::int64_t>(i) * kDayMs;
    auto day = run_session(profile_per_session[i], screen, trials_per_session, schedule,
                           detail::splitmix64(seed + 0x1000 * (i + 1)), options);
    log.insert(log.end(), std::make_move_iterator(day.begin()), std::make_move_iterator(day.end()));
  }
  return log;
}

}  // namespace gamediag
