#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "gamediag/observer.hpp"
#include "gamediag/screens.hpp"
#include "gamediag/session.hpp"

namespace gamediag {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { throw Error(ErrorCode::BadRequest, what); }

inline const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) bad("expected an object");
  auto it = j.find(name);
  if (it == j.end()) bad(std::string("missing field '") + name + "'");
  return *it;
}

inline double number(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number()) bad(std::string("field '") + name + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(std::string("field '") + name + "' must be finite");
  return d;
}

inline double number_or(const Json& j, const char* name, double fallback) {
  return j.contains(name) ? number(j, name) : fallback;
}

inline std::int64_t integer(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer()) bad(std::string("field '") + name + "' must be an integer");
  return v.get<std::int64_t>();
}

inline std::string string(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) bad(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

inline bool boolean(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_boolean()) bad(std::string("field '") + name + "' must be a boolean");
  return v.get<bool>();
}

inline void check_version(const Json& j) {
  if (j.contains("v") && j["v"] != kSchemaVersion) bad("unsupported schema version");
}

}  // namespace detail

// --- geometry --------------------------------------------------------------

inline Json to_json(const ScreenProfile& s) {
  return Json{{"width_mm", s.width_mm},   {"height_mm", s.height_mm},
              {"width_px", s.width_px},   {"height_px", s.height_px},
              {"max_luminance_cdm2", s.max_luminance_cdm2},
              {"black_luminance_cdm2", s.black_luminance_cdm2}};
}

inline ScreenProfile screen_from_json(const Json& j) {
  ScreenProfile s;
  s.width_mm = detail::number(j, "width_mm");
  s.height_mm = detail::number(j, "height_mm");
  s.width_px = static_cast<int>(detail::integer(j, "width_px"));
  s.height_px = static_cast<int>(detail::integer(j, "height_px"));
  s.max_luminance_cdm2 = detail::number(j, "max_luminance_cdm2");
  s.black_luminance_cdm2 = detail::number(j, "black_luminance_cdm2");
  try {
    s.validate();
  } catch (const Error& e) {
    detail::bad(e.what());
  }
  return s;
}

inline Json to_json(const ViewingSample& v) {
  return Json{{"distance_mm", v.distance_mm}, {"ambient_lux", v.ambient_lux}, {"timestamp_ms", v.timestamp_ms}};
}

inline ViewingSample view_from_json(const Json& j) {
  ViewingSample v{detail::number(j, "distance_mm"), detail::number(j, "ambient_lux"),
                  detail::integer(j, "timestamp_ms")};
  try {
    v.validate();
  } catch (const Error& e) {
    detail::bad(e.what());
  }
  return v;
}

// --- stimulus --------------------------------------------------------------

inline Json to_json(const Channel& c) {
  Json j{{"kind", to_string(c.kind)}};
  if (c.kind == ChannelKind::ColorAxis) j["axis"] = to_string(c.color_axis);
  if (c.kind == ChannelKind::Orientation) j["axis_deg"] = c.axis_deg;
  return j;
}

inline Channel channel_from_json(const Json& j) {
  const std::string kind = detail::string(j, "kind");
  if (kind == "Acuity") return Channel::acuity();
  if (kind == "Scotopic") return Channel::scotopic();
  if (kind == "ColorAxis") return Channel::color(color_axis_from_string(detail::string(j, "axis")));
  if (kind == "Orientation") {
    const double axis = detail::number(j, "axis_deg");
    if (!(axis >= 0 && axis < 180)) detail::bad("orientation axis must lie in [0, 180)");
    return Channel::orientation(axis);
  }
  detail::bad("unknown channel kind '" + kind + "'");
}

inline Json to_json(const StimulusSpec& s) {
  return Json{{"v", kSchemaVersion},
              {"channel", to_json(s.channel)},
              {"intensity", s.intensity},
              {"target_descriptor", s.target_descriptor},
              {"distractor_descriptors", s.distractor_descriptors},
              {"position_px", {s.position_px[0], s.position_px[1]}},
              {"rendered_size_px", s.rendered_size_px},
              {"mode", to_string(s.mode)},
              {"feasible", s.feasible}};
}

inline StimulusSpec spec_from_json(const Json& j) {
  detail::check_version(j);
  StimulusSpec s;
  s.channel = channel_from_json(detail::field(j, "channel"));
  s.intensity = detail::number(j, "intensity");
  const bool unit_range = s.channel.kind == ChannelKind::ColorAxis || s.channel.kind == ChannelKind::Orientation;
  if (!(s.intensity > 0) || (unit_range && s.intensity > 1.0)) detail::bad("intensity out of channel bounds");
  s.target_descriptor = static_cast<int>(detail::integer(j, "target_descriptor"));
  const Json& distractors = detail::field(j, "distractor_descriptors");
  if (!distractors.is_array() || distractors.empty()) detail::bad("distractor_descriptors must be a non-empty array");
  for (const auto& d : distractors) {
    if (!d.is_number_integer()) detail::bad("distractor descriptors must be integers");
    const int v = d.get<int>();
    if (v == s.target_descriptor) detail::bad("target listed among distractors");
    s.distractor_descriptors.push_back(v);
  }
  const Json& pos = detail::field(j, "position_px");
  if (!pos.is_array() || pos.size() != 2 || !pos[0].is_number() || !pos[1].is_number()) {
    detail::bad("position_px must be [x, y]");
  }
  s.position_px = {pos[0].get<double>(), pos[1].get<double>()};
  s.rendered_size_px = detail::number(j, "rendered_size_px");
  const std::string mode = detail::string(j, "mode");
  if (mode == "MiniGame") s.mode = ProbeMode::MiniGame;
  else if (mode == "Integrated") s.mode = ProbeMode::Integrated;
  else detail::bad("unknown mode '" + mode + "'");
  s.feasible = detail::boolean(j, "feasible");
  return s;
}

// --- session ---------------------------------------------------------------

inline Json to_json(const TrialRecord& t) {
  return Json{{"v", kSchemaVersion},
              {"trial_id", t.trial_id},
              {"session_id", t.session_id},
              {"spec", to_json(t.spec)},
              {"view", to_json(t.view)},
              {"response", to_string(t.response)},
              {"response_time_ms", t.response_time_ms},
              {"credit_awarded", t.credit_awarded}};
}

inline TrialRecord trial_from_json(const Json& j) {
  detail::check_version(j);
  TrialRecord t;
  t.trial_id = detail::string(j, "trial_id");
  if (t.trial_id.empty()) detail::bad("trial_id must not be empty");
  if (j.contains("session_id")) t.session_id = detail::string(j, "session_id");
  t.spec = spec_from_json(detail::field(j, "spec"));
  t.view = view_from_json(detail::field(j, "view"));
  const std::string response = detail::string(j, "response");
  if (response == "Correct") t.response = Response::Correct;
  else if (response == "Incorrect") t.response = Response::Incorrect;
  else if (response == "NoResponse") t.response = Response::NoResponse;
  else detail::bad("unknown response '" + response + "'");
  t.response_time_ms = detail::integer(j, "response_time_ms");
  if (t.response_time_ms < 0) detail::bad("response_time_ms must be >= 0");
  t.credit_awarded = j.contains("credit_awarded") ? detail::boolean(j, "credit_awarded")
                                                  : t.response == Response::Correct;
  return t;
}

// --- psychometrics ---------------------------------------------------------

inline Json to_json(const PsychometricFit& f) {
  return Json{{"v", kSchemaVersion},
              {"threshold_alpha", f.threshold_alpha},
              {"threshold", f.threshold()},
              {"slope_beta", f.slope_beta},
              {"guess_gamma", f.guess_gamma},
              {"lapse_lambda", f.lapse_lambda},
              {"ci_alpha", {f.ci_alpha[0], f.ci_alpha[1]}},
              {"n_trials", f.n_trials},
              {"floor_flag", f.floor_flag},
              {"ceiling_flag", f.ceiling_flag},
              {"log_likelihood", f.log_likelihood}};
}

inline Json to_json(const ScreenResult& r) {
  Json j{{"v", kSchemaVersion}, {"screen", r.screen}, {"kind", to_string(r.kind)}};
  if (r.axis_deg) j["axis_deg"] = *r.axis_deg;
  if (r.cvd_type) j["cvd_type"] = to_string(*r.cvd_type);
  j["effect_size"] = r.effect_size;
  Json evidence = Json::array();
  for (const auto& e : r.evidence) evidence.push_back(Json{{"label", e.label}, {"fit", to_json(e.fit)}});
  j["evidence"] = std::move(evidence);
  return j;
}

// --- observer --------------------------------------------------------------

inline Json to_json(const ImpairmentProfile& p) {
  Json j{{"v", kSchemaVersion},
         {"sphere_S", p.sphere_d},
         {"cyl_C", p.cyl_d},
         {"axis_phi", p.cyl_axis_deg},
         {"accommodation_A", p.accommodation_d},
         {"pupil_photopic_mm", p.pupil_photopic_mm},
         {"pupil_scotopic_mm", p.pupil_scotopic_mm},
         {"baseline_acuity_theta0", p.baseline_acuity_arcmin}};
  j["cvd_type"] = p.cvd_type ? Json(to_string(*p.cvd_type)) : Json("None");
  j["severity"] = p.cvd_severity;
  j["nyctalopia_factor"] = p.nyctalopia_factor;
  j["lapse_lambda"] = p.lapse_lambda;
  j["slope_beta"] = p.slope_beta;
  return j;
}

/// Missing fields take the defaults of a healthy child.
inline ImpairmentProfile profile_from_json(const Json& j) {
  if (!j.is_object()) detail::bad("profile must be an object");
  detail::check_version(j);
  ImpairmentProfile p;
  p.sphere_d = detail::number_or(j, "sphere_S", p.sphere_d);
  p.cyl_d = detail::number_or(j, "cyl_C", p.cyl_d);
  p.cyl_axis_deg = detail::number_or(j, "axis_phi", p.cyl_axis_deg);
  p.accommodation_d = detail::number_or(j, "accommodation_A", p.accommodation_d);
  p.pupil_photopic_mm = detail::number_or(j, "pupil_photopic_mm", p.pupil_photopic_mm);
  p.pupil_scotopic_mm = detail::number_or(j, "pupil_scotopic_mm", p.pupil_scotopic_mm);
  p.baseline_acuity_arcmin = detail::number_or(j, "baseline_acuity_theta0", p.baseline_acuity_arcmin);
  if (j.contains("cvd_type")) {
    const std::string t = detail::string(j, "cvd_type");
    if (t != "None") p.cvd_type = color_axis_from_string(t);
  }
  p.cvd_severity = detail::number_or(j, "severity", p.cvd_severity);
  p.nyctalopia_factor = detail::number_or(j, "nyctalopia_factor", p.nyctalopia_factor);
  p.lapse_lambda = detail::number_or(j, "lapse_lambda", p.lapse_lambda);
  p.slope_beta = detail::number_or(j, "slope_beta", p.slope_beta);
  p.validate();
  return p;
}

}  // namespace gamediag
