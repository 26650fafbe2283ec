#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gamediag/analysis.hpp"
#include "gamediag/monitor.hpp"
#include "gamediag/serialization.hpp"

namespace gamediag {

struct ChildEntry {
  std::string id;
  std::string name;
  std::vector<ScreenProfile> screens;
};

/// Everything the service reads from its configuration document.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  /// Directory of per-child JSON Lines logs; empty keeps logs in memory only.
  std::string data_dir = "data";
  std::vector<ChildEntry> children;
  SessionConfig session;
  AnalysisConfig analysis;
  AlertConfig alerts;
  /// Trials per channel x bin that make up one point of a threshold series.
  int series_block_trials = 40;
  /// Screens use trials from this long before the newest trial.
  std::int64_t screen_window_ms = 7LL * 24 * 3600 * 1000;

  void set_bins(const BinEdges& bins) {
    session.bins = bins;
    analysis.bins = bins;
    session.stimulus.scotopic_max_lux = bins.scotopic_max_lux;
  }
};

namespace detail {

inline void read_staircase(const Json& j, const char* name, StaircaseParams& p) {
  if (!j.contains(name)) return;
  const Json& s = j[name];
  p.start = number_or(s, "start", p.start);
  p.min = number_or(s, "min", p.min);
  p.max = number_or(s, "max", p.max);
  p.initial_step_log10 = number_or(s, "step_log10", p.initial_step_log10);
  if (s.contains("halvings")) p.halvings = static_cast<int>(integer(s, "halvings"));
  if (s.contains("down")) p.down = static_cast<int>(integer(s, "down"));
  try {
    p.validate();
  } catch (const Error& e) {
    bad(std::string(name) + ": " + e.what());
  }
}

inline Mat3 read_mat3(const Json& j) {
  Mat3 m{};
  if (!j.is_array() || j.size() != 3) bad("expected a 3x3 matrix");
  for (int r = 0; r < 3; ++r) {
    if (!j[r].is_array() || j[r].size() != 3) bad("expected a 3x3 matrix");
    for (int c = 0; c < 3; ++c) m[r][c] = j[r][c].get<double>();
  }
  return m;
}

}  // namespace detail

/// Fields absent from the document keep their defaults.
inline ServiceConfig config_from_json(const Json& j) {
  using namespace detail;
  if (!j.is_object()) bad("config must be an object");
  check_version(j);
  ServiceConfig c;
  if (j.contains("host")) c.host = string(j, "host");
  if (j.contains("port")) c.port = static_cast<int>(integer(j, "port"));
  if (j.contains("data_dir")) c.data_dir = string(j, "data_dir");
  if (j.contains("children")) {
    for (const auto& cj : j["children"]) {
      ChildEntry child;
      child.id = string(cj, "id");
      child.name = cj.contains("name") ? string(cj, "name") : child.id;
      if (cj.contains("screens")) {
        for (const auto& s : cj["screens"]) child.screens.push_back(screen_from_json(s));
      }
      for (const auto& existing : c.children) {
        if (existing.id == child.id) bad("duplicate child id '" + child.id + "'");
      }
      c.children.push_back(std::move(child));
    }
  }
  if (j.contains("session")) {
    const Json& s = j["session"];
    if (s.contains("budget_minigame")) c.session.budget_minigame = static_cast<int>(integer(s, "budget_minigame"));
    if (s.contains("budget_integrated")) c.session.budget_integrated = static_cast<int>(integer(s, "budget_integrated"));
    if (s.contains("budget_window_ms")) c.session.budget_window_ms = integer(s, "budget_window_ms");
    if (s.contains("alphabet_size")) c.session.alphabet_size = static_cast<int>(integer(s, "alphabet_size"));
    if (s.contains("orientation_axes_deg")) {
      std::vector<Channel> channels;
      for (const auto& ch : c.session.channels) {
        if (ch.kind != ChannelKind::Orientation && ch.kind != ChannelKind::Scotopic) channels.push_back(ch);
      }
      for (const auto& a : s["orientation_axes_deg"]) channels.push_back(Channel::orientation(a.get<double>()));
      channels.push_back(Channel::scotopic());
      c.session.channels = std::move(channels);
    }
    if (s.contains("staircases")) {
      const Json& st = s["staircases"];
      read_staircase(st, "acuity", c.session.acuity);
      read_staircase(st, "color", c.session.color);
      read_staircase(st, "orientation", c.session.orientation);
      read_staircase(st, "scotopic", c.session.scotopic);
    }
  }
  if (j.contains("stimulus")) {
    const Json& s = j["stimulus"];
    auto& st = c.session.stimulus;
    st.orientation_cycles_per_degree = number_or(s, "orientation_cycles_per_degree", st.orientation_cycles_per_degree);
    st.orientation_patch_arcmin = number_or(s, "orientation_patch_arcmin", st.orientation_patch_arcmin);
    st.color_patch_arcmin = number_or(s, "color_patch_arcmin", st.color_patch_arcmin);
    st.scotopic_target_arcmin = number_or(s, "scotopic_target_arcmin", st.scotopic_target_arcmin);
    if (s.contains("color")) {
      const Json& col = s["color"];
      if (col.contains("xyz_from_rgb")) st.color.xyz_from_rgb = read_mat3(col["xyz_from_rgb"]);
      if (col.contains("lms_from_xyz")) st.color.lms_from_xyz = read_mat3(col["lms_from_xyz"]);
      if (col.contains("full_scale_contrast")) {
        for (int i = 0; i < 3; ++i) st.color.full_scale_contrast[i] = col["full_scale_contrast"][i].get<double>();
      }
      if (col.contains("background")) {
        for (int i = 0; i < 3; ++i) st.color.background[i] = col["background"][i].get<double>();
      }
    }
  }
  if (j.contains("bins")) {
    const Json& b = j["bins"];
    BinEdges bins;
    bins.near_mid_mm = number_or(b, "near_mid_mm", bins.near_mid_mm);
    bins.mid_far_mm = number_or(b, "mid_far_mm", bins.mid_far_mm);
    bins.scotopic_max_lux = number_or(b, "scotopic_max_lux", bins.scotopic_max_lux);
    bins.photopic_min_lux = number_or(b, "photopic_min_lux", bins.photopic_min_lux);
    c.set_bins(bins);
  }
  if (j.contains("fit")) {
    const Json& f = j["fit"];
    auto& o = c.analysis.fit;
    if (f.contains("min_trials")) o.min_trials = static_cast<int>(integer(f, "min_trials"));
    if (f.contains("bootstrap_samples")) o.bootstrap_samples = static_cast<int>(integer(f, "bootstrap_samples"));
    if (f.contains("bootstrap_seed")) o.bootstrap_seed = static_cast<std::uint64_t>(integer(f, "bootstrap_seed"));
    o.lapse_max = number_or(f, "lapse_max", o.lapse_max);
  }
  if (j.contains("screens")) {
    const Json& s = j["screens"];
    auto& t = c.analysis.screens;
    t.refraction_ratio = number_or(s, "refraction_ratio", t.refraction_ratio);
    t.refraction_supported_ratio = number_or(s, "refraction_supported_ratio", t.refraction_supported_ratio);
    t.myopia_mean_distance_mm = number_or(s, "myopia_mean_distance_mm", t.myopia_mean_distance_mm);
    t.hyperopia_mean_distance_mm = number_or(s, "hyperopia_mean_distance_mm", t.hyperopia_mean_distance_mm);
    t.astigmatism_anisotropy = number_or(s, "astigmatism_anisotropy", t.astigmatism_anisotropy);
    t.cvd_factor = number_or(s, "cvd_factor", t.cvd_factor);
    t.nyctalopia_ratio = number_or(s, "nyctalopia_ratio", t.nyctalopia_ratio);
    t.reference_photopic_acuity_arcmin =
        number_or(s, "reference_photopic_acuity_arcmin", t.reference_photopic_acuity_arcmin);
    t.reference_scotopic_cdm2 = number_or(s, "reference_scotopic_cdm2", t.reference_scotopic_cdm2);
  }
  c.analysis.screens.min_trials = c.analysis.fit.min_trials;
  if (j.contains("alerts")) {
    const Json& a = j["alerts"];
    if (a.contains("window")) c.alerts.window = static_cast<int>(integer(a, "window"));
    c.alerts.ratio = number_or(a, "ratio", c.alerts.ratio);
  }
  if (j.contains("series_block_trials")) c.series_block_trials = static_cast<int>(integer(j, "series_block_trials"));
  if (j.contains("screen_window_ms")) c.screen_window_ms = integer(j, "screen_window_ms");
  return c;
}

}  // namespace gamediag
