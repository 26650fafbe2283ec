#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gamediag/analysis.hpp"
#include "gamediag/serialization.hpp"

namespace gamediag {

struct SeriesPoint {
  std::int64_t timestamp_ms = 0;
  double threshold = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

/// Threshold history of one channel x condition bin, in linear units.
struct EstimateSeries {
  std::string child_id;
  std::string key;
  std::vector<SeriesPoint> points;

  friend bool operator==(const EstimateSeries&, const EstimateSeries&) = default;
};

struct Alert {
  std::string child_id;
  std::string channel;
  std::int64_t t_start = 0;
  std::int64_t t_end = 0;
  double effect_size = 0.0;
  std::string recommendation_text;

  friend bool operator==(const Alert&, const Alert&) = default;
};

struct AlertConfig {
  int window = 4;
  double ratio = 1.5;
};

inline EstimateSeries update_series(EstimateSeries series, const PsychometricFit& fit, std::int64_t timestamp_ms) {
  if (!series.points.empty() && timestamp_ms <= series.points.back().timestamp_ms) {
    throw Error(ErrorCode::OutOfOrder, "timestamp " + std::to_string(timestamp_ms) + " not after " +
                                           std::to_string(series.points.back().timestamp_ms));
  }
  series.points.push_back({timestamp_ms, fit.threshold(), fit.ci_low(), fit.ci_high()});
  return series;
}

namespace detail {

/// Geometric mean of a window and its pooled interval: the mean of the
/// points' log half-widths shrunk by sqrt(window).
struct PooledWindow {
  double log_mean = 0.0;
  double log_low = 0.0;
  double log_high = 0.0;
};

inline PooledWindow pool(std::span<const SeriesPoint> window) {
  const double k = static_cast<double>(window.size());
  double mean = 0.0, below = 0.0, above = 0.0;
  for (const auto& p : window) {
    const double lt = std::log10(p.threshold);
    mean += lt / k;
    below += (lt - std::log10(p.ci_low)) / k;
    above += (std::log10(p.ci_high) - lt) / k;
  }
  const double shrink = std::sqrt(k);
  return {mean, mean - below / shrink, mean + above / shrink};
}

inline std::string format_ratio(double r) {
  std::ostringstream out;
  out.precision(2);
  out << std::fixed << r;
  return out.str();
}

}  // namespace detail

/// Two-window deterioration test on the most recent 2*window points.
/// Improvements never alert.
inline std::optional<Alert> detect_change(const EstimateSeries& series, const AlertConfig& config = {}) {
  const std::size_t w = static_cast<std::size_t>(config.window);
  if (series.points.size() < 2 * w) return std::nullopt;
  const std::span<const SeriesPoint> all(series.points);
  const auto recent = all.last(w);
  const auto previous = all.subspan(all.size() - 2 * w, w);
  const auto last = detail::pool(recent);
  const auto prev = detail::pool(previous);
  const double ratio = std::pow(10.0, last.log_mean - prev.log_mean);
  if (ratio < config.ratio || !(last.log_low > prev.log_high)) return std::nullopt;

  Alert alert;
  alert.child_id = series.child_id;
  alert.channel = series.key;
  alert.t_start = previous.front().timestamp_ms;
  alert.t_end = recent.back().timestamp_ms;
  alert.effect_size = ratio - 1.0;
  alert.recommendation_text = "Recent " + series.key + " thresholds are " + detail::format_ratio(ratio) +
                              "x the earlier level. Consider booking an eye examination.";
  return alert;
}

inline Json to_json(const SeriesPoint& p) {
  return Json{{"timestamp_ms", p.timestamp_ms}, {"threshold", p.threshold}, {"ci", {p.ci_low, p.ci_high}}};
}

inline Json to_json(const Alert& a) {
  return Json{{"v", kSchemaVersion},
              {"child_id", a.child_id},
              {"channel", a.channel},
              {"window", {a.t_start, a.t_end}},
              {"effect_size", a.effect_size},
              {"recommendation_text", a.recommendation_text}};
}

inline bool alert_order(const Alert& a, const Alert& b) {
  return a.t_end != b.t_end ? a.t_end < b.t_end : a.channel < b.channel;
}

struct TrialCounts {
  std::int64_t total = 0;
  std::int64_t fitted = 0;
  std::map<std::string, std::int64_t> by_channel;
};

/// Parent-facing report document. Byte-deterministic in its inputs.
inline Json build_report(const std::string& child_id, const std::map<ConditionKey, EstimateSeries>& series,
                         const Analysis& analysis, std::vector<Alert> alerts, const TrialCounts& counts) {
  Json report{{"v", kSchemaVersion}, {"child_id", child_id}};
  Json by_channel = Json::object();
  for (const auto& [name, n] : counts.by_channel) by_channel[name] = n;
  report["trial_counts"] = Json{{"total", counts.total}, {"fitted", counts.fitted}, {"by_channel", by_channel}};

  std::set<ConditionKey> keys;
  for (const auto& [key, _] : analysis.fits) keys.insert(key);
  for (const auto& [key, _] : series) keys.insert(key);
  Json channels = Json::array();
  for (const auto& key : keys) {
    Json c{{"key", key.name()}, {"channel", to_json(key.channel)}};
    c["distance_bin"] = key.distance ? Json(to_string(*key.distance)) : Json(nullptr);
    c["ambient_bin"] = to_string(key.ambient);
    auto fit = analysis.fits.find(key);
    c["n_trials"] = fit == analysis.fits.end() ? 0 : fit->second.n_trials;
    if (fit != analysis.fits.end() && fit->second.fit) {
      c["latest_fit"] = to_json(*fit->second.fit);
    } else {
      c["latest_fit"] = nullptr;
      if (fit != analysis.fits.end()) c["fit_error"] = fit->second.error;
    }
    Json points = Json::array();
    if (auto s = series.find(key); s != series.end()) {
      for (const auto& p : s->second.points) points.push_back(to_json(p));
    }
    c["series"] = std::move(points);
    channels.push_back(std::move(c));
  }
  report["channels"] = std::move(channels);

  Json screens = Json::array();
  for (const auto& s : analysis.screens) screens.push_back(to_json(s));
  report["screens"] = std::move(screens);
  Json skipped = Json::array();
  for (const auto& s : analysis.skipped) skipped.push_back(Json{{"screen", s.screen}, {"reason", s.reason}});
  report["screens_skipped"] = std::move(skipped);
  report["distance"] = Json{{"mean_mm", analysis.distance.mean_mm}, {"sd_mm", analysis.distance.sd_mm}};

  std::sort(alerts.begin(), alerts.end(), alert_order);
  Json alert_list = Json::array();
  for (const auto& a : alerts) alert_list.push_back(to_json(a));
  report["alerts"] = std::move(alert_list);
  return report;
}

}  // namespace gamediag
