#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "gamediag/config.hpp"

namespace gamediag {

namespace detail {

inline std::vector<Observation> window_observations(const std::vector<Observation>& all, std::int64_t newest_ms,
                                                    std::int64_t window_ms) {
  std::vector<Observation> out;
  for (const auto& o : all) {
    if (o.timestamp_ms >= newest_ms - window_ms) out.push_back(o);
  }
  return out;
}

}  // namespace detail

/// Derived state of one child, maintained trial by trial as events arrive.
class ChildState {
 public:
  ChildState(std::string child_id, const ServiceConfig& config) : child_id_(std::move(child_id)), config_(&config) {}

  const std::string& child_id() const { return child_id_; }
  const std::vector<TrialRecord>& log() const { return log_; }
  bool contains(const std::string& trial_id) const { return ids_.contains(trial_id); }

  /// Returns false (and changes nothing) for an already-applied trial id.
  bool apply(const TrialRecord& trial) {
    if (ids_.contains(trial.trial_id)) return false;
    ids_.insert(trial.trial_id);
    log_.push_back(trial);
    newest_ms_ = std::max(newest_ms_, trial.view.timestamp_ms);
    ++counts_.total;
    ++counts_.by_channel[trial.spec.channel.name()];

    const auto obs = observe(trial, config_->analysis.bins);
    if (!obs) return true;
    ++counts_.fitted;
    observations_.push_back(*obs);
    auto& block = open_blocks_[obs->key];
    block.push_back({obs->intensity, obs->correct});
    if (static_cast<int>(block.size()) >= config_->series_block_trials) {
      close_block(obs->key, block, obs->timestamp_ms, obs->alternatives);
      block.clear();
    }
    return true;
  }

  Json report() const {
    const auto windowed = detail::window_observations(observations_, newest_ms_, config_->screen_window_ms);
    const Analysis analysis = analyze(windowed, config_->analysis);
    return build_report(child_id_, series_, analysis, alerts_, counts_);
  }

  /// Alerts ending at or after `since_ms`, time-ordered.
  std::vector<Alert> alerts_since(std::int64_t since_ms) const {
    std::vector<Alert> out;
    for (const auto& a : alerts_) {
      if (a.t_end >= since_ms) out.push_back(a);
    }
    std::sort(out.begin(), out.end(), alert_order);
    return out;
  }

  const std::vector<Alert>& alerts() const { return alerts_; }
  const std::map<ConditionKey, EstimateSeries>& series() const { return series_; }

 private:
  void close_block(const ConditionKey& key, const std::vector<TrialOutcome>& block, std::int64_t ts,
                   int alternatives) {
    const KeyFit kf = fit_outcomes(block, alternatives, config_->analysis.fit);
    if (!kf.fit) return;
    auto [it, inserted] = series_.try_emplace(key, EstimateSeries{child_id_, key.name(), {}});
    try {
      it->second = update_series(std::move(it->second), *kf.fit, ts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OutOfOrder) throw;
      return;
    }
    const auto alert = detect_change(it->second, config_->alerts);
    bool& alerting = alerting_[key];
    if (alert && !alerting) alerts_.push_back(*alert);
    alerting = alert.has_value();
  }

  std::string child_id_;
  const ServiceConfig* config_;
  std::unordered_set<std::string> ids_;
  std::vector<TrialRecord> log_;
  std::vector<Observation> observations_;
  std::int64_t newest_ms_ = std::numeric_limits<std::int64_t>::min() / 2;
  TrialCounts counts_;
  std::map<ConditionKey, std::vector<TrialOutcome>> open_blocks_;
  std::map<ConditionKey, EstimateSeries> series_;
  std::map<ConditionKey, bool> alerting_;
  std::vector<Alert> alerts_;
};

/// Rebuilds a child's report from the whole log in one pass, independently
/// of ChildState's incremental bookkeeping.
inline Json replay_report(const std::string& child_id, const std::vector<TrialRecord>& log,
                          const ServiceConfig& config) {
  std::unordered_set<std::string> seen;
  std::vector<TrialRecord> unique;
  for (const auto& t : log) {
    if (seen.insert(t.trial_id).second) unique.push_back(t);
  }

  TrialCounts counts;
  std::int64_t newest = std::numeric_limits<std::int64_t>::min() / 2;
  for (const auto& t : unique) {
    ++counts.total;
    ++counts.by_channel[t.spec.channel.name()];
    newest = std::max(newest, t.view.timestamp_ms);
  }
  const auto observations = observe_all(unique, config.analysis.bins);
  counts.fitted = static_cast<std::int64_t>(observations.size());

  std::map<ConditionKey, std::vector<const Observation*>> by_key;
  for (const auto& o : observations) by_key[o.key].push_back(&o);

  std::map<ConditionKey, EstimateSeries> series;
  std::vector<Alert> alerts;
  const auto block = static_cast<std::size_t>(config.series_block_trials);
  for (const auto& [key, obs] : by_key) {
    EstimateSeries s{child_id, key.name(), {}};
    bool alerting = false;
    bool any_point = false;
    for (std::size_t start = 0; start + block <= obs.size(); start += block) {
      std::vector<TrialOutcome> outcomes;
      for (std::size_t i = start; i < start + block; ++i) outcomes.push_back({obs[i]->intensity, obs[i]->correct});
      const std::int64_t ts = obs[start + block - 1]->timestamp_ms;
      const KeyFit kf = fit_outcomes(outcomes, obs[start]->alternatives, config.analysis.fit);
      if (!kf.fit) continue;
      if (!s.points.empty() && ts <= s.points.back().timestamp_ms) continue;
      s = update_series(std::move(s), *kf.fit, ts);
      any_point = true;
      const auto alert = detect_change(s, config.alerts);
      if (alert && !alerting) alerts.push_back(*alert);
      alerting = alert.has_value();
    }
    if (any_point) series.emplace(key, std::move(s));
  }

  const auto windowed = detail::window_observations(observations, newest, config.screen_window_ms);
  return build_report(child_id, series, analyze(windowed, config.analysis), std::move(alerts), counts);
}

/// Parses a JSON Lines event log. A blank final line is tolerated; any other
/// unparsable line raises ReplayError with its 1-based number.
inline std::vector<TrialRecord> read_log(std::istream& in) {
  std::vector<TrialRecord> out;
  std::string line;
  std::size_t number = 0;
  std::optional<std::size_t> blank_line;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) {
      if (!blank_line) blank_line = number;
      continue;
    }
    if (blank_line) throw ReplayError(*blank_line, "blank line inside log");
    try {
      out.push_back(trial_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw ReplayError(number, e.what());
    } catch (const Error& e) {
      throw ReplayError(number, e.what());
    }
  }
  return out;
}

inline std::string to_jsonl(const std::vector<TrialRecord>& log) {
  std::string out;
  for (const auto& t : log) {
    out += to_json(t).dump();
    out += '\n';
  }
  return out;
}

struct Ack {
  std::string trial_id;
  bool duplicate = false;
};

/// Event-sourced backend: per-child append-only logs plus derived state.
class Service {
 public:
  explicit Service(ServiceConfig config) : config_(std::move(config)) {
    for (const auto& c : config_.children) {
      auto child = std::make_unique<Child>(c.id, config_);
      if (!config_.data_dir.empty()) {
        child->log_path = std::filesystem::path(config_.data_dir) / (c.id + ".jsonl");
        if (std::filesystem::exists(child->log_path)) {
          std::ifstream in(child->log_path);
          for (const auto& t : read_log(in)) {
            child->state.apply(t);
            sessions_.emplace(t.session_id, c.id);
          }
        }
      }
      children_.emplace(c.id, std::move(child));
    }
    if (!config_.data_dir.empty()) std::filesystem::create_directories(config_.data_dir);
  }

  const ServiceConfig& config() const { return config_; }

  bool has_child(const std::string& child_id) const { return children_.contains(child_id); }

  /// Appends the trial exactly once. A session is bound to the child that
  /// first reports it; using it under another child is NotFound.
  Ack ingest_trial(const std::string& child_id, const std::string& session_id, const Json& body) {
    Child& child = find(child_id);
    TrialRecord trial = trial_from_json(body);
    if (!trial.session_id.empty() && trial.session_id != session_id) {
      throw Error(ErrorCode::BadRequest, "session_id in body does not match the URL");
    }
    trial.session_id = session_id;
    {
      std::lock_guard lock(sessions_mutex_);
      auto [it, inserted] = sessions_.emplace(session_id, child_id);
      if (!inserted && it->second != child_id) {
        throw Error(ErrorCode::NotFound, "session '" + session_id + "' not found for child '" + child_id + "'");
      }
    }
    std::lock_guard lock(child.mutex);
    if (child.state.contains(trial.trial_id)) return {trial.trial_id, true};
    if (!child.log_path.empty()) {
      std::ofstream out(child.log_path, std::ios::app);
      out << to_json(trial).dump() << '\n';
      out.flush();
      if (!out) throw std::runtime_error("failed to append to " + child.log_path.string());
    }
    child.state.apply(trial);
    return {trial.trial_id, false};
  }

  Json get_report(const std::string& child_id) const {
    const Child& child = find(child_id);
    std::lock_guard lock(child.mutex);
    return child.state.report();
  }

  std::vector<Alert> get_alerts(const std::string& child_id, std::int64_t since_ms) const {
    const Child& child = find(child_id);
    std::lock_guard lock(child.mutex);
    return child.state.alerts_since(since_ms);
  }

  std::vector<TrialRecord> log(const std::string& child_id) const {
    const Child& child = find(child_id);
    std::lock_guard lock(child.mutex);
    return child.state.log();
  }

 private:
  struct Child {
    Child(const std::string& id, const ServiceConfig& config) : state(id, config) {}
    mutable std::mutex mutex;
    ChildState state;
    std::filesystem::path log_path;
  };

  Child& find(const std::string& child_id) const {
    auto it = children_.find(child_id);
    if (it == children_.end()) throw Error(ErrorCode::NotFound, "unknown child '" + child_id + "'");
    return *it->second;
  }

  ServiceConfig config_;
  std::map<std::string, std::unique_ptr<Child>> children_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::string> sessions_;
};

}  // namespace gamediag
