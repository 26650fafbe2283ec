#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "gamediag/conditions.hpp"
#include "gamediag/staircase.hpp"
#include "gamediag/stimulus.hpp"

namespace gamediag {

enum class Response { Correct, Incorrect, NoResponse };

constexpr std::string_view to_string(Response r) noexcept {
  switch (r) {
    case Response::Correct: return "Correct";
    case Response::Incorrect: return "Incorrect";
    case Response::NoResponse: return "NoResponse";
  }
  return "?";
}

/// One probe outcome; the unit of the append-only event log.
struct TrialRecord {
  std::string trial_id;
  std::string session_id;
  StimulusSpec spec;
  ViewingSample view;
  Response response = Response::NoResponse;
  std::int64_t response_time_ms = 0;
  bool credit_awarded = false;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline std::vector<Channel> default_channels() {
  return {Channel::acuity(),
          Channel::color(ColorAxis::Protan),
          Channel::color(ColorAxis::Deutan),
          Channel::color(ColorAxis::Tritan),
          Channel::orientation(0.0),
          Channel::orientation(45.0),
          Channel::orientation(90.0),
          Channel::orientation(135.0),
          Channel::scotopic()};
}

struct SessionConfig {
  int budget_minigame = 6;
  int budget_integrated = 3;
  std::int64_t budget_window_ms = 60'000;
  int alphabet_size = 4;
  std::vector<Channel> channels = default_channels();
  StaircaseParams acuity{10.0, 0.5, 60.0};
  StaircaseParams color{0.05, 0.002, 1.0};
  StaircaseParams orientation{0.03, 0.001, 1.0};
  StaircaseParams scotopic{0.02, 0.002, 5.0};
  BinEdges bins;
  StimulusConfig stimulus;

  int budget(ProbeMode mode) const {
    return mode == ProbeMode::MiniGame ? budget_minigame : budget_integrated;
  }

  const StaircaseParams& staircase_for(ChannelKind kind) const {
    switch (kind) {
      case ChannelKind::Acuity: return acuity;
      case ChannelKind::ColorAxis: return color;
      case ChannelKind::Orientation: return orientation;
      case ChannelKind::Scotopic: return scotopic;
    }
    return acuity;
  }

  /// Scotopic probes only in the dark; everything else only outside it.
  bool admissible(const Channel& channel, AmbientBin ambient) const {
    return (channel.kind == ChannelKind::Scotopic) == (ambient == AmbientBin::Scotopic);
  }
};

enum class DeferReason { Budget, NoAdmissibleChannel, Infeasible };

constexpr std::string_view to_string(DeferReason r) noexcept {
  switch (r) {
    case DeferReason::Budget: return "Budget";
    case DeferReason::NoAdmissibleChannel: return "NoAdmissibleChannel";
    case DeferReason::Infeasible: return "Infeasible";
  }
  return "?";
}

struct Defer {
  DeferReason reason;
};

using NextTrial = std::variant<StimulusSpec, Defer>;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Covert probe scheduler for one child's play session. Single writer.
class Session {
 public:
  Session(std::string child_id, std::string session_id, ScreenProfile screen, SessionConfig config,
          std::uint64_t rng_seed)
      : child_id_(std::move(child_id)),
        session_id_(std::move(session_id)),
        screen_(screen),
        config_(std::move(config)),
        rng_seed_(rng_seed) {
    screen_.validate();
    config_.scotopic.max = std::min(config_.scotopic.max, screen_.luminance_range());
    config_.scotopic.start = std::min(config_.scotopic.start, config_.scotopic.max);
    config_.scotopic.min = std::min(config_.scotopic.min, config_.scotopic.start);
  }

  const std::string& child_id() const { return child_id_; }
  const std::string& session_id() const { return session_id_; }
  const ScreenProfile& screen() const { return screen_; }
  const SessionConfig& config() const { return config_; }
  const std::vector<TrialRecord>& trials() const { return trials_; }

  /// Probes issued within the budget window ending at `now_ms`.
  int probes_in_window(std::int64_t now_ms) const {
    return static_cast<int>(std::count_if(probe_times_.begin(), probe_times_.end(), [&](std::int64_t t) {
      return t > now_ms - config_.budget_window_ms && t <= now_ms;
    }));
  }

  int trials_in_cell(const ConditionKey& key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }

  /// Staircase for a key, or nullptr when none has been started.
  const Staircase* staircase(const ConditionKey& key) const {
    auto it = staircases_.find(key);
    return it == staircases_.end() ? nullptr : &it->second;
  }

  NextTrial next_trial(const ViewingSample& view, ProbeMode mode) {
    view.validate();
    while (!probe_times_.empty() && probe_times_.front() <= view.timestamp_ms - config_.budget_window_ms) {
      probe_times_.pop_front();
    }
    if (probes_in_window(view.timestamp_ms) >= config_.budget(mode)) return Defer{DeferReason::Budget};

    const auto [dist_bin, amb_bin] = bin_view(view, config_.bins);
    struct Candidate {
      int count;
      std::size_t order;
      ConditionKey key;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < config_.channels.size(); ++i) {
      const Channel& ch = config_.channels[i];
      if (!config_.admissible(ch, amb_bin)) continue;
      const auto key = ConditionKey::for_view(ch, dist_bin, amb_bin);
      candidates.push_back({trials_in_cell(key), i, key});
    }
    if (candidates.empty()) return Defer{DeferReason::NoAdmissibleChannel};
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return a.count != b.count ? a.count < b.count : a.order < b.order;
    });

    for (const auto& c : candidates) {
      const Staircase& sc = staircase_or_create(c.key);
      const std::uint64_t seed = detail::splitmix64(rng_seed_ ^ detail::splitmix64(probes_issued_));
      StimulusSpec spec = make_stimulus(c.key.channel, sc.intensity(), screen_, view, mode,
                                        config_.alphabet_size, seed, config_.stimulus);
      if (!spec.feasible) continue;
      ++probes_issued_;
      probe_times_.push_back(view.timestamp_ms);
      return spec;
    }
    return Defer{DeferReason::Infeasible};
  }

  /// Applies the 3-down-1-up rule to the trial's staircase and appends the
  /// record. NoResponse moves the staircase like a miss. Returns the credit.
  bool record_response(const TrialRecord& trial) {
    if (ids_.contains(trial.trial_id)) {
      throw Error(ErrorCode::DuplicateTrial, "trial '" + trial.trial_id + "' already recorded");
    }
    if (std::find(config_.channels.begin(), config_.channels.end(), trial.spec.channel) ==
        config_.channels.end()) {
      throw Error(ErrorCode::UnknownChannel, "no staircase for channel " + trial.spec.channel.name());
    }
    if (trial.response_time_ms < 0) throw Error(ErrorCode::BadRequest, "negative response time");
    const auto [dist_bin, amb_bin] = bin_view(trial.view, config_.bins);
    const auto key = ConditionKey::for_view(trial.spec.channel, dist_bin, amb_bin);

    TrialRecord stored = trial;
    stored.credit_awarded = trial.response == Response::Correct;
    if (stored.session_id.empty()) stored.session_id = session_id_;
    trials_.reserve(trials_.size() + 1);
    ids_.insert(stored.trial_id);
    staircase_or_create(key).update(stored.credit_awarded);
    ++counts_[key];
    trials_.push_back(std::move(stored));
    return trials_.back().credit_awarded;
  }

 private:
  Staircase& staircase_or_create(const ConditionKey& key) {
    auto it = staircases_.find(key);
    if (it == staircases_.end()) {
      it = staircases_.emplace(key, Staircase(config_.staircase_for(key.channel.kind))).first;
    }
    return it->second;
  }

  std::string child_id_;
  std::string session_id_;
  ScreenProfile screen_;
  SessionConfig config_;
  std::uint64_t rng_seed_;
  std::uint64_t probes_issued_ = 0;
  std::deque<std::int64_t> probe_times_;
  std::map<ConditionKey, Staircase> staircases_;
  std::map<ConditionKey, int> counts_;
  std::unordered_set<std::string> ids_;
  std::vector<TrialRecord> trials_;
};

}  // namespace gamediag
