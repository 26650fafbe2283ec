#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gamediag/error.hpp"

namespace gamediag {

struct StaircaseParams {
  double start = 1.0;
  double min = 0.1;
  double max = 10.0;
  double initial_step_log10 = 0.1;
  /// Number of leading reversals after which the step is halved.
  int halvings = 2;
  /// Consecutive correct answers required for one step down.
  int down = 3;

  void validate() const {
    if (!(min > 0 && min <= start && start <= max)) {
      throw Error(ErrorCode::InvalidIntensity, "staircase needs 0 < min <= start <= max");
    }
    if (!(initial_step_log10 > 0) || down < 1 || halvings < 0) {
      throw Error(ErrorCode::InvalidIntensity, "bad staircase step parameters");
    }
  }
};

/// Transformed up-down staircase in log10 intensity: `down` consecutive
/// correct answers step down, any miss steps up. Converges on the level where
/// P(correct)^down = 0.5 (0.794 for 3-down-1-up).
class Staircase {
 public:
  Staircase() = default;
  explicit Staircase(const StaircaseParams& params)
      : params_(params), intensity_(params.start), step_(params.initial_step_log10) {
    params.validate();
  }

  double intensity() const { return intensity_; }
  double step_log10() const { return step_; }
  int consecutive_correct() const { return consecutive_correct_; }
  const std::vector<double>& reversals() const { return reversals_; }
  const StaircaseParams& params() const { return params_; }

  void update(bool correct) {
    int direction = 0;
    if (correct) {
      if (++consecutive_correct_ >= params_.down) {
        direction = -1;
        consecutive_correct_ = 0;
      }
    } else {
      direction = +1;
      consecutive_correct_ = 0;
    }
    if (direction == 0) return;

    const bool reversal = last_direction_ != 0 && direction != last_direction_;
    if (reversal) reversals_.push_back(intensity_);
    const double next = intensity_ * std::pow(10.0, direction * step_);
    intensity_ = std::clamp(next, params_.min, params_.max);
    last_direction_ = direction;
    // The move that constitutes a reversal uses the old step.
    if (reversal && static_cast<int>(reversals_.size()) <= params_.halvings) step_ /= 2.0;
  }

 private:
  StaircaseParams params_;
  double intensity_ = 1.0;
  double step_ = 0.1;
  int consecutive_correct_ = 0;
  int last_direction_ = 0;
  std::vector<double> reversals_;
};

}  // namespace gamediag
