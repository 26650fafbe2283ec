#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "gamediag/error.hpp"

namespace gamediag {

/// Parameters of P(correct | x) = gamma + (1 - gamma - lambda) * L((log10 x - alpha) * beta).
struct PsychometricParams {
  double alpha = 0.0;
  double beta = 1.0;
  double lambda = 0.0;
};

struct PsychometricFit {
  double threshold_alpha = 0.0;
  double slope_beta = 1.0;
  double guess_gamma = 0.25;
  double lapse_lambda = 0.0;
  std::array<double, 2> ci_alpha{0.0, 0.0};
  int n_trials = 0;
  bool floor_flag = false;
  bool ceiling_flag = false;
  double log_likelihood = 0.0;

  double threshold() const { return std::pow(10.0, threshold_alpha); }
  double ci_low() const { return std::pow(10.0, ci_alpha[0]); }
  double ci_high() const { return std::pow(10.0, ci_alpha[1]); }

  friend bool operator==(const PsychometricFit&, const PsychometricFit&) = default;
};

/// Binomial summary of all trials at one stimulus level.
struct LevelCount {
  double log10_x = 0.0;
  int n = 0;
  int k = 0;
};

struct TrialOutcome {
  double intensity = 0.0;
  bool correct = false;
};

struct FitOptions {
  int min_trials = 40;
  int min_levels = 3;
  double lapse_max = 0.06;
  int bootstrap_samples = 200;
  std::uint64_t bootstrap_seed = 0x5eed;
  double beta_min = 4.0;
  double beta_max = 16.0;
  /// Search range for alpha beyond the tested levels, log10 units.
  double alpha_margin = 1.0;
  int alpha_grid_points = 61;
  std::vector<double> beta_grid{4.0, 5.0, 6.0, 8.0, 10.0, 13.0, 16.0};
  std::vector<double> lambda_grid{0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06};
};

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double psychometric_p(double log10_x, const PsychometricParams& p, double gamma) {
  return gamma + (1.0 - gamma - p.lambda) * logistic((log10_x - p.alpha) * p.beta);
}

/// Aggregates outcomes by intensity (levels closer than 1e-9 log10 units are
/// merged), sorted by level. The result is independent of trial order.
inline std::vector<LevelCount> aggregate_levels(std::span<const TrialOutcome> trials) {
  std::map<long long, std::pair<int, int>> by_level;
  for (const auto& t : trials) {
    if (!(t.intensity > 0)) throw Error(ErrorCode::InvalidIntensity, "trial intensity must be positive");
    auto& [n, k] = by_level[std::llround(std::log10(t.intensity) * 1e9)];
    ++n;
    k += t.correct ? 1 : 0;
  }
  std::vector<LevelCount> out;
  out.reserve(by_level.size());
  for (const auto& [key, nk] : by_level) out.push_back({static_cast<double>(key) * 1e-9, nk.first, nk.second});
  return out;
}

inline double log_likelihood(std::span<const LevelCount> levels, const PsychometricParams& p, double gamma) {
  constexpr double eps = 1e-12;
  double ll = 0.0;
  for (const auto& l : levels) {
    const double prob = std::clamp(psychometric_p(l.log10_x, p, gamma), eps, 1.0 - eps);
    ll += l.k * std::log(prob) + (l.n - l.k) * std::log1p(-prob);
  }
  return ll;
}

namespace detail {

struct Bounds {
  double alpha_lo, alpha_hi, beta_lo, beta_hi, lambda_hi;

  PsychometricParams project(PsychometricParams p) const {
    p.alpha = std::clamp(p.alpha, alpha_lo, alpha_hi);
    p.beta = std::clamp(p.beta, beta_lo, beta_hi);
    p.lambda = std::clamp(p.lambda, 0.0, lambda_hi);
    return p;
  }
};

/// Nelder-Mead over (alpha, ln beta, lambda) with box projection. Never
/// returns a point worse than `start`.
inline std::pair<PsychometricParams, double> refine(std::span<const LevelCount> levels, double gamma,
                                                    PsychometricParams start, const Bounds& bounds,
                                                    int max_evals, std::array<double, 3> scale) {
  using Vec = std::array<double, 3>;
  auto to_params = [&](const Vec& v) {
    return bounds.project({v[0], std::exp(v[1]), v[2]});
  };
  auto cost = [&](const Vec& v) { return -log_likelihood(levels, to_params(v), gamma); };

  std::array<Vec, 4> simplex;
  std::array<double, 4> f;
  simplex[0] = {start.alpha, std::log(start.beta), start.lambda};
  for (int i = 0; i < 3; ++i) {
    simplex[i + 1] = simplex[0];
    simplex[i + 1][i] += scale[i];
  }
  for (int i = 0; i < 4; ++i) f[i] = cost(simplex[i]);
  int evals = 4;

  while (evals < max_evals) {
    std::array<int, 4> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
    const int best = idx[0], worst = idx[3], second = idx[2];
    if (std::abs(f[worst] - f[best]) < 1e-10) break;

    Vec centroid{};
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 3; ++d) centroid[d] += simplex[idx[i]][d] / 3.0;
    auto along = [&](double t) {
      Vec v;
      for (int d = 0; d < 3; ++d) v[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
      return v;
    };

    const Vec reflected = along(-1.0);
    const double fr = cost(reflected);
    ++evals;
    if (fr < f[best]) {
      const Vec expanded = along(-2.0);
      const double fe = cost(expanded);
      ++evals;
      if (fe < fr) {
        simplex[worst] = expanded;
        f[worst] = fe;
      } else {
        simplex[worst] = reflected;
        f[worst] = fr;
      }
    } else if (fr < f[second]) {
      simplex[worst] = reflected;
      f[worst] = fr;
    } else {
      const Vec contracted = fr < f[worst] ? along(-0.5) : along(0.5);
      const double fc = cost(contracted);
      ++evals;
      if (fc < std::min(fr, f[worst])) {
        simplex[worst] = contracted;
        f[worst] = fc;
      } else {
        for (int i = 1; i < 4; ++i) {
          const int j = idx[i];
          for (int d = 0; d < 3; ++d) simplex[j][d] = simplex[best][d] + 0.5 * (simplex[j][d] - simplex[best][d]);
          f[j] = cost(simplex[j]);
          ++evals;
        }
      }
    }
  }

  const int best = static_cast<int>(std::min_element(f.begin(), f.end()) - f.begin());
  PsychometricParams out = to_params(simplex[best]);
  double ll = log_likelihood(levels, out, gamma);
  const double start_ll = log_likelihood(levels, bounds.project(start), gamma);
  if (start_ll > ll) {
    out = bounds.project(start);
    ll = start_ll;
  }
  return {out, ll};
}

inline double percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

}  // namespace detail

/// The alpha grid shared by the optimiser and anyone wanting to check it.
inline std::vector<double> alpha_grid(std::span<const LevelCount> levels, const FitOptions& options) {
  const double lo = levels.front().log10_x - options.alpha_margin;
  const double hi = levels.back().log10_x + options.alpha_margin;
  std::vector<double> grid(options.alpha_grid_points);
  for (int i = 0; i < options.alpha_grid_points; ++i) {
    grid[i] = lo + (hi - lo) * i / (options.alpha_grid_points - 1);
  }
  return grid;
}

/// Maximum-likelihood fit on level-aggregated data: coarse grid over
/// (alpha, beta, lambda), Nelder-Mead refinement from the best grid node, and
/// a parametric bootstrap (binomial draws from the fitted curve at every
/// tested level) for the alpha interval.
inline PsychometricFit fit_psychometric_levels(std::span<const LevelCount> levels, int alternatives,
                                               const FitOptions& options = {}) {
  if (alternatives < 2) throw Error(ErrorCode::InvalidIntensity, "need at least 2 alternatives");
  int n_total = 0;
  for (const auto& l : levels) n_total += l.n;
  if (n_total < options.min_trials) {
    throw Error(ErrorCode::InsufficientData, std::to_string(n_total) + " trials, need " +
                                                 std::to_string(options.min_trials));
  }
  if (static_cast<int>(levels.size()) < options.min_levels) {
    throw Error(ErrorCode::InsufficientData, std::to_string(levels.size()) + " distinct levels, need " +
                                                 std::to_string(options.min_levels));
  }

  const double gamma = 1.0 / alternatives;
  const auto alphas = alpha_grid(levels, options);
  const detail::Bounds bounds{alphas.front(), alphas.back(), options.beta_min, options.beta_max,
                              options.lapse_max};

  PsychometricParams best;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (double a : alphas)
    for (double b : options.beta_grid)
      for (double l : options.lambda_grid) {
        if (l > options.lapse_max || b < options.beta_min || b > options.beta_max) continue;
        const PsychometricParams p{a, b, l};
        const double ll = log_likelihood(levels, p, gamma);
        if (ll > best_ll) {
          best_ll = ll;
          best = p;
        }
      }

  const std::array<double, 3> scale{0.1, 0.3, 0.01};
  auto [mle, mle_ll] = detail::refine(levels, gamma, best, bounds, 600, scale);

  PsychometricFit fit;
  fit.threshold_alpha = mle.alpha;
  fit.slope_beta = mle.beta;
  fit.guess_gamma = gamma;
  fit.lapse_lambda = mle.lambda;
  fit.n_trials = n_total;
  fit.log_likelihood = mle_ll;
  fit.floor_flag = mle.alpha < levels.front().log10_x;
  fit.ceiling_flag = mle.alpha > levels.back().log10_x;

  if (options.bootstrap_samples > 0) {
    std::mt19937_64 rng(options.bootstrap_seed);
    std::vector<LevelCount> resample(levels.begin(), levels.end());
    std::vector<double> model_p;
    for (const auto& l : levels) model_p.push_back(psychometric_p(l.log10_x, mle, gamma));
    std::vector<double> boot_alphas;
    boot_alphas.reserve(options.bootstrap_samples);
    for (int b = 0; b < options.bootstrap_samples; ++b) {
      for (std::size_t i = 0; i < levels.size(); ++i) {
        resample[i].k = std::binomial_distribution<int>(levels[i].n, model_p[i])(rng);
      }
      // Re-seat alpha on the grid before refining so the bootstrap is not
      // trapped near the original optimum.
      PsychometricParams start = mle;
      double start_ll = -std::numeric_limits<double>::infinity();
      for (double a : alphas) {
        const PsychometricParams p{a, mle.beta, mle.lambda};
        const double ll = log_likelihood(resample, p, gamma);
        if (ll > start_ll) {
          start_ll = ll;
          start = p;
        }
      }
      boot_alphas.push_back(detail::refine(resample, gamma, start, bounds, 150, scale).first.alpha);
    }
    fit.ci_alpha = {detail::percentile(boot_alphas, 0.025), detail::percentile(boot_alphas, 0.975)};
  } else {
    fit.ci_alpha = {mle.alpha, mle.alpha};
  }
  fit.ci_alpha[0] = std::min(fit.ci_alpha[0], fit.threshold_alpha);
  fit.ci_alpha[1] = std::max(fit.ci_alpha[1], fit.threshold_alpha);
  return fit;
}

inline PsychometricFit fit_psychometric(std::span<const TrialOutcome> trials, int alternatives,
                                        const FitOptions& options = {}) {
  const auto levels = aggregate_levels(trials);
  return fit_psychometric_levels(levels, alternatives, options);
}

}  // namespace gamediag
