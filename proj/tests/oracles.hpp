#pragma once

// Reference computations shared by the unit tests and the acceptance run.
// They deliberately avoid the library's own helpers.

#include <cmath>
#include <vector>

namespace oracle {

struct Level {
  double log10_x;
  int n;
  int k;
};

struct GridResult {
  double alpha;
  double beta;
  double lambda;
  double log_likelihood;
};

/// Bernoulli log-likelihood kernel of a logistic psychometric function.
inline double log_likelihood(const std::vector<Level>& levels, double alpha, double beta, double lambda,
                             double gamma) {
  double ll = 0.0;
  for (const auto& l : levels) {
    const double f = 1.0 / (1.0 + std::exp(-beta * (l.log10_x - alpha)));
    double p = gamma + (1.0 - gamma - lambda) * f;
    p = std::fmin(std::fmax(p, 1e-12), 1.0 - 1e-12);
    ll += l.k * std::log(p) + (l.n - l.k) * std::log(1.0 - p);
  }
  return ll;
}

/// Exhaustive search on a fine lattice: alpha in steps of 0.005 across the
/// tested range plus one log unit each side, beta in [4, 16] by 0.25, lambda
/// in [0, 0.06] by 0.005.
inline GridResult grid_fit(const std::vector<Level>& levels, double gamma) {
  double lo = levels.front().log10_x, hi = levels.front().log10_x;
  for (const auto& l : levels) {
    lo = std::fmin(lo, l.log10_x);
    hi = std::fmax(hi, l.log10_x);
  }
  GridResult best{0.0, 0.0, 0.0, -INFINITY};
  const int na = static_cast<int>(std::ceil((hi - lo + 2.0) / 0.005));
  for (int ia = 0; ia <= na; ++ia) {
    const double a = lo - 1.0 + 0.005 * ia;
    for (int ib = 0; ib <= 48; ++ib) {
      const double b = 4.0 + 0.25 * ib;
      for (int il = 0; il <= 12; ++il) {
        const double l = 0.005 * il;
        const double ll = log_likelihood(levels, a, b, l, gamma);
        if (ll > best.log_likelihood) best = {a, b, l, ll};
      }
    }
  }
  return best;
}

/// Intensity at which a 3-down-1-up staircase converges: P(correct) = 0.5^(1/3).
inline double seventy_nine_percent_point(double alpha, double beta, double gamma, double lambda) {
  const double f = (std::cbrt(0.5) - gamma) / (1.0 - gamma - lambda);
  return alpha + std::log(f / (1.0 - f)) / beta;
}

}  // namespace oracle
