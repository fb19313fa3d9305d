#pragma once

// Closed-form quantities attached to the max-min ratio problem, each with its
// validity condition made explicit: the sigma = 0 extremal value, the best
// uniform (single-sphere) configuration, the Welch-type coherence lower
// bound, the count bound on vectors with squared norm strictly above c1, and
// the upper bound on the achievable min ratio for sigma > 0.
//
// Convention: c1 and c2 bound SQUARED norms throughout, so "norm gap" terms
// are (c2 - c1).

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "framelab/ext_real.hpp"

namespace framelab {

namespace detail {

inline void check_c1(double c1) {
  if (!(c1 > 0.0) || !std::isfinite(c1))
    throw std::invalid_argument("bounds: c1 must be finite and > 0");
}

}  // namespace detail

/// Best achievable min ratio at sigma = 0: d/(c1(N-d)) for N > d, +infinity
/// for N <= d (pairwise orthogonal systems have empty interference).
inline ExtReal sigma0_extremal_value(int d, int n, double c1) {
  detail::check_c1(c1);
  if (d < 1 || n < 1) throw std::invalid_argument("bounds: need d >= 1, N >= 1");
  if (n <= d) return ExtReal::infinity();
  return ExtReal(d / (c1 * (n - d)));
}

/// N * log(1 + sigma0_extremal_value); +infinity alongside it.
inline ExtReal sigma0_answer(int d, int n, double c1) {
  const ExtReal v = sigma0_extremal_value(d, n, c1);
  if (v.is_infinite()) return ExtReal::infinity();
  return ExtReal(static_cast<double>(n) * std::log1p(v.value()));
}

/// Best uniform configuration (all squared norms equal to one c in [c1,c2]):
/// minimizes f(c) = sigma^2/c + c(N-d)/d, the reciprocal of the common ratio
/// of a tight frame on that sphere.
struct UniformCase {
  double argmin_c = 0.0;          // clamp of c* = sigma*sqrt(d/(N-d)) to [c1, c2]
  double value = 0.0;             // ratio at argmin_c: c/(sigma^2 + c^2 (N-d)/d)
  double answer = 0.0;            // N * log1p(value)
  bool thm_condition_holds = false;  // sigma <= c1 * sqrt((N-d)/d)
};

inline UniformCase uniform_case(int d, int n, double c1, double c2, double sigma) {
  detail::check_c1(c1);
  if (d < 1) throw std::invalid_argument("uniform_case: need d >= 1");
  if (n <= d)
    throw std::invalid_argument("uniform_case: defined only for N > d (got N = " +
                                std::to_string(n) + ", d = " + std::to_string(d) + ")");
  if (!(c2 >= c1) || !std::isfinite(c2))
    throw std::invalid_argument("uniform_case: need c2 >= c1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("uniform_case: sigma must be finite and >= 0");

  const double ratio_nd = static_cast<double>(n - d) / d;
  const double c_star = sigma * std::sqrt(1.0 / ratio_nd);
  UniformCase out;
  out.argmin_c = std::min(std::max(c_star, c1), c2);
  out.value = out.argmin_c / (sigma * sigma + out.argmin_c * out.argmin_c * ratio_nd);
  out.answer = static_cast<double>(n) * std::log1p(out.value);
  out.thm_condition_holds = sigma <= c1 * std::sqrt(ratio_nd);
  return out;
}

/// Lower bound on max_{i != j} <w_i, w_j>^2 over any M vectors in R^d with
/// |w_i|^2 >= c1: c1^2 (M-d) / (d (M-1)). Zero for M = 1 by convention;
/// non-positive (vacuous) for M <= d.
inline double welch_bound(int m, int d, double c1) {
  detail::check_c1(c1);
  if (m < 1 || d < 1) throw std::invalid_argument("welch_bound: need M >= 1, d >= 1");
  if (m == 1) return 0.0;
  return c1 * c1 * static_cast<double>(m - d) / (static_cast<double>(d) * (m - 1));
}

/// Largest integer strictly below x (the count inequality is strict, so an
/// exact integer bound excludes itself). Centralized so the convention is
/// testable in one place.
inline long long strict_integer_below(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("strict_integer_below: non-finite input");
  const double f = std::floor(x);
  if (f == x) return static_cast<long long>(f) - 1;
  return static_cast<long long>(f);
}

/// Bound on how many vectors of an extremal system can have squared norm
/// strictly above c1: d(c1^2 - sigma^2)/(c1^2 - d sigma^2), valid only while
/// c1^2 > d sigma^2. `bound` is the raw formula value (0 when the denominator
/// vanishes exactly); consult `valid` before trusting it.
struct CountBound {
  double bound = 0.0;
  bool valid = false;
  std::optional<long long> max_integer_count;  // strict-integer form, when valid
};

inline CountBound nonminimal_count_bound(int d, double c1, double sigma) {
  detail::check_c1(c1);
  if (d < 1) throw std::invalid_argument("nonminimal_count_bound: need d >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("nonminimal_count_bound: sigma must be finite and >= 0");
  CountBound out;
  const double num = c1 * c1 - sigma * sigma;
  const double den = c1 * c1 - d * sigma * sigma;
  out.valid = den > 0.0;
  out.bound = (den != 0.0) ? d * num / den : 0.0;
  if (out.valid) out.max_integer_count = strict_integer_below(out.bound);
  return out;
}

/// Upper bound on the achievable min ratio for sigma > 0. R_interval is the
/// range the total squared norm R of an extremal system can occupy. When the
/// bounding quotient is decreasing over that range (condition_holds), the
/// closed form at R = N c1 applies; otherwise the quotient is maximized over
/// the interval numerically. mu_bound is absent whenever the bounding
/// denominator fails to stay positive (the inequality is then vacuous).
struct MuBound {
  std::optional<double> mu_bound;
  bool condition_holds = false;
  std::pair<double, double> r_interval{0.0, 0.0};
};

inline MuBound mu_upper_bound(int d, int n, double c1, double c2, double sigma) {
  detail::check_c1(c1);
  if (d < 1) throw std::invalid_argument("mu_upper_bound: need d >= 1");
  if (n <= d) throw std::invalid_argument("mu_upper_bound: defined only for N > d");
  if (!(c2 >= c1) || !std::isfinite(c2))
    throw std::invalid_argument("mu_upper_bound: need c2 >= c1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("mu_upper_bound: sigma must be finite and >= 0");
  const double c1sq = c1 * c1;
  const double sigsq = sigma * sigma;
  if (!(c1sq > d * sigsq))
    throw std::domain_error("mu_upper_bound: requires c1^2 > d sigma^2");

  const double count_factor = (c1sq - sigsq) / (c1sq - d * sigsq);
  const double nd = static_cast<double>(n) * d;

  MuBound out;
  out.r_interval = {n * c1, n * c1 + d * count_factor * (c2 - c1)};

  // Subtrahend of the bounding denominator; (c2 - c1) is the squared-norm gap.
  const double u = static_cast<double>(d) * d * (c2 - c1) * count_factor;
  out.condition_holds =
      static_cast<double>(n) * n * c1sq > nd * (c1sq - sigsq) + u;

  if (out.condition_holds) {
    const double denom = sigsq + c1sq * (n - d) / d - u;
    if (denom > 0.0) out.mu_bound = c1 / denom;
    return out;
  }

  // Quotient of the bounding inequality, summed over k: mu <= h(R) with
  // h(R) = R / (N sigma^2 + R^2/d - N c1^2 - S), S = N*u (so h(N c1) matches
  // the closed form above). Maximize over the R interval: 64-point scan to
  // bracket, then golden-section refinement.
  const double s_term = static_cast<double>(n) * u;
  const auto denom_at = [&](double r) {
    return static_cast<double>(n) * sigsq + r * r / d - static_cast<double>(n) * c1sq - s_term;
  };
  const auto h = [&](double r) { return r / denom_at(r); };

  const double r_lo = out.r_interval.first;
  const double r_hi = out.r_interval.second;
  constexpr int kScan = 64;
  double best_r = r_lo;
  double best_h = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / kScan;
    if (!(denom_at(r) > 0.0)) return out;  // vacuous somewhere: no bound
    const double v = h(r);
    if (v > best_h) {
      best_h = v;
      best_r = r;
    }
  }
  // Golden-section around the best scan point.
  const double span = (r_hi - r_lo) / kScan;
  double a = std::max(r_lo, best_r - span);
  double b = std::min(r_hi, best_r + span);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = h(x1);
  double f2 = h(x2);
  while (b - a > 1e-12 * std::max(1.0, std::abs(b))) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = h(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = h(x1);
    }
  }
  out.mu_bound = std::max(best_h, h(0.5 * (a + b)));
  return out;
}

/// One-call aggregation of every closed form for a parameter set. Fields that
/// require N > d or c1^2 > d sigma^2 are absent when those fail.
struct BoundsReport {
  ExtReal sigma0_value;
  ExtReal sigma0_answer;
  std::optional<double> uniform_argmin_c;
  std::optional<double> uniform_value;
  std::optional<double> uniform_answer;
  bool thm_condition_holds = false;
  double welch_value = 0.0;
  CountBound count;
  std::optional<std::pair<double, double>> r_interval;
  bool mu_condition_holds = false;
  std::optional<double> mu_upper;
};

inline BoundsReport compute_bounds(int d, int n, double c1, double c2, double sigma) {
  BoundsReport rep{sigma0_extremal_value(d, n, c1), sigma0_answer(d, n, c1),
                   {}, {}, {}, false, welch_bound(n, d, c1),
                   nonminimal_count_bound(d, c1, sigma), {}, false, {}};
  if (n > d) {
    const UniformCase u = uniform_case(d, n, c1, c2, sigma);
    rep.uniform_argmin_c = u.argmin_c;
    rep.uniform_value = u.value;
    rep.uniform_answer = u.answer;
    rep.thm_condition_holds = u.thm_condition_holds;
    if (rep.count.valid) {
      const MuBound mu = mu_upper_bound(d, n, c1, c2, sigma);
      rep.r_interval = mu.r_interval;
      rep.mu_condition_holds = mu.condition_holds;
      rep.mu_upper = mu.mu_bound;
    }
  }
  return rep;
}

}  // namespace framelab
