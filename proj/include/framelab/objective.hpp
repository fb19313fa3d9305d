#pragma once

// The target functionals: per-vector signal-to-interference ratios
// |v_k|^2 / (sigma^2 + sum_{l != k} <v_k, v_l>^2), their minimum over k, and
// the logarithmic objective N*log(1 + min). Also the two norm-scaling
// transformations (single-vector shrink, simultaneous tail scaling) and the
// derivative-sign test that decides when tail scaling helps.
//
// Indices are 0-based throughout the API; serialized reports are 1-based.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "framelab/ext_real.hpp"
#include "framelab/frame_core.hpp"
#include "framelab/linalg.hpp"
#include "framelab/vector_system.hpp"

namespace framelab {

/// Feasible shell for squared norms plus the noise level.
struct NormConstraints {
  double c1;
  double c2;
  double sigma;

  NormConstraints(double c1_, double c2_, double sigma_)
      : c1(c1_), c2(c2_), sigma(sigma_) {
    if (!(std::isfinite(c1) && std::isfinite(c2) && std::isfinite(sigma)))
      throw std::invalid_argument("NormConstraints: parameters must be finite");
    if (!(0.0 < c1 && c1 < c2))
      throw std::invalid_argument("NormConstraints: need 0 < c1 < c2, got c1=" +
                                  std::to_string(c1) + ", c2=" + std::to_string(c2));
    if (sigma < 0.0) throw std::invalid_argument("NormConstraints: sigma must be >= 0");
  }
};

/// Full evaluation of a system at one noise level.
struct RatioReport {
  std::vector<ExtReal> ratios;       // per-vector ratios, +inf possible
  std::vector<double> row_energies;  // E_k = sum_l <v_k, v_l>^2 (l = k included)
  ExtReal min_value;                 // min over ratios
  std::vector<int> argmin_set;       // 0-based indices within 1e-9 relative of the min
  ExtReal objective;                 // N * log1p(min_value)
};

namespace detail {

// Relative slack for membership in the argmin set: exact float equality is
// meaningless for a min over computed ratios.
inline constexpr double kArgminRelTol = 1e-9;

inline void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("sigma must be finite and >= 0");
}

// Ratio from precomputed pieces; throws on the 0/0 corner.
inline ExtReal ratio_from_parts(double norm2_k, double denom, int k) {
  if (denom > 0.0) return ExtReal(norm2_k / denom);
  if (norm2_k > 0.0) return ExtReal::infinity();
  throw std::domain_error("per_vector_ratio: 0/0 at index " + std::to_string(k) +
                          " (zero vector, zero interference, sigma = 0)");
}

}  // namespace detail

/// E_k = sum_{l} <v_k, v_l>^2 over all l including l = k; equals <A v_k, v_k>.
inline double row_energy(const VectorSystem& vs, int k) {
  const int n = vs.count();
  const auto vk = vs.vec(k);  // also validates k
  return indexed_sum(static_cast<std::size_t>(n), [&](std::size_t l) {
    const double g = dot(vk, vs.vec(static_cast<int>(l)));
    return g * g;
  });
}

/// |v_k|^2 / (sigma^2 + sum_{l != k} <v_k, v_l>^2). With sigma = 0 and an
/// interference-free v_k this is +infinity; the 0/0 case throws.
inline ExtReal per_vector_ratio(const VectorSystem& vs, double sigma, int k) {
  detail::check_sigma(sigma);
  const int n = vs.count();
  const auto vk = vs.vec(k);
  const double interference =
      indexed_sum(static_cast<std::size_t>(n), [&](std::size_t l) {
        if (static_cast<int>(l) == k) return 0.0;
        const double g = dot(vk, vs.vec(static_cast<int>(l)));
        return g * g;
      });
  return detail::ratio_from_parts(norm2(vk), sigma * sigma + interference, k);
}

/// Evaluation with a caller-supplied Gram matrix (must belong to vs). The
/// optimizer recomputes Gram matrices every step; this overload lets it share.
inline RatioReport evaluate_with_gram(const VectorSystem& vs, const GramMatrix& gram,
                                      double sigma) {
  detail::check_sigma(sigma);
  const int n = vs.count();
  if (gram.entries.size() != n)
    throw std::invalid_argument("evaluate_with_gram: Gram size mismatch");

  RatioReport rep;
  rep.ratios.reserve(static_cast<std::size_t>(n));
  rep.row_energies.reserve(static_cast<std::size_t>(n));

  for (int k = 0; k < n; ++k) {
    const double energy = indexed_sum(static_cast<std::size_t>(n), [&](std::size_t l) {
      const double g = gram.entries.at(k, static_cast<int>(l));
      return g * g;
    });
    const double interference = indexed_sum(static_cast<std::size_t>(n), [&](std::size_t l) {
      if (static_cast<int>(l) == k) return 0.0;
      const double g = gram.entries.at(k, static_cast<int>(l));
      return g * g;
    });
    rep.row_energies.push_back(energy);
    rep.ratios.push_back(
        detail::ratio_from_parts(gram.entries.at(k, k), sigma * sigma + interference, k));
  }

  rep.min_value = rep.ratios.front();
  for (const ExtReal& r : rep.ratios)
    if (r < rep.min_value) rep.min_value = r;

  if (rep.min_value.is_infinite()) {
    // min is infinite only when every ratio is; all indices are minimal.
    for (int k = 0; k < n; ++k) rep.argmin_set.push_back(k);
    rep.objective = ExtReal::infinity();
  } else {
    const double m = rep.min_value.value();
    const double cutoff = m + std::abs(m) * detail::kArgminRelTol;
    for (int k = 0; k < n; ++k)
      if (rep.ratios[static_cast<std::size_t>(k)].is_finite() &&
          rep.ratios[static_cast<std::size_t>(k)].value() <= cutoff)
        rep.argmin_set.push_back(k);
    rep.objective = ExtReal(static_cast<double>(n) * std::log1p(m));
  }
  return rep;
}

inline RatioReport evaluate(const VectorSystem& vs, double sigma) {
  return evaluate_with_gram(vs, gram_matrix(vs), sigma);
}

/// Copy of vs with v_k replaced by lambda * v_k, lambda in (0, 1].
inline VectorSystem shrink_vector(const VectorSystem& vs, int k, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("shrink_vector: lambda must lie in (0, 1]");
  VectorSystem out = vs;
  out.scale_vec(k, lambda);
  return out;
}

/// Copy of vs with vectors m, m+1, ..., N-1 scaled by lambda in (0, 1]; the
/// first m vectors are fixed. m = N is the identity, m = 0 scales everything.
inline VectorSystem simultaneous_scaling(const VectorSystem& vs, int m, double lambda) {
  const int n = vs.count();
  if (m < 0 || m > n)
    throw std::invalid_argument("simultaneous_scaling: fixed count out of [0, N]");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("simultaneous_scaling: lambda must lie in (0, 1]");
  VectorSystem out = vs;
  for (int i = m; i < n; ++i) out.scale_vec(i, lambda);
  return out;
}

/// Sign of d/dlambda of vector k's ratio at lambda = 1 under simultaneous
/// scaling of the block {m, ..., N-1} containing k: the sign of
/// sigma^2 - sum_{l >= m, l != k} <v_k, v_l>^2.
inline int scaling_derivative_sign(const VectorSystem& vs, int m, int k, double sigma) {
  detail::check_sigma(sigma);
  const int n = vs.count();
  if (m < 0 || m > n)
    throw std::invalid_argument("scaling_derivative_sign: fixed count out of [0, N]");
  if (k < m || k >= n)
    throw std::invalid_argument("scaling_derivative_sign: index " + std::to_string(k) +
                                " is not in the scaled block [" + std::to_string(m) + ", " +
                                std::to_string(n) + ")");
  const auto vk = vs.vec(k);
  const double block_interference =
      indexed_sum(static_cast<std::size_t>(n - m), [&](std::size_t off) {
        const int l = m + static_cast<int>(off);
        if (l == k) return 0.0;
        const double g = dot(vk, vs.vec(l));
        return g * g;
      });
  const double s = sigma * sigma - block_interference;
  if (s > 0.0) return 1;
  if (s < 0.0) return -1;
  return 0;
}

}  // namespace framelab
