#pragma once

// Frame statistics of a vector system: Gram matrix (pairwise inner products),
// frame operator (sum of outer products), frame potential, spectral frame
// bounds and the relative distance to the nearest tight frame. These are the
// quantities everything else is written against.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "framelab/linalg.hpp"
#include "framelab/vector_system.hpp"

namespace framelab {

/// N-by-N matrix of inner products G[i][j] = <v_i, v_j>.
struct GramMatrix {
  SquareMatrix entries;
};

/// d-by-d operator A = sum_i v_i v_i^T, with its trace and the tight constant
/// trace/d (the multiple of the identity a tight frame's operator equals).
struct FrameOperator {
  SquareMatrix entries;
  double trace = 0.0;
  double tight_constant = 0.0;
};

inline GramMatrix gram_matrix(const VectorSystem& vs) {
  const int n = vs.count();
  SquareMatrix g(n);
  for (int i = 0; i < n; ++i) {
    g.at(i, i) = vs.norm2(i);
    for (int j = i + 1; j < n; ++j) {
      const double gij = dot(vs.vec(i), vs.vec(j));
      g.at(i, j) = gij;
      g.at(j, i) = gij;
    }
  }
  return {std::move(g)};
}

inline FrameOperator frame_operator(const VectorSystem& vs) {
  const int d = vs.dim();
  const int n = vs.count();
  SquareMatrix a(d);
  for (int r = 0; r < d; ++r) {
    for (int c = r; c < d; ++c) {
      const double arc = indexed_sum(static_cast<std::size_t>(n), [&](std::size_t k) {
        const auto v = vs.vec(static_cast<int>(k));
        return v[static_cast<std::size_t>(r)] * v[static_cast<std::size_t>(c)];
      });
      a.at(r, c) = arc;
      a.at(c, r) = arc;
    }
  }
  const double tr = a.trace();
  return {std::move(a), tr, tr / d};
}

/// Frame potential sum_{i,j} <v_i, v_j>^2 over all ordered pairs (diagonal
/// included). Equals the squared Frobenius norm of both the Gram matrix and
/// the frame operator.
inline double frame_potential(const VectorSystem& vs) {
  const int n = vs.count();
  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  return indexed_sum(total, [&](std::size_t flat) {
    const int i = static_cast<int>(flat / static_cast<std::size_t>(n));
    const int j = static_cast<int>(flat % static_cast<std::size_t>(n));
    const double gij = dot(vs.vec(i), vs.vec(j));
    return gij * gij;
  });
}

/// Optimal frame bounds: the extreme eigenvalues (lower, upper) of the frame
/// operator. lower > 0 exactly when the system spans R^d.
inline std::pair<double, double> frame_bounds(const VectorSystem& vs) {
  const auto evs = symmetric_eigenvalues(frame_operator(vs).entries);
  return {evs.front(), evs.back()};
}

/// Whether the system spans R^d, judged by the numerical rank of the frame
/// operator.
inline bool spans_space(const VectorSystem& vs) {
  const auto evs = symmetric_eigenvalues(frame_operator(vs).entries);
  return rank_from_eigenvalues(evs) == vs.dim();
}

/// Relative tightness defect ||A - (tr A / d) I||_F / (tr A / d). Zero exactly
/// for tight frames. Throws for the all-zero system (trace 0).
inline double tightness_defect(const VectorSystem& vs) {
  FrameOperator op = frame_operator(vs);
  if (!(op.tight_constant > 0.0))
    throw std::domain_error("tightness_defect: zero system has no tight constant");
  const int d = op.entries.size();
  SquareMatrix diff = op.entries;
  for (int i = 0; i < d; ++i) diff.at(i, i) -= op.tight_constant;
  return frobenius_norm(diff) / op.tight_constant;
}

}  // namespace framelab
