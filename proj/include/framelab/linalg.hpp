#pragma once

// Small dense linear algebra helpers: summation policy, square matrices,
// and a cyclic Jacobi eigensolver for the symmetric matrices that show up
// here (Gram and frame operators). Dimensions stay tiny, so everything is
// plain row-major storage and O(n^3) is fine.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace framelab {

/// Summation policy used throughout: plain left-to-right accumulation for up
/// to 64 terms (keeps small hand-checked values bit-stable), Kahan
/// compensation beyond that. `term(i)` is evaluated once, in index order.
template <typename TermFn>
double indexed_sum(std::size_t n, TermFn&& term) {
  if (n <= 64) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
  }
  double s = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = term(i) - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: length mismatch");
  return indexed_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

inline double norm2(std::span<const double> a) { return dot(a, a); }

/// Dense n-by-n matrix, row-major.
class SquareMatrix {
 public:
  explicit SquareMatrix(int n)
      : n_(n), data_(n < 1 ? 0 : static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {
    if (n < 1) throw std::invalid_argument("SquareMatrix: size must be >= 1");
  }

  static SquareMatrix identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  int size() const { return n_; }

  double& at(int i, int j) { return data_[idx(i, j)]; }
  double at(int i, int j) const { return data_[idx(i, j)]; }

  std::span<const double> data() const { return data_; }

  double trace() const {
    return indexed_sum(static_cast<std::size_t>(n_),
                       [&](std::size_t i) { return at(static_cast<int>(i), static_cast<int>(i)); });
  }

 private:
  std::size_t idx(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
      throw std::out_of_range("SquareMatrix: index out of range");
    return static_cast<std::size_t>(i) * n_ + j;
  }

  int n_;
  std::vector<double> data_;
};

/// Squared Frobenius norm, i.e. the sum of squared entries.
inline double frobenius_norm2(const SquareMatrix& m) {
  const auto d = m.data();
  return indexed_sum(d.size(), [&](std::size_t i) { return d[i] * d[i]; });
}

inline double frobenius_norm(const SquareMatrix& m) {
  return std::sqrt(frobenius_norm2(m));
}

/// Eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi sweeps.
/// Input is taken by value and destroyed. Symmetry is assumed, not checked
/// (callers only pass Gram/frame operators, symmetric by construction).
inline std::vector<double> symmetric_eigenvalues(SquareMatrix a) {
  const int n = a.size();
  if (n == 1) return {a.at(0, 0)};

  const double scale = std::max(1.0, frobenius_norm(a));
  constexpr int kMaxSweeps = 64;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off2 = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off2 += a.at(p, q) * a.at(p, q);
    if (std::sqrt(2.0 * off2) <= 1e-15 * scale) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // Rotate rows/columns p and q: A <- J^T A J.
        const double app = a.at(p, p);
        const double aqq = a.at(q, q);
        a.at(p, p) = app - t * apq;
        a.at(q, q) = aqq + t * apq;
        a.at(p, q) = 0.0;
        a.at(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a.at(r, p);
          const double arq = a.at(r, q);
          a.at(r, p) = c * arp - s * arq;
          a.at(p, r) = a.at(r, p);
          a.at(r, q) = s * arp + c * arq;
          a.at(q, r) = a.at(r, q);
        }
      }
    }
  }

  std::vector<double> evs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) evs[static_cast<std::size_t>(i)] = a.at(i, i);
  std::sort(evs.begin(), evs.end());
  return evs;
}

/// Numerical rank given eigenvalues of a PSD matrix: count of eigenvalues at
/// or above 1e-10 * max(lambda_max, 1).
inline int rank_from_eigenvalues(const std::vector<double>& ascending) {
  if (ascending.empty()) return 0;
  const double lambda_max = ascending.back();
  const double thresh = 1e-10 * std::max(lambda_max, 1.0);
  int r = 0;
  for (double ev : ascending)
    if (ev >= thresh) ++r;
  return r;
}

}  // namespace framelab
