#pragma once

// Shared fixtures for the unit tests: small closed-form systems and a
// deterministic random-system helper.

#include <cmath>
#include <vector>

#include <framelab/framelab.hpp>

namespace tsup {

// Three unit vectors at 120 degrees; the classic tight frame in the plane.
inline framelab::VectorSystem mercedes() {
  const double s = std::sqrt(3.0) / 2.0;
  return framelab::VectorSystem(2, {1.0, 0.0, -0.5, s, -0.5, -s});
}

// {e1, e2, -e1, -e2}: a tight frame with integer Gram entries.
inline framelab::VectorSystem square_frame() {
  return framelab::VectorSystem(2, {1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0});
}

inline framelab::VectorSystem feasible_random(int d, int n, double c1, double c2,
                                              std::uint64_t seed) {
  framelab::SplitMix64 gen(seed);
  return framelab::random_system(d, n, framelab::NormConstraints(c1, c2, 0.0), gen);
}

// Random rotation via modified Gram-Schmidt on a Gaussian matrix (rows = images
// of the basis vectors).
inline std::vector<std::vector<double>> random_rotation(int d, framelab::SplitMix64& gen) {
  std::vector<std::vector<double>> q(static_cast<std::size_t>(d),
                                     std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& row : q)
    for (auto& x : row) x = gen.next_gaussian();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < i; ++j) {
      double proj = 0.0;
      for (int k = 0; k < d; ++k) proj += q[i][k] * q[j][k];
      for (int k = 0; k < d; ++k) q[i][k] -= proj * q[j][k];
    }
    double n2 = 0.0;
    for (int k = 0; k < d; ++k) n2 += q[i][k] * q[i][k];
    const double inv = 1.0 / std::sqrt(n2);
    for (int k = 0; k < d; ++k) q[i][k] *= inv;
  }
  return q;
}

inline framelab::VectorSystem rotate(const framelab::VectorSystem& vs,
                                     const std::vector<std::vector<double>>& q) {
  const int d = vs.dim();
  framelab::VectorSystem out = vs;
  std::vector<double> w(static_cast<std::size_t>(d));
  for (int i = 0; i < vs.count(); ++i) {
    const auto v = vs.vec(i);
    for (int r = 0; r < d; ++r) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * v[static_cast<std::size_t>(c)];
      w[static_cast<std::size_t>(r)] = s;
    }
    out.set_vec(i, w);
  }
  return out;
}

// Copy with vectors m..N-1 scaled by lambda; unlike simultaneous_scaling this
// helper accepts lambda > 1 (used to form central finite differences).
inline framelab::VectorSystem scale_tail(const framelab::VectorSystem& vs, int m,
                                         double lambda) {
  framelab::VectorSystem out = vs;
  for (int i = m; i < vs.count(); ++i) out.scale_vec(i, lambda);
  return out;
}

}  // namespace tsup
