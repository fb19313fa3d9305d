#pragma once

// Reference-configuration constructors: seeded random feasible systems,
// orthogonal systems with prescribed norms, and tight frames with all squared
// norms equal to a target c, built by projected gradient descent on the frame
// potential over the product of spheres. For N >= d the only local minimizers
// of the frame potential on that product are tight frames, so descent with
// restarts is a sound constructor; convergence is certified by the tightness
// defect, never assumed.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "framelab/frame_core.hpp"
#include "framelab/linalg.hpp"
#include "framelab/objective.hpp"
#include "framelab/rng.hpp"
#include "framelab/vector_system.hpp"

namespace framelab {

struct BuildRequest {
  int dim = 2;
  int count = 4;
  double target_norm2 = 1.0;           // desired squared norm c per vector
  std::uint64_t seed = 0;
  int max_iters = 20000;               // descent iterations per restart
  double defect_tol = 1e-8;            // required relative tightness defect
};

/// Construction failure, carrying the best defect any restart achieved.
class BuildError : public std::runtime_error {
 public:
  BuildError(double best_defect, int best_restart, int restarts, int max_iters)
      : std::runtime_error("build_untf: no restart reached the defect tolerance (best defect " +
                           std::to_string(best_defect) + " from restart " +
                           std::to_string(best_restart) + " of " + std::to_string(restarts) +
                           ", " + std::to_string(max_iters) + " iterations each)"),
        best_defect_(best_defect),
        best_restart_(best_restart) {}

  double best_defect() const { return best_defect_; }
  int best_restart() const { return best_restart_; }

 private:
  double best_defect_;
  int best_restart_;
};

/// Every vector multiplied by factor > 0; squared norms scale by factor^2,
/// frame potential by factor^4, tightness is preserved.
inline VectorSystem scale_system(const VectorSystem& vs, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw std::invalid_argument("scale_system: factor must be finite and > 0");
  VectorSystem out = vs;
  for (int i = 0; i < out.count(); ++i) out.scale_vec(i, factor);
  return out;
}

/// Feasible point for the constraint shell: uniformly random directions,
/// squared norms uniform in [c1, c2]. Deterministic given the seed. This
/// overload draws from a live generator (restart streams); the seed overload
/// below is the public entry point.
inline VectorSystem random_system(int d, int n, const NormConstraints& cons, SplitMix64& gen) {
  if (d < 1 || n < 1) throw std::invalid_argument("random_system: need d >= 1, N >= 1");
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto dir = gen.next_unit_vector(d);
    const double len = std::sqrt(gen.next_uniform(cons.c1, cons.c2));
    for (double x : dir) flat.push_back(len * x);
  }
  return VectorSystem(d, std::move(flat));
}

inline VectorSystem random_system(int d, int n, const NormConstraints& cons,
                                  std::uint64_t seed) {
  SplitMix64 gen(seed);
  return random_system(d, n, cons, gen);
}

/// Pairwise orthogonal system (scaled standard basis) with prescribed squared
/// norms; only possible for N <= d.
inline VectorSystem orthonormal_system(int d, int n, std::span<const double> norms2) {
  if (d < 1 || n < 1) throw std::invalid_argument("orthonormal_system: need d >= 1, N >= 1");
  if (n > d)
    throw std::invalid_argument("orthonormal_system: cannot place " + std::to_string(n) +
                                " pairwise orthogonal vectors in dimension " + std::to_string(d));
  if (norms2.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("orthonormal_system: need one squared norm per vector");
  std::vector<double> flat(static_cast<std::size_t>(d) * static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    if (!(norms2[static_cast<std::size_t>(i)] > 0.0))
      throw std::invalid_argument("orthonormal_system: squared norms must be > 0");
    flat[static_cast<std::size_t>(i) * d + i] = std::sqrt(norms2[static_cast<std::size_t>(i)]);
  }
  return VectorSystem(d, std::move(flat));
}

namespace detail {

// One descent restart. Returns the achieved defect; the system is left in
// its final renormalized state.
inline double descend_frame_potential(VectorSystem& vs, double c, int max_iters,
                                      double defect_tol) {
  const int d = vs.dim();
  const int n = vs.count();
  // Fixed step 1/(4Nc): the frame-potential Hessian on the sphere product is
  // bounded by ~8*lambda_max(A) <= 8Nc/d, so this step is safely inside the
  // stable range for every d >= 1.
  const double step = 1.0 / (4.0 * n * c);
  const double sqrt_c = std::sqrt(c);

  std::vector<double> av(static_cast<std::size_t>(d));
  double best_defect = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter <= max_iters; ++iter) {
    const FrameOperator op = frame_operator(vs);
    // Relative defect ||A - (tr/d) I|| / (tr/d); tr = Nc > 0 by construction.
    SquareMatrix diff = op.entries;
    for (int i = 0; i < d; ++i) diff.at(i, i) -= op.tight_constant;
    const double defect = frobenius_norm(diff) / op.tight_constant;
    best_defect = std::min(best_defect, defect);
    if (defect <= defect_tol) return defect;
    if (iter == max_iters) break;

    // Gradient of FP at v_k is 4*A*v_k; project out the radial component and
    // step, then renormalize back onto the sphere of radius sqrt(c).
    for (int k = 0; k < n; ++k) {
      const auto vk = vs.vec(k);
      for (int r = 0; r < d; ++r) {
        av[static_cast<std::size_t>(r)] =
            indexed_sum(static_cast<std::size_t>(d), [&](std::size_t cidx) {
              return op.entries.at(r, static_cast<int>(cidx)) * vk[cidx];
            });
      }
      const double radial = dot(std::span<const double>(av), vk) / c;
      std::vector<double> next(static_cast<std::size_t>(d));
      double next_n2 = 0.0;
      for (int r = 0; r < d; ++r) {
        const double grad_t = 4.0 * (av[static_cast<std::size_t>(r)] - radial * vk[static_cast<std::size_t>(r)]);
        next[static_cast<std::size_t>(r)] = vk[static_cast<std::size_t>(r)] - step * grad_t;
        next_n2 += next[static_cast<std::size_t>(r)] * next[static_cast<std::size_t>(r)];
      }
      const double renorm = sqrt_c / std::sqrt(next_n2);
      for (double& x : next) x *= renorm;
      vs.set_vec(k, next);
    }
  }
  return best_defect;
}

inline VectorSystem harmonic_pair_frame(int n, double c) {
  // d = 2 closed form: angles pi*k/N give an exactly tight frame for N >= 2.
  const double sqrt_c = std::sqrt(c);
  std::vector<double> flat;
  flat.reserve(2 * static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double angle = 3.141592653589793238462643383279502884 * k / n;
    flat.push_back(sqrt_c * std::cos(angle));
    flat.push_back(sqrt_c * std::sin(angle));
  }
  return VectorSystem(2, std::move(flat));
}

}  // namespace detail

/// Tight frame with all squared norms exactly c = target_norm2, tightness
/// defect at most defect_tol. Restarts are deterministic streams seed + r;
/// failure after all restarts raises BuildError with the best defect seen.
inline VectorSystem build_untf(const BuildRequest& req) {
  if (req.dim < 1 || req.count < req.dim)
    throw std::invalid_argument("build_untf: need N >= d >= 1");
  if (!(req.target_norm2 > 0.0) || !std::isfinite(req.target_norm2))
    throw std::invalid_argument("build_untf: target squared norm must be finite and > 0");
  if (req.max_iters < 1 || !(req.defect_tol > 0.0))
    throw std::invalid_argument("build_untf: need max_iters >= 1 and defect_tol > 0");

  const double c = req.target_norm2;

  if (req.dim == 2) {
    // Closed-form fast path; must clear the same certificate as descent.
    VectorSystem vs = detail::harmonic_pair_frame(req.count, c);
    if (tightness_defect(vs) <= req.defect_tol) return vs;
  }
  if (req.dim == req.count) {
    // Square case: the scaled standard basis is exactly tight.
    std::vector<double> norms2(static_cast<std::size_t>(req.count), c);
    VectorSystem vs = orthonormal_system(req.dim, req.count, norms2);
    if (tightness_defect(vs) <= req.defect_tol) return vs;
  }

  constexpr int kRestarts = 8;
  double best_defect = std::numeric_limits<double>::infinity();
  int best_restart = 0;

  for (int r = 0; r < kRestarts; ++r) {
    SplitMix64 gen(req.seed + static_cast<std::uint64_t>(r));
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(req.dim) * static_cast<std::size_t>(req.count));
    const double sqrt_c = std::sqrt(c);
    for (int i = 0; i < req.count; ++i)
      for (double x : gen.next_unit_vector(req.dim)) flat.push_back(sqrt_c * x);
    VectorSystem vs(req.dim, std::move(flat));

    const double defect = detail::descend_frame_potential(vs, c, req.max_iters, req.defect_tol);
    if (defect <= req.defect_tol) return vs;
    if (defect < best_defect) {
      best_defect = defect;
      best_restart = r;
    }
  }
  throw BuildError(best_defect, best_restart, kRestarts, req.max_iters);
}

}  // namespace framelab
