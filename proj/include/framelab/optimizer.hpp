#pragma once

// Max-min ratio optimizer. The objective min_k mu_k is nonsmooth exactly at
// the configurations of interest (every vector minimal at the optimum), so
// the ascent runs on the softmin surrogate
//
//   softmin_beta(mu) = -(1/beta) * log sum_k exp(-beta * mu_k)
//
// over an increasing beta schedule, with radial clamping of squared norms to
// [c1, c2] after every step. After the gradient phase each restart applies
// discrete norm moves that the ratio structure justifies directly: shrinking
// a single above-c1 vector toward c1 (never decreases the min at sigma = 0),
// and simultaneous scaling of the whole above-c1 block when every scaled
// vector's derivative sign allows it. Restarts are independent seeded streams
// merged deterministically (best value, ties by lowest restart index).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "framelab/bounds.hpp"
#include "framelab/builder.hpp"
#include "framelab/ext_real.hpp"
#include "framelab/frame_core.hpp"
#include "framelab/linalg.hpp"
#include "framelab/objective.hpp"
#include "framelab/rng.hpp"
#include "framelab/vector_system.hpp"

namespace framelab {

inline std::vector<double> default_beta_schedule() {
  // 8 stages, geometric from 10 to 10^4.
  std::vector<double> betas;
  betas.reserve(8);
  for (int i = 0; i < 8; ++i) betas.push_back(std::pow(10.0, 1.0 + 3.0 * i / 7.0));
  return betas;
}

struct OptimizerConfig {
  int restarts = 16;
  int max_iters = 50000;                 // gradient iterations per restart, all stages
  double step_size = 0.1;                // initial ascent step, adapted per stage
  std::vector<double> softmin_beta_schedule = default_beta_schedule();
  double tolerance = 1e-10;              // relative-improvement stall threshold
  std::uint64_t seed = 0;
  bool enable_shrink_moves = true;
  bool enable_simultaneous_scaling_moves = true;
  int threads = 0;                       // concurrent restarts; 0 = hardware default

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("OptimizerConfig: restarts must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("OptimizerConfig: max_iters must be >= 1");
    if (!(step_size > 0.0)) throw std::invalid_argument("OptimizerConfig: step_size must be > 0");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("OptimizerConfig: tolerance must be >= 0");
    if (softmin_beta_schedule.empty())
      throw std::invalid_argument("OptimizerConfig: beta schedule must be nonempty");
    double prev = 0.0;
    for (double b : softmin_beta_schedule) {
      if (!(b > prev))
        throw std::invalid_argument(
            "OptimizerConfig: beta schedule must be positive and strictly increasing");
      prev = b;
    }
    if (threads < 0) throw std::invalid_argument("OptimizerConfig: threads must be >= 0");
  }
};

struct OptResult {
  VectorSystem best_system;
  RatioReport best_report;
  std::vector<std::pair<int, ExtReal>> history;  // (iteration, exact min) checkpoints
  int restart_index = 0;
  bool converged = false;
  int nonminimal_norm_count = 0;  // vectors with |v_i|^2 > c1 * (1 + 1e-9)
};

namespace detail {

inline constexpr double kNonminimalRelTol = 1e-9;

struct SoftminEval {
  ExtReal value;
  std::vector<double> grad;  // flat N * d, zero when value is infinite
};

// Value and gradient of the softmin surrogate in one pass over the Gram
// matrix. Infinite ratios carry zero weight; their vectors still appear in
// other vectors' interference terms.
inline SoftminEval softmin_eval(const VectorSystem& vs, double sigma, double beta) {
  const int n = vs.count();
  const int d = vs.dim();
  const GramMatrix gram = gram_matrix(vs);

  std::vector<double> mu(static_cast<std::size_t>(n), 0.0);
  std::vector<double> denom(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> finite(static_cast<std::size_t>(n), false);
  double min_finite = std::numeric_limits<double>::infinity();
  bool any_finite = false;

  for (int k = 0; k < n; ++k) {
    const double interference = indexed_sum(static_cast<std::size_t>(n), [&](std::size_t l) {
      if (static_cast<int>(l) == k) return 0.0;
      const double g = gram.entries.at(k, static_cast<int>(l));
      return g * g;
    });
    const double dk = sigma * sigma + interference;
    denom[static_cast<std::size_t>(k)] = dk;
    if (dk > 0.0) {
      finite[static_cast<std::size_t>(k)] = true;
      mu[static_cast<std::size_t>(k)] = gram.entries.at(k, k) / dk;
      min_finite = std::min(min_finite, mu[static_cast<std::size_t>(k)]);
      any_finite = true;
    } else if (!(gram.entries.at(k, k) > 0.0)) {
      throw std::domain_error("softmin: 0/0 ratio at index " + std::to_string(k));
    }
  }

  SoftminEval out{ExtReal::infinity(), std::vector<double>(static_cast<std::size_t>(n) * d, 0.0)};
  if (!any_finite) return out;  // all ratios infinite: at the unimprovable optimum

  // Stable log-sum-exp around the finite minimum; infinite ratios contribute 0.
  double wsum = 0.0;
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    if (!finite[static_cast<std::size_t>(k)]) continue;
    w[static_cast<std::size_t>(k)] = std::exp(-beta * (mu[static_cast<std::size_t>(k)] - min_finite));
    wsum += w[static_cast<std::size_t>(k)];
  }
  out.value = ExtReal(min_finite - std::log(wsum) / beta);

  // grad over v_j: 2 t_j v_j - 2 sum_{l != j} G_jl (a_j + a_l) v_l, where
  // t_j = w_j / D_j and a_j = t_j * mu_j (both zero for infinite ratios).
  std::vector<double> t(static_cast<std::size_t>(n), 0.0);
  std::vector<double> a(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    if (!finite[static_cast<std::size_t>(k)]) continue;
    t[static_cast<std::size_t>(k)] =
        (w[static_cast<std::size_t>(k)] / wsum) / denom[static_cast<std::size_t>(k)];
    a[static_cast<std::size_t>(k)] = t[static_cast<std::size_t>(k)] * mu[static_cast<std::size_t>(k)];
  }
  for (int j = 0; j < n; ++j) {
    double* gj = out.grad.data() + static_cast<std::size_t>(j) * d;
    for (int l = 0; l < n; ++l) {
      const double coeff =
          (l == j) ? 2.0 * t[static_cast<std::size_t>(j)]
                   : -2.0 * gram.entries.at(j, l) *
                         (a[static_cast<std::size_t>(j)] + a[static_cast<std::size_t>(l)]);
      if (coeff == 0.0) continue;
      const auto vl = vs.vec(l);
      for (int r = 0; r < d; ++r) gj[r] += coeff * vl[static_cast<std::size_t>(r)];
    }
  }
  return out;
}

// Radial projection of every squared norm into [c1, c2] (exact projection
// onto the product of annuli).
inline void clamp_to_shell(VectorSystem& vs, double c1, double c2) {
  const int n = vs.count();
  for (int i = 0; i < n; ++i) {
    const double n2 = vs.norm2(i);
    if (n2 > c2) {
      vs.scale_vec(i, std::sqrt(c2 / n2));
    } else if (n2 < c1) {
      if (n2 <= 0.0) {
        // A zero vector cannot be scaled out; point it along a basis axis.
        std::vector<double> e(static_cast<std::size_t>(vs.dim()), 0.0);
        e[static_cast<std::size_t>(i % vs.dim())] = std::sqrt(c1);
        vs.set_vec(i, e);
      } else {
        vs.scale_vec(i, std::sqrt(c1 / n2));
      }
    }
  }
}

struct RestartOutcome {
  VectorSystem system;
  RatioReport report;
  std::vector<std::pair<int, ExtReal>> history;
  bool converged = false;
};

// Exact-min snapshot tracking: the softmin surrogate (especially at the last,
// sharpest beta) can trade the true min down while improving its own value,
// so the restart keeps the best state seen at checkpoint boundaries.
struct Snapshot {
  VectorSystem system;
  ExtReal min_value;
  int iteration = 0;
};

inline RestartOutcome run_restart(int d, int n, const NormConstraints& cons,
                                  const OptimizerConfig& cfg, int restart_index) {
  SplitMix64 gen(cfg.seed + static_cast<std::uint64_t>(restart_index));

  // Restart 0 is a structured warm start: the tight frame scaled onto the
  // best uniform sphere (closed-form argmin). Everything else starts random.
  std::optional<VectorSystem> start;
  if (restart_index == 0 && n >= d) {
    try {
      BuildRequest req;
      req.dim = d;
      req.count = n;
      req.target_norm2 = 1.0;
      req.seed = cfg.seed;
      VectorSystem untf = build_untf(req);
      const double c = (n > d) ? uniform_case(d, n, cons.c1, cons.c2, cons.sigma).argmin_c
                               : cons.c1;
      start = scale_system(untf, std::sqrt(c));
    } catch (const BuildError&) {
      // Fall through to a random start.
    }
  }
  VectorSystem vs = start ? std::move(*start) : random_system(d, n, cons, gen);

  const double sigma = cons.sigma;
  Snapshot best{vs, evaluate(vs, sigma).min_value, 0};

  const int stages = static_cast<int>(cfg.softmin_beta_schedule.size());
  const int stage_budget = std::max(cfg.max_iters / stages, 1);
  int iter = 0;
  bool jitter_used = false;
  bool converged = false;

  for (int s = 0; s < stages; ++s) {
    const double beta = cfg.softmin_beta_schedule[static_cast<std::size_t>(s)];
    double step = cfg.step_size;
    SoftminEval cur = softmin_eval(vs, sigma, beta);
    if (cur.value.is_infinite()) {
      converged = true;  // all ratios infinite: nothing to ascend
      break;
    }
    int stall = 0;
    bool stage_done = false;

    for (int it = 0; it < stage_budget && !stage_done; ++it) {
      ++iter;
      const double gnorm2 = indexed_sum(cur.grad.size(), [&](std::size_t i) {
        return cur.grad[i] * cur.grad[i];
      });
      const double gfloor = 1e-14 * std::max(1.0, std::abs(cur.value.value()));
      if (gnorm2 <= gfloor * gfloor) {
        if (!jitter_used) {
          // Stationary point (possibly a saddle): one seeded jitter.
          jitter_used = true;
          auto& coords = vs.mutable_coords();
          const double amp = 1e-8 * std::sqrt(cons.c1);
          for (double& x : coords) x += amp * gen.next_gaussian();
          clamp_to_shell(vs, cons.c1, cons.c2);
          cur = softmin_eval(vs, sigma, beta);
          if (cur.value.is_infinite()) {
            converged = true;
            stage_done = true;
          }
          continue;
        }
        converged = true;
        stage_done = true;
        continue;
      }

      VectorSystem cand = vs;
      {
        auto& coords = cand.mutable_coords();
        for (std::size_t i = 0; i < coords.size(); ++i) coords[i] += step * cur.grad[i];
      }
      clamp_to_shell(cand, cons.c1, cons.c2);
      const SoftminEval cand_eval = softmin_eval(cand, sigma, beta);

      const bool improved =
          cand_eval.value.is_infinite() ||
          (cur.value.is_finite() && cand_eval.value.value() > cur.value.value());
      if (improved) {
        vs = std::move(cand);
        if (cand_eval.value.is_infinite()) {
          converged = true;
          stage_done = true;
          cur = cand_eval;
          continue;
        }
        const double rel = (cand_eval.value.value() - cur.value.value()) /
                           std::max(1.0, std::abs(cand_eval.value.value()));
        cur = cand_eval;
        step = std::min(step * 1.3, 1e6);
        if (rel < cfg.tolerance) {
          if (++stall >= 50) {
            converged = true;
            stage_done = true;
          }
        } else {
          stall = 0;
        }
      } else {
        step *= 0.5;
        if (step < 1e-18) {
          converged = true;  // no ascent direction at any usable step
          stage_done = true;
        }
      }
    }

    const ExtReal stage_min = evaluate(vs, sigma).min_value;
    if (best.min_value < stage_min) best = Snapshot{vs, stage_min, iter};
    if (cur.value.is_infinite()) break;
  }

  // Discrete phase from the best exact-min state. Acceptance: strict
  // improvement beyond tolerance, or non-decrease with strictly lower total
  // squared norm R (every move here shrinks norms, so R always drops).
  vs = best.system;
  ExtReal cur_min = best.min_value;

  RestartOutcome out{vs, {}, {}, converged};
  out.history.emplace_back(best.iteration, cur_min);

  const auto accepts = [&](const ExtReal& cand_min) {
    if (cand_min.is_infinite()) return true;
    if (cur_min.is_infinite()) return false;
    return cand_min.value() >= cur_min.value();
  };

  constexpr int kMaxPasses = 64;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool moved = false;

    if (cfg.enable_shrink_moves) {
      for (int i = 0; i < n; ++i) {
        const double n2 = vs.norm2(i);
        if (n2 <= cons.c1 * (1.0 + 1e-12)) continue;
        VectorSystem cand = shrink_vector(vs, i, std::sqrt(cons.c1 / n2));
        const ExtReal cand_min = evaluate(cand, sigma).min_value;
        if (accepts(cand_min)) {
          vs = std::move(cand);
          cur_min = cand_min;
          out.history.emplace_back(++iter, cur_min);
          moved = true;
        }
      }
    }

    if (cfg.enable_simultaneous_scaling_moves) {
      std::vector<int> block;
      for (int i = 0; i < n; ++i)
        if (vs.norm2(i) > cons.c1 * (1.0 + kNonminimalRelTol)) block.push_back(i);
      if (!block.empty()) {
        bool scalable = true;
        for (int k : block) {
          const double block_interference =
              indexed_sum(block.size(), [&](std::size_t bi) {
                const int l = block[bi];
                if (l == k) return 0.0;
                const double g = dot(vs.vec(k), vs.vec(l));
                return g * g;
              });
          if (sigma * sigma - block_interference > 0.0) {
            scalable = false;
            break;
          }
        }
        if (scalable) {
          double min_n2 = std::numeric_limits<double>::infinity();
          for (int k : block) min_n2 = std::min(min_n2, vs.norm2(k));
          const double lambda_floor = std::sqrt(cons.c1 / min_n2);
          // Aggressive first (all the way to the c1 shell), then timid.
          for (double lambda = lambda_floor; lambda < 1.0;
               lambda = std::sqrt(lambda)) {
            VectorSystem cand = vs;
            for (int k : block) cand.scale_vec(k, lambda);
            const ExtReal cand_min = evaluate(cand, sigma).min_value;
            if (accepts(cand_min)) {
              vs = std::move(cand);
              cur_min = cand_min;
              out.history.emplace_back(++iter, cur_min);
              moved = true;
              break;
            }
            if (1.0 - lambda < 1e-6) break;
          }
        }
      }
    }

    if (!moved) break;
  }

  out.system = std::move(vs);
  out.report = evaluate(out.system, sigma);
  return out;
}

inline int count_nonminimal(const VectorSystem& vs, double c1) {
  int count = 0;
  for (int i = 0; i < vs.count(); ++i)
    if (vs.norm2(i) > c1 * (1.0 + kNonminimalRelTol)) ++count;
  return count;
}

}  // namespace detail

/// Public softmin surrogate value (for tests and diagnostics).
inline ExtReal softmin_value(const VectorSystem& vs, double sigma, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("softmin: beta must be > 0");
  return detail::softmin_eval(vs, sigma, beta).value;
}

/// Analytic gradient of the softmin surrogate, flat row-major N*d.
inline std::vector<double> softmin_gradient(const VectorSystem& vs, double sigma, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("softmin: beta must be > 0");
  return detail::softmin_eval(vs, sigma, beta).grad;
}

/// Maximize min_k mu_k over the shell c1 <= |v_i|^2 <= c2. Restarts run on
/// independent seeded streams (optionally concurrent; identical results
/// either way) and merge to the best min, ties to the lowest restart index.
inline OptResult optimize(int d, int n, const NormConstraints& cons, const OptimizerConfig& cfg) {
  if (d < 1 || n < 1) throw std::invalid_argument("optimize: need d >= 1, N >= 1");
  cfg.validate();

  if (n <= d) {
    // Orthogonal systems are exactly optimal: interference vanishes, each
    // ratio is |v_k|^2 / sigma^2 (or +infinity at sigma = 0). Norms then
    // maximize (sigma > 0) or rest at the low shell (sigma = 0, already
    // infinite, prefer smaller total norm).
    const double c = cons.sigma > 0.0 ? cons.c2 : cons.c1;
    std::vector<double> norms2(static_cast<std::size_t>(n), c);
    VectorSystem vs = orthonormal_system(d, n, norms2);
    OptResult res{std::move(vs), {}, {}, 0, true, 0};
    res.best_report = evaluate(res.best_system, cons.sigma);
    res.history.emplace_back(0, res.best_report.min_value);
    res.nonminimal_norm_count = detail::count_nonminimal(res.best_system, cons.c1);
    return res;
  }

  const int restarts = cfg.restarts;
  std::vector<std::optional<detail::RestartOutcome>> outcomes(
      static_cast<std::size_t>(restarts));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(restarts));

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const int threads = std::min(restarts, cfg.threads > 0 ? cfg.threads : static_cast<int>(hw));

  const auto worker = [&](int first) {
    for (int r = first; r < restarts; r += threads) {
      try {
        outcomes[static_cast<std::size_t>(r)] = detail::run_restart(d, n, cons, cfg, r);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };

  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  for (int r = 0; r < restarts; ++r)
    if (errors[static_cast<std::size_t>(r)]) std::rethrow_exception(errors[static_cast<std::size_t>(r)]);

  int best = 0;
  for (int r = 1; r < restarts; ++r) {
    if (outcomes[static_cast<std::size_t>(best)]->report.min_value <
        outcomes[static_cast<std::size_t>(r)]->report.min_value)
      best = r;
  }

  detail::RestartOutcome& win = *outcomes[static_cast<std::size_t>(best)];
  OptResult res{std::move(win.system), std::move(win.report), std::move(win.history),
                best, win.converged, 0};
  res.nonminimal_norm_count = detail::count_nonminimal(res.best_system, cons.c1);
  return res;
}

/// Comparison of an achieved configuration against every applicable closed
/// form. Optional fields are absent when their precondition (N > d, validity
/// of the count bound, at least two above-c1 vectors, ...) fails.
struct CertReport {
  ExtReal achieved_min;
  ExtReal sigma0_target;                     // d/(c1(N-d)), infinite for N <= d
  std::optional<double> sigma0_gap;          // target - achieved (0 when both infinite)
  std::optional<double> uniform_value;       // best single-sphere ratio at this sigma
  int nonminimal_count = 0;                  // |v_i|^2 > c1 (1 + 1e-9)
  CountBound count;
  std::optional<bool> count_within_bound;
  std::optional<double> subset_welch_bound;  // Welch bound for the above-c1 subset
  std::optional<double> subset_max_sq_inner;
  bool welch_consistent = true;              // max sq inner >= bound - 1e-12 (subset >= 2)
  bool block_scalable = false;               // above-c1 block passes the derivative test
  MuBound mu;
  std::optional<double> mu_gap;              // mu_bound - achieved
  std::optional<bool> within_mu_bound;
};

inline CertReport certify(const VectorSystem& vs, const NormConstraints& cons) {
  const int d = vs.dim();
  const int n = vs.count();
  for (int i = 0; i < n; ++i) {
    const double n2 = vs.norm2(i);
    if (n2 < cons.c1 * (1.0 - 1e-9) || n2 > cons.c2 * (1.0 + 1e-9))
      throw std::invalid_argument("certify: vector " + std::to_string(i) +
                                  " has squared norm " + std::to_string(n2) +
                                  " outside [c1, c2]");
  }

  CertReport rep;
  const RatioReport eval_rep = evaluate(vs, cons.sigma);
  rep.achieved_min = eval_rep.min_value;
  rep.sigma0_target = sigma0_extremal_value(d, n, cons.c1);
  if (rep.achieved_min.is_finite() && rep.sigma0_target.is_finite())
    rep.sigma0_gap = rep.sigma0_target.value() - rep.achieved_min.value();
  else if (rep.achieved_min.is_infinite() && rep.sigma0_target.is_infinite())
    rep.sigma0_gap = 0.0;

  if (n > d) rep.uniform_value = uniform_case(d, n, cons.c1, cons.c2, cons.sigma).value;

  std::vector<int> block;
  for (int i = 0; i < n; ++i)
    if (vs.norm2(i) > cons.c1 * (1.0 + detail::kNonminimalRelTol)) block.push_back(i);
  rep.nonminimal_count = static_cast<int>(block.size());

  rep.count = nonminimal_count_bound(d, cons.c1, cons.sigma);
  if (rep.count.valid)
    rep.count_within_bound = rep.nonminimal_count <= *rep.count.max_integer_count;

  if (block.size() >= 2) {
    rep.subset_welch_bound = welch_bound(static_cast<int>(block.size()), d, cons.c1);
    double max_sq = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i)
      for (std::size_t j = i + 1; j < block.size(); ++j) {
        const double g = dot(vs.vec(block[i]), vs.vec(block[j]));
        max_sq = std::max(max_sq, g * g);
      }
    rep.subset_max_sq_inner = max_sq;
    rep.welch_consistent = max_sq >= *rep.subset_welch_bound - 1e-12;
  }

  if (!block.empty()) {
    bool scalable = true;
    for (int k : block) {
      const double block_interference = indexed_sum(block.size(), [&](std::size_t bi) {
        const int l = block[bi];
        if (l == k) return 0.0;
        const double g = dot(vs.vec(k), vs.vec(l));
        return g * g;
      });
      if (cons.sigma * cons.sigma - block_interference > 0.0) {
        scalable = false;
        break;
      }
    }
    rep.block_scalable = scalable;
  }

  if (n > d && cons.c1 * cons.c1 > d * cons.sigma * cons.sigma) {
    rep.mu = mu_upper_bound(d, n, cons.c1, cons.c2, cons.sigma);
    if (rep.mu.mu_bound && rep.achieved_min.is_finite()) {
      rep.mu_gap = *rep.mu.mu_bound - rep.achieved_min.value();
      rep.within_mu_bound = rep.achieved_min.value() <= *rep.mu.mu_bound + 1e-9;
    }
  }
  return rep;
}

}  // namespace framelab
