#pragma once

// Command-line surface: six subcommands (build-untf, eval, optimize, bounds,
// certify, sweep) over the library, with JSON/CSV reports that echo the full
// parameter set for reproducibility. Identical invocations produce
// byte-identical reports apart from the isolated timestamp line.
//
// Flag conventions: --c1/--c2 bound SQUARED norms; --sigma is the noise
// parameter itself (not squared) and, for sweep only, accepts START:END:STEP.
// FRAME_LAB_THREADS caps optimizer concurrency (0 = auto).

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "framelab/bounds.hpp"
#include "framelab/builder.hpp"
#include "framelab/io.hpp"
#include "framelab/objective.hpp"
#include "framelab/optimizer.hpp"

namespace framelab {

/// Bad invocation (unknown flag, missing parameter, domain violation). The
/// tool exits 2 on these, 1 on operational failures.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// --help and friends: carries the text to print before a clean exit 0.
class HelpRequested : public std::runtime_error {
 public:
  explicit HelpRequested(std::string text) : std::runtime_error("help"), text_(std::move(text)) {}
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

struct SigmaRange {
  double start = 0.0;
  double end = 0.0;
  double step = 0.0;
};

struct ExperimentSpec {
  enum class Command { kBuildUntf, kEval, kOptimize, kBounds, kCertify, kSweep };

  Command command = Command::kEval;
  int dim = 2;
  int count = 4;
  double c1 = 1.0;
  double c2 = 2.0;
  double sigma = 0.0;
  std::optional<SigmaRange> sigma_range;  // sweep only
  std::uint64_t seed = 0;
  int restarts = 16;
  int max_iters = 0;  // 0 = command default (builder 20000, optimizer 50000)
  double tol = 0.0;   // 0 = command default (builder 1e-8, optimizer 1e-10)
  std::string input;
  std::string output;
  FileFormat format = FileFormat::kJson;
  bool with_optimize = false;
  bool dim_explicit = false;  // --dim given (enforced when reading CSV input)
  int threads = 0;            // from FRAME_LAB_THREADS; 0 = auto

  const char* command_name() const {
    switch (command) {
      case Command::kBuildUntf: return "build-untf";
      case Command::kEval: return "eval";
      case Command::kOptimize: return "optimize";
      case Command::kBounds: return "bounds";
      case Command::kCertify: return "certify";
      case Command::kSweep: return "sweep";
    }
    return "?";
  }
};

namespace detail {

inline SigmaRange parse_sigma_range(const std::string& text) {
  SigmaRange r;
  const auto first = text.find(':');
  const auto second = text.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw UsageError("--sigma for sweep must be START:END:STEP, got '" + text + "'");
  try {
    std::size_t pos = 0;
    const std::string a = text.substr(0, first);
    const std::string b = text.substr(first + 1, second - first - 1);
    const std::string c = text.substr(second + 1);
    r.start = std::stod(a, &pos);
    if (pos != a.size()) throw std::invalid_argument(a);
    r.end = std::stod(b, &pos);
    if (pos != b.size()) throw std::invalid_argument(b);
    r.step = std::stod(c, &pos);
    if (pos != c.size()) throw std::invalid_argument(c);
  } catch (const std::exception&) {
    throw UsageError("--sigma range has a non-numeric part in '" + text + "'");
  }
  if (!(r.step > 0.0)) throw UsageError("--sigma range STEP must be > 0");
  if (r.end < r.start) throw UsageError("--sigma range END must be >= START");
  if (r.start < 0.0) throw UsageError("--sigma must be >= 0");
  return r;
}

inline int threads_from_env() {
  const char* env = std::getenv("FRAME_LAB_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(env, &pos);
    if (pos != std::string(env).size() || v < 0) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("FRAME_LAB_THREADS must be a non-negative integer, got '") +
                     env + "'");
  }
}

}  // namespace detail

/// Parses subcommand + flags (argv without the program name). Throws
/// UsageError on bad input, HelpRequested for --help.
inline ExperimentSpec parse_args(const std::vector<std::string>& args) {
  ExperimentSpec spec;
  std::string sigma_text = "0";
  std::string format_text = "json";

  CLI::App app{"frame-lab: max-min frame energy toolkit"};
  app.require_subcommand(1);

  CLI::App* build = app.add_subcommand(
      "build-untf", "Construct a tight frame with all squared norms equal to --c1");
  CLI::App* eval = app.add_subcommand("eval", "Evaluate the ratio report of a system file");
  CLI::App* optimize =
      app.add_subcommand("optimize", "Maximize the min ratio over the norm shell");
  CLI::App* bounds = app.add_subcommand("bounds", "Closed-form bounds for a parameter set");
  CLI::App* certify =
      app.add_subcommand("certify", "Compare a system file against the closed forms");
  CLI::App* sweep = app.add_subcommand("sweep", "Tabulate bounds over a sigma range");

  const auto add_common = [&](CLI::App* cmd, bool wants_shell, bool wants_sigma) {
    cmd->add_option("--dim", spec.dim, "Ambient dimension d");
    cmd->add_option("--count", spec.count, "Number of vectors N");
    if (wants_shell) {
      cmd->add_option("--c1", spec.c1, "Lower bound on squared norms");
      cmd->add_option("--c2", spec.c2, "Upper bound on squared norms");
    }
    if (wants_sigma) cmd->add_option("--sigma", sigma_text, "Noise parameter (>= 0)");
    cmd->add_option("--seed", spec.seed, "Seed for all randomized stages");
    cmd->add_option("--output", spec.output, "Report/system output path (default: stdout)");
    cmd->add_option("--format", format_text, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  add_common(build, false, false);
  build->add_option("--c1", spec.c1, "Target squared norm per vector");
  build->add_option("--max-iters", spec.max_iters, "Descent iterations per restart");
  build->add_option("--tol", spec.tol, "Tightness defect tolerance");

  add_common(eval, false, true);
  eval->add_option("--input", spec.input, "System file (JSON or CSV)")->required();

  add_common(optimize, true, true);
  optimize->add_option("--restarts", spec.restarts, "Independent restarts");
  optimize->add_option("--max-iters", spec.max_iters, "Gradient iterations per restart");
  optimize->add_option("--tol", spec.tol, "Relative-improvement stall threshold");

  add_common(bounds, true, true);

  add_common(certify, true, true);
  certify->add_option("--input", spec.input, "System file (JSON or CSV)")->required();

  add_common(sweep, true, true);
  sweep->add_option("--restarts", spec.restarts, "Restarts per optimize point");
  sweep->add_option("--max-iters", spec.max_iters, "Iterations per optimize point");
  sweep->add_option("--tol", spec.tol, "Optimizer stall threshold");
  sweep->add_flag("--with-optimize", spec.with_optimize,
                  "Run the optimizer at every sigma (fills the achieved column)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream help;
    help << app.help();
    throw HelpRequested(help.str());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (build->parsed()) spec.command = ExperimentSpec::Command::kBuildUntf;
  if (eval->parsed()) spec.command = ExperimentSpec::Command::kEval;
  if (optimize->parsed()) spec.command = ExperimentSpec::Command::kOptimize;
  if (bounds->parsed()) spec.command = ExperimentSpec::Command::kBounds;
  if (certify->parsed()) spec.command = ExperimentSpec::Command::kCertify;
  if (sweep->parsed()) spec.command = ExperimentSpec::Command::kSweep;

  for (CLI::App* sub : {build, eval, optimize, bounds, certify, sweep})
    if (sub->parsed() && sub->count("--dim") > 0) spec.dim_explicit = true;

  spec.format = parse_format(format_text);
  spec.threads = detail::threads_from_env();

  // Domain checks; violations are usage errors (exit 2), not runtime faults.
  if (spec.dim < 1) throw UsageError("--dim must be >= 1");
  if (spec.count < 1) throw UsageError("--count must be >= 1");
  if (!(spec.c1 > 0.0)) throw UsageError("--c1 must be > 0");
  if (spec.restarts < 1) throw UsageError("--restarts must be >= 1");
  if (spec.max_iters < 0) throw UsageError("--max-iters must be >= 1");
  if (spec.tol < 0.0) throw UsageError("--tol must be > 0");

  const bool wants_shell = spec.command == ExperimentSpec::Command::kOptimize ||
                           spec.command == ExperimentSpec::Command::kBounds ||
                           spec.command == ExperimentSpec::Command::kCertify ||
                           spec.command == ExperimentSpec::Command::kSweep;
  if (wants_shell && !(spec.c1 < spec.c2))
    throw UsageError("need --c1 < --c2, got c1 = " + std::to_string(spec.c1) +
                     ", c2 = " + std::to_string(spec.c2));

  if (spec.command == ExperimentSpec::Command::kSweep) {
    spec.sigma_range = detail::parse_sigma_range(
        sigma_text.find(':') == std::string::npos ? sigma_text + ":" + sigma_text + ":1"
                                                  : sigma_text);
    if (spec.count <= spec.dim)
      throw UsageError("sweep requires --count > --dim (uniform-case columns)");
  } else {
    try {
      std::size_t pos = 0;
      spec.sigma = std::stod(sigma_text, &pos);
      if (pos != sigma_text.size()) throw std::invalid_argument(sigma_text);
    } catch (const std::exception&) {
      throw UsageError("--sigma must be a number, got '" + sigma_text + "'");
    }
    if (spec.sigma < 0.0) throw UsageError("--sigma must be >= 0");
  }
  return spec;
}

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json parameters_json(const ExperimentSpec& spec) {
  json p{{"command", spec.command_name()},
         {"dim", spec.dim},
         {"count", spec.count},
         {"seed", spec.seed},
         {"format", spec.format == FileFormat::kJson ? "json" : "csv"}};
  const bool from_file = spec.command == ExperimentSpec::Command::kEval ||
                         spec.command == ExperimentSpec::Command::kCertify;
  if (from_file) {
    // dim and count come from the input file; echo dim only when the caller
    // pinned it explicitly.
    p.erase("count");
    if (!spec.dim_explicit) p.erase("dim");
  }
  const bool shell = spec.command != ExperimentSpec::Command::kEval;
  if (shell) {
    p["c1"] = spec.c1;
    p["c2"] = spec.c2;
  }
  if (spec.command == ExperimentSpec::Command::kBuildUntf) {
    p["target_norm2"] = spec.c1;
    p.erase("c2");
  }
  if (spec.sigma_range) {
    p["sigma"] = json::array({spec.sigma_range->start, spec.sigma_range->end,
                              spec.sigma_range->step});
  } else if (spec.command != ExperimentSpec::Command::kBuildUntf) {
    p["sigma"] = spec.sigma;
  }
  if (spec.command == ExperimentSpec::Command::kOptimize ||
      spec.command == ExperimentSpec::Command::kSweep) {
    p["restarts"] = spec.restarts;
    p["threads"] = spec.threads;
  }
  if (spec.command == ExperimentSpec::Command::kSweep)
    p["with_optimize"] = spec.with_optimize;
  if (spec.max_iters > 0) p["max_iters"] = spec.max_iters;
  if (spec.tol > 0.0) p["tol"] = spec.tol;
  if (!spec.input.empty()) p["input"] = spec.input;
  if (!spec.output.empty()) p["output"] = spec.output;
  return p;
}

inline void emit_report(const ExperimentSpec& spec, json body) {
  json envelope{{"command", spec.command_name()},
                {"parameters", parameters_json(spec)},
                {"timestamp", utc_timestamp()},
                {"report", std::move(body)}};
  if (spec.format == FileFormat::kCsv) {
    // Flatten without the timestamp: CSV reports are fully deterministic.
    envelope.erase("timestamp");
    const std::string text = report_to_csv(envelope);
    if (spec.output.empty())
      std::cout << text;
    else
      write_text_file(spec.output, text);
  } else {
    const std::string text = envelope.dump(2) + "\n";
    if (spec.output.empty())
      std::cout << text;
    else
      write_text_file(spec.output, text);
  }
}

inline OptimizerConfig optimizer_config(const ExperimentSpec& spec) {
  OptimizerConfig cfg;
  cfg.restarts = spec.restarts;
  if (spec.max_iters > 0) cfg.max_iters = spec.max_iters;
  if (spec.tol > 0.0) cfg.tolerance = spec.tol;
  cfg.seed = spec.seed;
  cfg.threads = spec.threads;
  return cfg;
}

inline int run_build(const ExperimentSpec& spec) {
  BuildRequest req;
  req.dim = spec.dim;
  req.count = spec.count;
  req.target_norm2 = spec.c1;
  req.seed = spec.seed;
  if (spec.max_iters > 0) req.max_iters = spec.max_iters;
  if (spec.tol > 0.0) req.defect_tol = spec.tol;

  const VectorSystem vs = build_untf(req);
  if (spec.output.empty()) {
    if (spec.format == FileFormat::kCsv)
      std::cout << system_to_csv(vs);
    else
      std::cout << system_to_json(vs).dump(2) << "\n";
    return 0;
  }
  write_system(spec.output, vs, spec.format);
  json body{{"system_file", spec.output},
            {"defect", tightness_defect(vs)},
            {"frame_potential", frame_potential(vs)}};
  json envelope{{"command", spec.command_name()},
                {"parameters", parameters_json(spec)},
                {"timestamp", utc_timestamp()},
                {"report", std::move(body)}};
  std::cout << envelope.dump(2) << "\n";
  return 0;
}

inline int run_sweep(const ExperimentSpec& spec) {
  const SigmaRange r = *spec.sigma_range;
  const long long steps = std::llround((r.end - r.start) / r.step);
  std::string csv = "# sweep dim=" + std::to_string(spec.dim) +
                    " count=" + std::to_string(spec.count) + " c1=" + json(spec.c1).dump() +
                    " c2=" + json(spec.c2).dump() + " seed=" + std::to_string(spec.seed) +
                    " restarts=" + std::to_string(spec.restarts) +
                    " with_optimize=" + (spec.with_optimize ? "1" : "0") + "\n";
  csv += "sigma,uniform_answer,mu_bound,achieved\n";

  for (long long i = 0; i <= steps; ++i) {
    const double sigma = r.start + static_cast<double>(i) * r.step;
    if (sigma > r.end * (1.0 + 1e-12) + 1e-300) break;
    const UniformCase uc = uniform_case(spec.dim, spec.count, spec.c1, spec.c2, sigma);
    std::string mu_text;
    if (spec.c1 * spec.c1 > spec.dim * sigma * sigma) {
      const MuBound mu = mu_upper_bound(spec.dim, spec.count, spec.c1, spec.c2, sigma);
      if (mu.mu_bound) mu_text = json(*mu.mu_bound).dump();
    }
    std::string achieved_text;
    if (spec.with_optimize) {
      OptimizerConfig cfg = optimizer_config(spec);
      cfg.seed = spec.seed + static_cast<std::uint64_t>(i);
      const NormConstraints cons(spec.c1, spec.c2, sigma);
      const OptResult res = optimize(spec.dim, spec.count, cons, cfg);
      achieved_text = res.best_report.min_value.is_infinite()
                          ? "inf"
                          : json(res.best_report.min_value.value()).dump();
    }
    csv += json(sigma).dump() + "," + json(uc.answer).dump() + "," + mu_text + "," +
           achieved_text + "\n";
  }

  if (spec.output.empty())
    std::cout << csv;
  else
    write_text_file(spec.output, csv);
  return 0;
}

}  // namespace detail

/// Executes a parsed spec. Returns 0 on success; operational failures
/// (construction failure, bad input file, infeasible system) raise and the
/// caller maps them to exit code 1.
inline int run(const ExperimentSpec& spec) {
  switch (spec.command) {
    case ExperimentSpec::Command::kBuildUntf:
      return detail::run_build(spec);

    case ExperimentSpec::Command::kEval: {
      const VectorSystem vs = read_system(spec.input, spec.dim_explicit ? spec.dim : 0);
      detail::emit_report(spec, report_to_json(evaluate(vs, spec.sigma)));
      return 0;
    }

    case ExperimentSpec::Command::kOptimize: {
      const NormConstraints cons(spec.c1, spec.c2, spec.sigma);
      const OptResult res = optimize(spec.dim, spec.count, cons, detail::optimizer_config(spec));
      detail::emit_report(spec, report_to_json(res));
      if (!spec.output.empty()) {
        const std::string system_path = spec.output + ".system.json";
        write_system(system_path, res.best_system, FileFormat::kJson);
      }
      return 0;
    }

    case ExperimentSpec::Command::kBounds:
      detail::emit_report(spec, report_to_json(compute_bounds(spec.dim, spec.count, spec.c1,
                                                              spec.c2, spec.sigma)));
      return 0;

    case ExperimentSpec::Command::kCertify: {
      const VectorSystem vs = read_system(spec.input, spec.dim_explicit ? spec.dim : 0);
      const NormConstraints cons(spec.c1, spec.c2, spec.sigma);
      detail::emit_report(spec, report_to_json(certify(vs, cons)));
      return 0;
    }

    case ExperimentSpec::Command::kSweep:
      return detail::run_sweep(spec);
  }
  throw std::logic_error("run: unhandled command");
}

}  // namespace framelab
