#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace framelab;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

namespace fs = std::filesystem;

fs::path tmp_dir() {
  const fs::path dir = fs::temp_directory_path() / "framelab_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs a CLI spec with std::cout redirected, returning captured output.
std::pair<int, std::string> run_captured(const ExperimentSpec& spec) {
  std::ostringstream sink;
  std::streambuf* old = std::cout.rdbuf(sink.rdbuf());
  int code = -1;
  try {
    code = run(spec);
  } catch (...) {
    std::cout.rdbuf(old);
    throw;
  }
  std::cout.rdbuf(old);
  return {code, sink.str()};
}

}  // namespace

TEST_CASE("system files round-trip in both formats", "[io]") {
  SplitMix64 gen(808);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(gen.next_u64() % 4);
    const int n = 1 + static_cast<int>(gen.next_u64() % 7);
    const auto vs = random_system(d, n, NormConstraints(0.5, 2.0, 0.0), gen);

    const auto jpath = tmp_dir() / ("rt" + std::to_string(trial) + ".json");
    write_system(jpath.string(), vs, FileFormat::kJson);
    const auto from_json_file = read_system(jpath.string());
    CHECK(from_json_file == vs);

    const auto cpath = tmp_dir() / ("rt" + std::to_string(trial) + ".csv");
    write_system(cpath.string(), vs, FileFormat::kCsv);
    const auto from_csv_file = read_system(cpath.string());
    CHECK(from_csv_file == vs);
  }
}

TEST_CASE("CSV parsing is strict and names the offending row", "[io]") {
  const auto good = detail::system_from_csv("1,0\n0,1\n", 0);
  CHECK(good.dim() == 2);
  CHECK(good.count() == 2);
  CHECK(good.vec(1)[1] == 1.0);

  CHECK_THROWS_WITH(detail::system_from_csv("1,0\n0,1\n1\n", 0),
                    ContainsSubstring("row 3"));
  CHECK_THROWS_WITH(detail::system_from_csv("1,oops\n", 0),
                    ContainsSubstring("row 1"));
  CHECK_THROWS_WITH(detail::system_from_csv("", 0), ContainsSubstring("no rows"));
  CHECK_THROWS_WITH(detail::system_from_csv("1,0\n0,1\n", 3),
                    ContainsSubstring("expected 3"));
}

TEST_CASE("JSON system parsing validates the shape", "[io]") {
  CHECK_THROWS_AS(system_from_json(json::parse(R"({"dim": 2})")),
                  std::runtime_error);
  CHECK_THROWS_WITH(
      system_from_json(json::parse(R"({"dim":2,"count":2,"vectors":[[1,0],[1]]})")),
      ContainsSubstring("vectors[1]"));
  CHECK_THROWS_AS(
      system_from_json(json::parse(R"({"dim":2,"count":3,"vectors":[[1,0],[0,1]]})")),
      std::runtime_error);
  const auto ok =
      system_from_json(json::parse(R"({"dim":2,"count":1,"vectors":[[3,4]]})"));
  CHECK_THAT(ok.norm2(0), WithinRel(25.0, 1e-15));
}

TEST_CASE("infinite values serialize as the string inf", "[io]") {
  CHECK(json(ExtReal::infinity()).is_string());
  CHECK(json(ExtReal::infinity()).get<std::string>() == "inf");
  CHECK(json(ExtReal(1.5)).is_number());

  const VectorSystem pair(3, {1.0, 0.0, 0.0, 0.0, 1.0, 0.0});
  const auto j = report_to_json(evaluate(pair, 0.0));
  CHECK(j["min_value"] == "inf");
  CHECK(j["objective"] == "inf");
}

TEST_CASE("report serialization uses 1-based indices", "[io]") {
  const auto rep = evaluate(tsup::square_frame(), 0.0);
  const auto j = report_to_json(rep);
  CHECK(j["argmin_set"] == json::array({1, 2, 3, 4}));
}

TEST_CASE("CSV flattening is deterministic and handles nulls and arrays", "[io]") {
  const json j{{"b", 1.5},
               {"a", json(nullptr)},
               {"nested", json{{"x", json::array({1, 2})}}},
               {"pairs", json::array({json::array({1, 0.5}), json::array({2, 0.25})})}};
  const std::string csv = report_to_csv(j);
  CHECK(csv ==
        "a,\n"
        "b,1.5\n"
        "nested.x,1;2\n"
        "pairs,1:0.5;2:0.25\n");
}

TEST_CASE("parse_args builds full experiment specs", "[cli]") {
  const auto spec = parse_args({"optimize", "--dim", "3", "--count", "7", "--c1",
                                "0.5", "--c2", "1.5", "--sigma", "0.2", "--seed",
                                "9", "--restarts", "4", "--max-iters", "2000"});
  CHECK(spec.command == ExperimentSpec::Command::kOptimize);
  CHECK(spec.dim == 3);
  CHECK(spec.count == 7);
  CHECK(spec.c1 == 0.5);
  CHECK(spec.c2 == 1.5);
  CHECK(spec.sigma == 0.2);
  CHECK(spec.seed == 9);
  CHECK(spec.restarts == 4);
  CHECK(spec.max_iters == 2000);

  const auto ev = parse_args({"eval", "--input", "x.json", "--sigma", "0.1"});
  CHECK(ev.command == ExperimentSpec::Command::kEval);
  CHECK(ev.input == "x.json");
  CHECK_FALSE(ev.dim_explicit);

  const auto bounds_spec =
      parse_args({"bounds", "--dim", "2", "--count", "6", "--c1", "1", "--c2",
                  "1.5", "--sigma", "0.1", "--format", "csv"});
  CHECK(bounds_spec.format == FileFormat::kCsv);
  CHECK(bounds_spec.dim_explicit);
}

TEST_CASE("parse_args rejects bad invocations", "[cli]") {
  CHECK_THROWS_AS(parse_args({}), UsageError);
  CHECK_THROWS_AS(parse_args({"frobnicate"}), UsageError);
  CHECK_THROWS_AS(parse_args({"eval"}), UsageError);  // missing --input
  CHECK_THROWS_AS(parse_args({"optimize", "--c1", "2", "--c2", "1"}), UsageError);
  CHECK_THROWS_AS(parse_args({"optimize", "--c1", "1", "--c2", "1"}), UsageError);
  CHECK_THROWS_AS(parse_args({"optimize", "--sigma", "-0.5"}), UsageError);
  CHECK_THROWS_AS(parse_args({"optimize", "--restarts", "0"}), UsageError);
  CHECK_THROWS_AS(parse_args({"build-untf", "--c1", "0"}), UsageError);
  CHECK_THROWS_AS(parse_args({"optimize", "--format", "xml"}), UsageError);
  CHECK_THROWS_AS(parse_args({"sweep", "--dim", "2", "--count", "2"}), UsageError);
  CHECK_THROWS_AS(parse_args({"optimize", "--bogus-flag", "1"}), UsageError);
  CHECK_THROWS_AS(parse_args({"bounds", "--dim", "0"}), UsageError);

  try {
    parse_args({"--help"});
    FAIL("expected HelpRequested");
  } catch (const HelpRequested& h) {
    CHECK_THAT(h.text(), ContainsSubstring("Subcommands"));
  }
}

TEST_CASE("sigma sweep ranges parse strictly", "[cli]") {
  const auto r = detail::parse_sigma_range("0:0.2:0.01");
  CHECK(r.start == 0.0);
  CHECK(r.end == 0.2);
  CHECK(r.step == 0.01);
  // A bare value is expanded to a one-row range by the sweep argument parser.
  const auto single = parse_args({"sweep", "--dim", "2", "--count", "5", "--c1", "1",
                                  "--c2", "2", "--sigma", "0.3"});
  REQUIRE(single.sigma_range.has_value());
  CHECK(single.sigma_range->start == 0.3);
  CHECK(single.sigma_range->end == 0.3);
  CHECK_THROWS_AS(detail::parse_sigma_range("0.3"), UsageError);
  CHECK_THROWS_AS(detail::parse_sigma_range("0.2:0.1:0.01"), UsageError);
  CHECK_THROWS_AS(detail::parse_sigma_range("0:0.2:0"), UsageError);
  CHECK_THROWS_AS(detail::parse_sigma_range("0:0.2:-0.1"), UsageError);
  CHECK_THROWS_AS(detail::parse_sigma_range("-0.1:0.2:0.1"), UsageError);
  CHECK_THROWS_AS(detail::parse_sigma_range("a:b:c"), UsageError);
  CHECK_THROWS_AS(detail::parse_sigma_range("0:0.2"), UsageError);
}

TEST_CASE("thread override comes from the environment", "[cli]") {
  unsetenv("FRAME_LAB_THREADS");
  const auto plain = parse_args({"optimize", "--dim", "2", "--count", "4"});
  CHECK(plain.threads == 0);

  setenv("FRAME_LAB_THREADS", "3", 1);
  const auto forced = parse_args({"optimize", "--dim", "2", "--count", "4"});
  CHECK(forced.threads == 3);

  setenv("FRAME_LAB_THREADS", "soup", 1);
  CHECK_THROWS_AS(parse_args({"optimize", "--dim", "2", "--count", "4"}), UsageError);
  unsetenv("FRAME_LAB_THREADS");
}

TEST_CASE("CLI runs commands end to end", "[cli]") {
  const auto dir = tmp_dir();
  const auto sys_path = (dir / "untf.json").string();

  ExperimentSpec build;
  build.command = ExperimentSpec::Command::kBuildUntf;
  build.dim = 2;
  build.count = 5;
  build.c1 = 1.0;
  build.seed = 4;
  build.output = sys_path;
  const auto [bcode, bout] = run_captured(build);
  CHECK(bcode == 0);
  CHECK_THAT(bout, ContainsSubstring("\"defect\""));
  CHECK(fs::exists(sys_path));

  ExperimentSpec eval_spec;
  eval_spec.command = ExperimentSpec::Command::kEval;
  eval_spec.input = sys_path;
  eval_spec.sigma = 0.1;
  eval_spec.output = (dir / "eval.json").string();
  const auto [ecode, eout] = run_captured(eval_spec);
  CHECK(ecode == 0);
  const auto eval_doc = json::parse(slurp(dir / "eval.json"));
  CHECK(eval_doc["command"] == "eval");
  CHECK(eval_doc["report"]["ratios"].size() == 5);
  // Scaled tight frame in the plane: every ratio is 1/(sigma^2 + (N-d)/d).
  const double expected = 1.0 / (0.01 + 1.5);
  for (const auto& r : eval_doc["report"]["ratios"])
    CHECK_THAT(r.get<double>(), WithinRel(expected, 1e-6));

  ExperimentSpec cert;
  cert.command = ExperimentSpec::Command::kCertify;
  cert.input = sys_path;
  cert.c1 = 1.0;
  cert.c2 = 2.0;
  cert.sigma = 0.0;
  cert.output = (dir / "cert.json").string();
  const auto [ccode, cout_text] = run_captured(cert);
  CHECK(ccode == 0);
  const auto cert_doc = json::parse(slurp(dir / "cert.json"));
  CHECK(cert_doc["report"]["nonminimal_count"] == 0);
  CHECK_THAT(cert_doc["report"]["achieved_min"].get<double>(),
             WithinRel(2.0 / 3.0, 1e-6));

  ExperimentSpec bounds_spec;
  bounds_spec.command = ExperimentSpec::Command::kBounds;
  bounds_spec.dim = 2;
  bounds_spec.count = 10;
  bounds_spec.c1 = 1.0;
  bounds_spec.c2 = 1.21;
  bounds_spec.sigma = 0.1;
  bounds_spec.output = (dir / "bounds.csv").string();
  bounds_spec.format = FileFormat::kCsv;
  const auto [ocode, oout] = run_captured(bounds_spec);
  CHECK(ocode == 0);
  const std::string bounds_csv = slurp(dir / "bounds.csv");
  CHECK_THAT(bounds_csv, ContainsSubstring("report.mu_upper,0.3163126976954361"));
  CHECK_THAT(bounds_csv, !ContainsSubstring("timestamp"));

  ExperimentSpec sweep_spec;
  sweep_spec.command = ExperimentSpec::Command::kSweep;
  sweep_spec.dim = 2;
  sweep_spec.count = 10;
  sweep_spec.c1 = 1.0;
  sweep_spec.c2 = 1.21;
  sweep_spec.sigma_range = SigmaRange{0.0, 0.1, 0.02};
  sweep_spec.output = (dir / "sweep.csv").string();
  const auto [scode, sout] = run_captured(sweep_spec);
  CHECK(scode == 0);
  const std::string sweep_csv = slurp(dir / "sweep.csv");
  int rows = 0;
  for (char ch : sweep_csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 2 + 6);  // comment + header + sigma in {0, 0.02, ..., 0.1}

  ExperimentSpec opt;
  opt.command = ExperimentSpec::Command::kOptimize;
  opt.dim = 2;
  opt.count = 5;
  opt.c1 = 1.0;
  opt.c2 = 2.0;
  opt.sigma = 0.05;
  opt.restarts = 2;
  opt.max_iters = 600;
  opt.output = (dir / "opt.json").string();
  const auto [pcode, pout] = run_captured(opt);
  CHECK(pcode == 0);
  const auto opt_doc = json::parse(slurp(dir / "opt.json"));
  CHECK_THAT(opt_doc["report"]["min_value"].get<double>(),
             WithinRel(1.0 / 1.5025, 1e-6));
  const auto saved = read_system((dir / "opt.json.system.json").string());
  CHECK(saved.count() == 5);
}
