#pragma once

// Serialization: vector-system files (JSON and CSV), and JSON report bodies
// for every result type. System round-trips are bit-exact: JSON numbers use
// shortest-round-trip printing, CSV uses %.17g. Reports never contain NaN;
// infinite values are serialized as the string "inf". Serialized indices
// (argmin sets) are 1-based; the in-memory API is 0-based.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "framelab/bounds.hpp"
#include "framelab/ext_real.hpp"
#include "framelab/objective.hpp"
#include "framelab/optimizer.hpp"
#include "framelab/vector_system.hpp"

namespace framelab {

using nlohmann::json;

inline void to_json(json& j, const ExtReal& x) {
  if (x.is_infinite())
    j = "inf";
  else
    j = x.value();
}

enum class FileFormat { kJson, kCsv };

inline FileFormat parse_format(const std::string& name) {
  if (name == "json") return FileFormat::kJson;
  if (name == "csv") return FileFormat::kCsv;
  throw std::invalid_argument("format must be 'json' or 'csv', got '" + name + "'");
}

// ---------------------------------------------------------------------------
// Vector-system files

inline json system_to_json(const VectorSystem& vs) {
  json rows = json::array();
  for (int i = 0; i < vs.count(); ++i) {
    json row = json::array();
    for (double x : vs.vec(i)) row.push_back(x);
    rows.push_back(std::move(row));
  }
  return json{{"dim", vs.dim()}, {"count", vs.count()}, {"vectors", std::move(rows)}};
}

inline VectorSystem system_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("count") || !j.contains("vectors"))
    throw std::runtime_error("system JSON: need an object with dim, count, vectors");
  if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1)
    throw std::runtime_error("system JSON: dim must be a positive integer");
  const int dim = j["dim"].get<int>();
  if (!j["count"].is_number_integer() || j["count"].get<int>() < 1)
    throw std::runtime_error("system JSON: count must be a positive integer");
  const int count = j["count"].get<int>();
  const json& rows = j["vectors"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != count)
    throw std::runtime_error("system JSON: vectors must be an array of count = " +
                             std::to_string(count) + " rows");
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(count));
  for (int r = 0; r < count; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw std::runtime_error("system JSON: vectors[" + std::to_string(r) + "] must have " +
                               std::to_string(dim) + " entries");
    for (int c = 0; c < dim; ++c) {
      const json& cell = row[static_cast<std::size_t>(c)];
      if (!cell.is_number())
        throw std::runtime_error("system JSON: vectors[" + std::to_string(r) + "][" +
                                 std::to_string(c) + "] is not a number");
      const double x = cell.get<double>();
      if (!std::isfinite(x))
        throw std::runtime_error("system JSON: vectors[" + std::to_string(r) + "][" +
                                 std::to_string(c) + "] is not finite");
      flat.push_back(x);
    }
  }
  return VectorSystem(dim, std::move(flat));
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline VectorSystem system_from_csv(const std::string& text, int expected_dim) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int dim = expected_dim;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const std::string v = trim(cell);
      try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(x)) throw std::invalid_argument("not finite");
        row.push_back(x);
      } catch (const std::exception&) {
        throw std::runtime_error("system CSV: row " + std::to_string(line_no) + ", column " +
                                 std::to_string(row.size() + 1) + ": cannot parse '" + v +
                                 "' as a finite number");
      }
    }
    if (dim == 0) dim = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != dim)
      throw std::runtime_error("system CSV: row " + std::to_string(line_no) + " has " +
                               std::to_string(row.size()) + " columns, expected " +
                               std::to_string(dim));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("system CSV: no rows");
  return VectorSystem::from_rows(rows);
}

inline std::string format_17g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

/// Reads a system file, deciding JSON vs CSV by content (a leading '{' means
/// JSON). expected_dim = 0 infers the dimension from the data; a nonzero
/// value is enforced.
inline VectorSystem read_system(const std::string& path, int expected_dim = 0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open system file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::size_t first = 0;
  while (first < text.size() && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
  if (first == text.size()) throw std::runtime_error("system file '" + path + "' is empty");

  VectorSystem vs = [&] {
    if (text[first] == '{') {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::parse_error& e) {
        throw std::runtime_error("system file '" + path + "': " + e.what());
      }
      return system_from_json(j);
    }
    return detail::system_from_csv(text, expected_dim);
  }();
  if (expected_dim != 0 && vs.dim() != expected_dim)
    throw std::runtime_error("system file '" + path + "' has dim " + std::to_string(vs.dim()) +
                             ", expected " + std::to_string(expected_dim));
  return vs;
}

inline std::string system_to_csv(const VectorSystem& vs) {
  std::string out;
  for (int i = 0; i < vs.count(); ++i) {
    const auto v = vs.vec(i);
    for (int c = 0; c < vs.dim(); ++c) {
      if (c) out += ',';
      out += detail::format_17g(v[static_cast<std::size_t>(c)]);
    }
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline void write_system(const std::string& path, const VectorSystem& vs,
                         FileFormat format = FileFormat::kJson) {
  if (format == FileFormat::kJson)
    write_text_file(path, system_to_json(vs).dump(2) + "\n");
  else
    write_text_file(path, system_to_csv(vs));
}

// ---------------------------------------------------------------------------
// Report bodies

inline json report_to_json(const RatioReport& rep) {
  json ratios = json::array();
  for (const ExtReal& r : rep.ratios) ratios.push_back(json(r));
  json argmin = json::array();
  for (int k : rep.argmin_set) argmin.push_back(k + 1);  // 1-based in reports
  return json{{"ratios", std::move(ratios)},
              {"row_energies", rep.row_energies},
              {"min_value", json(rep.min_value)},
              {"argmin_set", std::move(argmin)},
              {"objective", json(rep.objective)}};
}

namespace detail {

inline json opt_or_null(const std::optional<double>& x) {
  return x ? json(*x) : json(nullptr);
}

inline json opt_or_null(const std::optional<bool>& x) {
  return x ? json(*x) : json(nullptr);
}

}  // namespace detail

inline json report_to_json(const BoundsReport& rep) {
  json j{{"sigma0_value", json(rep.sigma0_value)},
         {"sigma0_answer", json(rep.sigma0_answer)},
         {"uniform_argmin_c", detail::opt_or_null(rep.uniform_argmin_c)},
         {"uniform_value", detail::opt_or_null(rep.uniform_value)},
         {"uniform_answer", detail::opt_or_null(rep.uniform_answer)},
         {"thm2_condition_holds", rep.thm_condition_holds},
         {"welch_value", rep.welch_value},
         {"count_bound", rep.count.bound},
         {"count_bound_valid", rep.count.valid},
         {"max_integer_count",
          rep.count.max_integer_count ? json(*rep.count.max_integer_count) : json(nullptr)},
         {"mu_condition_holds", rep.mu_condition_holds},
         {"mu_upper", detail::opt_or_null(rep.mu_upper)}};
  j["R_interval"] = rep.r_interval
                        ? json::array({rep.r_interval->first, rep.r_interval->second})
                        : json(nullptr);
  return j;
}

inline json report_to_json(const CertReport& rep) {
  json j{{"achieved_min", json(rep.achieved_min)},
         {"sigma0_target", json(rep.sigma0_target)},
         {"sigma0_gap", detail::opt_or_null(rep.sigma0_gap)},
         {"uniform_value", detail::opt_or_null(rep.uniform_value)},
         {"nonminimal_count", rep.nonminimal_count},
         {"count_bound", rep.count.bound},
         {"count_bound_valid", rep.count.valid},
         {"count_within_bound", detail::opt_or_null(rep.count_within_bound)},
         {"subset_welch_bound", detail::opt_or_null(rep.subset_welch_bound)},
         {"subset_max_sq_inner", detail::opt_or_null(rep.subset_max_sq_inner)},
         {"welch_consistent", rep.welch_consistent},
         {"block_scalable", rep.block_scalable},
         {"mu_gap", detail::opt_or_null(rep.mu_gap)},
         {"within_mu_bound", detail::opt_or_null(rep.within_mu_bound)}};
  // The mu sub-report is meaningful only when its R interval was computed
  // (first endpoint N*c1 > 0); otherwise the bound was never evaluated.
  if (rep.mu.r_interval.first > 0.0) {
    j["mu_condition_holds"] = rep.mu.condition_holds;
    j["mu_upper"] = detail::opt_or_null(rep.mu.mu_bound);
    j["R_interval"] = json::array({rep.mu.r_interval.first, rep.mu.r_interval.second});
  } else {
    j["mu_condition_holds"] = json(nullptr);
    j["mu_upper"] = json(nullptr);
    j["R_interval"] = json(nullptr);
  }
  return j;
}

inline json report_to_json(const OptResult& res) {
  json hist = json::array();
  for (const auto& [it, v] : res.history) hist.push_back(json::array({it, json(v)}));
  return json{{"min_value", json(res.best_report.min_value)},
              {"objective", json(res.best_report.objective)},
              {"restart_index", res.restart_index},
              {"converged", res.converged},
              {"nonminimal_norm_count", res.nonminimal_norm_count},
              {"history", std::move(hist)},
              {"best_report", report_to_json(res.best_report)},
              {"best_system", system_to_json(res.best_system)}};
}

/// Flattens a report object to deterministic key,value CSV lines: nested keys
/// joined with '.', array elements with ';' (inner arrays with ':'), null as
/// the empty string. Object keys come out sorted (nlohmann object order).
inline void flatten_to_csv(const json& j, const std::string& prefix, std::string& out) {
  const auto scalar = [](const json& v) -> std::string {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten_to_csv(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (j.is_array()) {
    std::string joined;
    for (const json& el : j) {
      if (!joined.empty()) joined += ';';
      if (el.is_array()) {
        std::string inner;
        for (const json& x : el) {
          if (!inner.empty()) inner += ':';
          inner += scalar(x);
        }
        joined += inner;
      } else {
        joined += scalar(el);
      }
    }
    out += prefix + "," + joined + "\n";
  } else {
    out += prefix + "," + scalar(j) + "\n";
  }
}

inline std::string report_to_csv(const json& report) {
  std::string out;
  flatten_to_csv(report, "", out);
  return out;
}

}  // namespace framelab
