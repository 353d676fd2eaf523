#ifndef DYNSAMP_CLI_REPORT_HPP
#define DYNSAMP_CLI_REPORT_HPP

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "dynsamp/cli/checks.hpp"
#include "dynsamp/cli/config.hpp"
#include "dynsamp/cli/json_io.hpp"

namespace dynsamp::cli {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct CheckRecord {
  std::string name;
  std::string label;  // config label, empty for single-config runs
  CheckOutcome outcome;
  double wall_time_ms = 0.0;
};

struct RunOptions {
  bool parallel = false;
  std::optional<double> tol;  // overrides tolerances.default
};

struct ExperimentReport {
  std::vector<ExperimentConfig> configs;
  std::vector<CheckRecord> checks;
  std::uint64_t seed = 0;
  std::string preset;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& r) { return r.outcome.pass; });
  }
};

inline unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs every config's checks in declared order. With `parallel`, checks run
/// concurrently but records keep the declared order.
inline ExperimentReport run_experiment(std::vector<ExperimentConfig> configs, const RunOptions& opts = {}) {
  if (configs.empty()) fail(ErrorKind::config_error, "no configs to run");
  if (opts.tol) {
    for (auto& c : configs) c.tolerances["default"] = *opts.tol;
  }
  ExperimentReport report;
  report.configs = std::move(configs);
  report.seed = report.configs.front().seed;

  struct Job {
    const ExperimentConfig* config;
    std::string name;
  };
  std::vector<Job> jobs;
  for (const auto& c : report.configs) {
    for (const auto& n : c.checks) jobs.push_back({&c, n});
  }
  auto run_one = [&](const Job& job, unsigned workers) {
    CheckRecord rec;
    rec.name = job.name;
    rec.label = job.config->label;
    const auto t0 = std::chrono::steady_clock::now();
    rec.outcome = run_check(job.name, CheckContext{*job.config, workers});
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
  };

  report.checks.resize(jobs.size());
  if (opts.parallel && jobs.size() > 1) {
    std::vector<std::future<CheckRecord>> futures;
    for (const Job& job : jobs) futures.push_back(std::async(std::launch::async, run_one, job, 1u));
    for (std::size_t i = 0; i < futures.size(); ++i) report.checks[i] = futures[i].get();
  } else {
    const unsigned workers = opts.parallel ? worker_count() : 1u;
    for (std::size_t i = 0; i < jobs.size(); ++i) report.checks[i] = run_one(jobs[i], workers);
  }
  return report;
}

inline json config_echo(const ExperimentReport& r) {
  json echo = json::array();
  for (const auto& c : r.configs) echo.push_back(config_to_json(c));
  return echo;
}

inline std::string config_hash(const ExperimentReport& r) { return hex64(fnv1a(config_echo(r).dump())); }

inline json check_to_json(const CheckRecord& rec, bool with_timing) {
  json j = {{"name", rec.name},
            {"inputs", rec.outcome.inputs},
            {"outputs", rec.outcome.outputs},
            {"margins", rec.outcome.margins},
            {"pass", rec.outcome.pass}};
  if (!rec.label.empty()) j["label"] = rec.label;
  if (with_timing) j["wall_time_ms"] = rec.wall_time_ms;
  return j;
}

/// Hash of everything in the report except timing fields.
inline std::string payload_hash(const ExperimentReport& r) {
  json checks = json::array();
  for (const auto& rec : r.checks) checks.push_back(check_to_json(rec, false));
  const json payload = {{"config_hash", config_hash(r)}, {"seed", r.seed}, {"tool_version", kToolVersion},
                        {"checks", checks}};
  return hex64(fnv1a(payload.dump()));
}

inline json report_to_json(const ExperimentReport& r) {
  json checks = json::array();
  Index passed = 0;
  for (const auto& rec : r.checks) {
    checks.push_back(check_to_json(rec, true));
    if (rec.outcome.pass) ++passed;
  }
  json j = {{"schema_version", kReportSchemaVersion},
            {"tool", "dynsamp"},
            {"tool_version", kToolVersion},
            {"seed", r.seed},
            {"config_hash", config_hash(r)},
            {"payload_hash", payload_hash(r)},
            {"configs", config_echo(r)},
            {"checks", checks},
            {"summary", {{"total", r.checks.size()}, {"passed", passed}, {"failed", static_cast<Index>(r.checks.size()) - passed}}},
            {"all_passed", r.all_passed()}};
  if (!r.preset.empty()) j["preset"] = r.preset;
  return j;
}

/// Structural validation of a persisted report; returns the list of problems.
inline std::vector<std::string> validate_report(const json& j) {
  std::vector<std::string> problems;
  auto need = [&](const json& obj, const char* key, auto pred, const char* type, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
      problems.push_back(where + "." + key + ": missing");
    } else if (!pred(obj.at(key))) {
      problems.push_back(where + "." + key + ": expected " + type);
    }
  };
  auto is_int = [](const json& x) { return x.is_number_integer(); };
  auto is_str = [](const json& x) { return x.is_string(); };
  auto is_arr = [](const json& x) { return x.is_array(); };
  auto is_obj = [](const json& x) { return x.is_object(); };
  auto is_bool = [](const json& x) { return x.is_boolean(); };
  auto is_num = [](const json& x) { return x.is_number(); };
  auto is_hash = [](const json& x) { return x.is_string() && x.get<std::string>().size() == 16; };

  need(j, "schema_version", is_int, "integer", "report");
  if (j.contains("schema_version") && j["schema_version"] != kReportSchemaVersion) {
    problems.push_back("report.schema_version: unsupported");
  }
  need(j, "tool", is_str, "string", "report");
  need(j, "tool_version", is_str, "string", "report");
  need(j, "seed", is_int, "integer", "report");
  need(j, "config_hash", is_hash, "16-digit hex string", "report");
  need(j, "payload_hash", is_hash, "16-digit hex string", "report");
  need(j, "configs", is_arr, "array", "report");
  need(j, "checks", is_arr, "array", "report");
  need(j, "summary", is_obj, "object", "report");
  need(j, "all_passed", is_bool, "boolean", "report");
  if (j.contains("configs") && j["configs"].is_array()) {
    for (std::size_t i = 0; i < j["configs"].size(); ++i) {
      try {
        (void)parse_config(j["configs"][i]);
      } catch (const Error& e) {
        problems.push_back("report.configs[" + std::to_string(i) + "]: " + e.what());
      }
    }
  }
  if (j.contains("checks") && j["checks"].is_array()) {
    for (std::size_t i = 0; i < j["checks"].size(); ++i) {
      const std::string where = "report.checks[" + std::to_string(i) + "]";
      const json& c = j["checks"][i];
      need(c, "name", is_str, "string", where);
      need(c, "inputs", is_obj, "object", where);
      need(c, "outputs", is_obj, "object", where);
      need(c, "margins", is_obj, "object", where);
      need(c, "pass", is_bool, "boolean", where);
      need(c, "wall_time_ms", is_num, "number", where);
    }
  }
  return problems;
}

namespace detail {

inline void flatten_numeric(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten_numeric(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten_numeric(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_boolean()) {
    out.emplace_back(prefix, j.get<bool>() ? "1" : "0");
  } else if (j.is_number()) {
    out.emplace_back(prefix, j.dump());
  } else if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "-inf" || s == "nan") out.emplace_back(prefix, s);
  }
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace detail

/// One row per numeric leaf: label,check,key,value.
inline std::string report_to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "label,check,key,value\n";
  for (const auto& rec : r.checks) {
    std::vector<std::pair<std::string, std::string>> rows;
    detail::flatten_numeric(rec.outcome.outputs, "outputs", rows);
    detail::flatten_numeric(rec.outcome.margins, "margins", rows);
    rows.emplace_back("pass", rec.outcome.pass ? "1" : "0");
    for (const auto& [k, v] : rows) {
      os << detail::csv_field(rec.label) << ',' << detail::csv_field(rec.name) << ',' << detail::csv_field(k) << ','
         << v << '\n';
    }
  }
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::config_error, "cannot write '" + path + "'");
  out << text;
}

/// Writes the report and, when DYNSAMP_CACHE is set, a copy named by config hash.
inline void persist_report(const ExperimentReport& r, const std::optional<std::string>& out_path, bool csv,
                           std::ostream& fallback) {
  const std::string json_text = report_to_json(r).dump(2) + "\n";
  const std::string text = csv ? report_to_csv(r) : json_text;
  if (out_path) {
    write_text(*out_path, text);
  } else {
    fallback << text;
  }
  if (const char* cache = std::getenv("DYNSAMP_CACHE"); cache && *cache) {
    write_text((std::filesystem::path(cache) / (config_hash(r) + ".json")).string(), json_text);
  }
}

}  // namespace dynsamp::cli

#endif  // DYNSAMP_CLI_REPORT_HPP
