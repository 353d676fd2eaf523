#ifndef DYNSAMP_CLI_CONFIG_HPP
#define DYNSAMP_CLI_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dynsamp/cli/json_io.hpp"
#include "dynsamp/perturb.hpp"
#include "dynsamp/sampling.hpp"

namespace dynsamp::cli {

inline constexpr int kConfigSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Operator specs
//
//   {"diagonal": [z, ...]}
//   {"nilpotent_shift": n}      (n may be omitted at top level: "nilpotent_shift")
//   {"circulant": [r_0, ..., r_{n-1}]}   C_ij = r_{(j - i) mod n}
//   {"dense": [z_00, z_01, ...]}         row-major, n^2 entries
//   {"block_diag": [spec, ...]}

namespace detail {

inline Index spec_size(const json& spec, std::optional<Index> hint, const std::string& where);

inline Matrix build_operator(const json& spec, std::optional<Index> hint, const std::string& where) {
  if (spec.is_string()) {
    if (spec.get<std::string>() != "nilpotent_shift") {
      fail(ErrorKind::config_error, where + ": unknown operator kind '" + spec.get<std::string>() + "'");
    }
    return build_operator(json{{"nilpotent_shift", nullptr}}, hint, where);
  }
  if (!spec.is_object() || spec.size() != 1) {
    fail(ErrorKind::config_error, where + ": operator spec must be an object with exactly one kind");
  }
  const auto& [kind, body] = *spec.items().begin();
  const Index n = spec_size(spec, hint, where);
  Matrix m = Matrix::Zero(n, n);
  if (kind == "diagonal") {
    const Vector d = vector_from_json(body, where + ".diagonal");
    m.diagonal() = d;
  } else if (kind == "nilpotent_shift") {
    for (Index i = 0; i + 1 < n; ++i) m(i + 1, i) = 1.0;
  } else if (kind == "circulant") {
    const Vector r = vector_from_json(body, where + ".circulant");
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) m(i, j) = r(((j - i) % n + n) % n);
    }
  } else if (kind == "dense") {
    const Vector flat = vector_from_json(body, where + ".dense");
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) m(i, j) = flat(i * n + j);
    }
  } else if (kind == "block_diag") {
    Index offset = 0;
    for (std::size_t b = 0; b < body.size(); ++b) {
      const std::string sub = where + ".block_diag[" + std::to_string(b) + "]";
      const Matrix blk = build_operator(body[b], std::nullopt, sub);
      m.block(offset, offset, blk.rows(), blk.cols()) = blk;
      offset += blk.rows();
    }
  } else {
    fail(ErrorKind::config_error, where + ": unknown operator kind '" + kind + "'");
  }
  return m;
}

inline Index spec_size(const json& spec, std::optional<Index> hint, const std::string& where) {
  const auto& [kind, body] = *spec.items().begin();
  if (kind == "diagonal" || kind == "circulant") {
    if (!body.is_array() || body.empty()) fail(ErrorKind::config_error, where + "." + kind + ": expected a nonempty list");
    return static_cast<Index>(body.size());
  }
  if (kind == "nilpotent_shift") {
    if (body.is_number_integer() && body.get<long long>() >= 1) return static_cast<Index>(body.get<long long>());
    if ((body.is_null() || body.is_boolean()) && hint) return *hint;
    fail(ErrorKind::config_error, where + ".nilpotent_shift: size required inside block_diag");
  }
  if (kind == "dense") {
    if (!body.is_array() || body.empty()) fail(ErrorKind::config_error, where + ".dense: expected a nonempty list");
    const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(body.size()))));
    if (n * n != static_cast<Index>(body.size())) {
      fail(ErrorKind::config_error, where + ".dense: entry count is not a perfect square");
    }
    return n;
  }
  if (kind == "block_diag") {
    if (!body.is_array() || body.empty()) fail(ErrorKind::config_error, where + ".block_diag: expected a nonempty list");
    Index total = 0;
    for (std::size_t b = 0; b < body.size(); ++b) {
      const std::string sub = where + ".block_diag[" + std::to_string(b) + "]";
      if (body[b].is_string()) fail(ErrorKind::config_error, sub + ": nilpotent_shift needs an explicit size here");
      if (!body[b].is_object() || body[b].size() != 1) fail(ErrorKind::config_error, sub + ": malformed operator spec");
      total += spec_size(body[b], std::nullopt, sub);
    }
    return total;
  }
  fail(ErrorKind::config_error, where + ": unknown operator kind '" + kind + "'");
}

}  // namespace detail

inline Matrix build_operator(const json& spec, Index dimension, const std::string& where = "operator") {
  const Matrix m = detail::build_operator(spec, dimension, where);
  if (m.rows() != dimension) {
    fail(ErrorKind::config_error, where + ": operator has size " + std::to_string(m.rows()) +
                                      " but dimension is " + std::to_string(dimension));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Weights

inline sampling::WeightSpec weights_from_json(const json& j) {
  if (!j.is_object() || j.size() != 1) {
    fail(ErrorKind::config_error, "weights: expected one of {constant: c}, {geometric: r}, {explicit: [...]}");
  }
  const auto& [kind, body] = *j.items().begin();
  if (kind == "constant") return sampling::ConstantWeights{complex_from_json(body, "weights.constant")};
  if (kind == "geometric") return sampling::GeometricWeights{complex_from_json(body, "weights.geometric")};
  if (kind == "explicit") {
    const Vector v = vector_from_json(body, "weights.explicit");
    return sampling::ExplicitWeights{std::vector<Complex>(v.data(), v.data() + v.size())};
  }
  fail(ErrorKind::config_error, "weights: unknown kind '" + kind + "'");
}

inline json weights_to_json(const sampling::WeightSpec& w) {
  if (const auto* c = std::get_if<sampling::ConstantWeights>(&w)) return {{"constant", complex_to_json(c->value)}};
  if (const auto* g = std::get_if<sampling::GeometricWeights>(&w)) return {{"geometric", complex_to_json(g->ratio)}};
  const auto& e = std::get<sampling::ExplicitWeights>(w);
  json list = json::array();
  for (const Complex& z : e.values) list.push_back(complex_to_json(z));
  return {{"explicit", list}};
}

// ---------------------------------------------------------------------------
// Config

/// Extra inputs for perturbation:<certificate> checks. The second operator
/// plays W in the two-operator and multi-generator certificates.
struct PerturbationSpec {
  std::optional<std::vector<Vector>> subspace;  // spans V; default the whole space
  std::optional<Vector> psi;                    // default 0
  std::optional<json> second_operator;          // default: same operator
  std::optional<std::vector<Vector>> second_subspace;
  std::optional<Index> horizon;                 // default: config horizon
};

struct ExperimentConfig {
  std::string label;
  Index dimension = 0;
  json operator_spec;
  Matrix op;
  std::vector<Vector> generators;
  sampling::WeightSpec weights = sampling::ConstantWeights{};
  Index horizon = 1;
  std::vector<std::string> checks;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  std::optional<Index> period;
  Index trials = 1000;
  std::optional<PerturbationSpec> perturbation;
  std::map<std::string, bool> expect_satisfiable;

  double tol(const std::string& key, double fallback) const {
    if (auto it = tolerances.find(key); it != tolerances.end()) return it->second;
    return fallback;
  }
  double default_tol() const { return tol("default", 1e-8); }
};

inline const std::vector<std::string>& plain_check_names() {
  static const std::vector<std::string> names = {
      "orbit-bounds", "stein",       "surjectivity", "periodic",       "ratio-bound",           "kernel-invariance",
      "representation", "nogo-proxy", "riesz-profile", "repro-aldroubi", "iterated-frame-operator"};
  return names;
}

inline bool is_known_check(const std::string& name) {
  for (const auto& n : plain_check_names()) {
    if (n == name) return true;
  }
  for (const std::string prefix : {"perturbation:", "satisfiability:"}) {
    if (name.rfind(prefix, 0) == 0) return perturb::certificate_from_string(name.substr(prefix.size())).has_value();
  }
  return false;
}

namespace detail {

inline const json& require_key(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::config_error, std::string("missing required field '") + key + "'");
  return j.at(key);
}

inline Index require_positive_int(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 1) fail(ErrorKind::config_error, what + ": expected an integer >= 1");
  return static_cast<Index>(j.get<long long>());
}

inline std::vector<Vector> vectors_from_json(const json& j, Index dim, const std::string& what) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::config_error, what + ": expected a nonempty list of vectors");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = what + "[" + std::to_string(i) + "]";
    Vector v = vector_from_json(j[i], w);
    if (v.size() != dim) {
      fail(ErrorKind::config_error, w + ": length " + std::to_string(v.size()) + " differs from dimension " +
                                        std::to_string(dim));
    }
    out.push_back(std::move(v));
  }
  return out;
}

inline json vectors_to_json(const std::vector<Vector>& vs) {
  json out = json::array();
  for (const Vector& v : vs) out.push_back(vector_to_json(v));
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) fail(ErrorKind::config_error, "config must be a JSON object");
  static const std::vector<std::string> allowed = {"schema_version", "label",  "dimension",  "operator",
                                                   "generators",     "weights", "horizon",   "checks",
                                                   "tolerances",     "seed",    "period",    "trials",
                                                   "perturbation",   "expect_satisfiable"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorKind::config_error, "unknown config field '" + key + "'");
    }
  }
  if (j.contains("schema_version") && j["schema_version"] != kConfigSchemaVersion) {
    fail(ErrorKind::config_error, "unsupported schema_version");
  }
  ExperimentConfig c;
  if (j.contains("label")) {
    if (!j["label"].is_string()) fail(ErrorKind::config_error, "label: expected a string");
    c.label = j["label"].get<std::string>();
  }
  c.dimension = detail::require_positive_int(detail::require_key(j, "dimension"), "dimension");
  c.operator_spec = detail::require_key(j, "operator");
  c.op = build_operator(c.operator_spec, c.dimension);
  c.generators = detail::vectors_from_json(detail::require_key(j, "generators"), c.dimension, "generators");
  c.horizon = detail::require_positive_int(detail::require_key(j, "horizon"), "horizon");
  if (j.contains("weights")) c.weights = weights_from_json(j["weights"]);
  try {
    // horizon + 1 scalars: the scaled-generator certificate and the
    // representation check read one weight past the horizon.
    const auto* ex = std::get_if<sampling::ExplicitWeights>(&c.weights);
    const Index count = ex ? std::min<Index>(static_cast<Index>(ex->values.size()), c.horizon + 1) : c.horizon + 1;
    if (ex && static_cast<Index>(ex->values.size()) < c.horizon) {
      fail(ErrorKind::config_error, "weights.explicit: need at least horizon = " + std::to_string(c.horizon) + " scalars");
    }
    (void)sampling::evaluate_weights(c.weights, count);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config_error) throw;
    fail(ErrorKind::config_error, std::string(e.what()) +
                                      " (every scalar a_n in a scaled orbit {a_n T^n phi} must be nonzero)");
  }

  const json& checks = detail::require_key(j, "checks");
  if (!checks.is_array()) fail(ErrorKind::config_error, "checks: expected a list of names");
  for (const auto& n : checks) {
    if (!n.is_string()) fail(ErrorKind::config_error, "checks: names must be strings");
    const std::string name = n.get<std::string>();
    if (!is_known_check(name)) fail(ErrorKind::config_error, "unknown check '" + name + "'");
    c.checks.push_back(name);
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) fail(ErrorKind::config_error, "tolerances: expected an object");
    for (const auto& [key, val] : j["tolerances"].items()) {
      const double t = real_from_json(val, "tolerances." + key);
      if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorKind::config_error, "tolerances." + key + ": must be positive");
      c.tolerances[key] = t;
    }
  }
  if (j.contains("seed")) {
    const json& seed = j["seed"];
    const bool nonnegative = seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<std::int64_t>() >= 0);
    if (!nonnegative) fail(ErrorKind::config_error, "seed: expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("period")) c.period = detail::require_positive_int(j["period"], "period");
  if (j.contains("trials")) c.trials = detail::require_positive_int(j["trials"], "trials");
  if (j.contains("perturbation")) {
    const json& p = j["perturbation"];
    if (!p.is_object()) fail(ErrorKind::config_error, "perturbation: expected an object");
    PerturbationSpec ps;
    for (const auto& [key, val] : p.items()) {
      if (key == "subspace") {
        ps.subspace = detail::vectors_from_json(val, c.dimension, "perturbation.subspace");
      } else if (key == "second_subspace") {
        ps.second_subspace = detail::vectors_from_json(val, c.dimension, "perturbation.second_subspace");
      } else if (key == "psi") {
        ps.psi = detail::vectors_from_json(json::array({val}), c.dimension, "perturbation.psi").front();
      } else if (key == "second_operator") {
        (void)build_operator(val, c.dimension, "perturbation.second_operator");
        ps.second_operator = val;
      } else if (key == "horizon") {
        ps.horizon = detail::require_positive_int(val, "perturbation.horizon");
      } else {
        fail(ErrorKind::config_error, "unknown perturbation field '" + key + "'");
      }
    }
    c.perturbation = std::move(ps);
  }
  if (j.contains("expect_satisfiable")) {
    if (!j["expect_satisfiable"].is_object()) fail(ErrorKind::config_error, "expect_satisfiable: expected an object");
    for (const auto& [key, val] : j["expect_satisfiable"].items()) {
      if (!perturb::certificate_from_string(key)) fail(ErrorKind::config_error, "expect_satisfiable: unknown certificate '" + key + "'");
      if (!val.is_boolean()) fail(ErrorKind::config_error, "expect_satisfiable." + key + ": expected a boolean");
      c.expect_satisfiable[key] = val.get<bool>();
    }
  }
  return c;
}

/// Canonical echo; parse_config(config_to_json(c)) reproduces c.
inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  if (!c.label.empty()) j["label"] = c.label;
  j["dimension"] = c.dimension;
  j["operator"] = c.operator_spec;
  j["generators"] = detail::vectors_to_json(c.generators);
  j["weights"] = weights_to_json(c.weights);
  j["horizon"] = c.horizon;
  j["checks"] = c.checks;
  json tol = json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  j["tolerances"] = tol;
  j["seed"] = c.seed;
  if (c.period) j["period"] = *c.period;
  j["trials"] = c.trials;
  if (c.perturbation) {
    json p = json::object();
    const auto& ps = *c.perturbation;
    if (ps.subspace) p["subspace"] = detail::vectors_to_json(*ps.subspace);
    if (ps.second_subspace) p["second_subspace"] = detail::vectors_to_json(*ps.second_subspace);
    if (ps.psi) p["psi"] = vector_to_json(*ps.psi);
    if (ps.second_operator) p["second_operator"] = *ps.second_operator;
    if (ps.horizon) p["horizon"] = *ps.horizon;
    j["perturbation"] = p;
  }
  if (!c.expect_satisfiable.empty()) {
    json e = json::object();
    for (const auto& [k, v] : c.expect_satisfiable) e[k] = v;
    j["expect_satisfiable"] = e;
  }
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config_error, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::config_error, "'" + path + "' is not valid JSON: " + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

}  // namespace dynsamp::cli

#endif  // DYNSAMP_CLI_CONFIG_HPP
