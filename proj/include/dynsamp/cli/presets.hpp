#ifndef DYNSAMP_CLI_PRESETS_HPP
#define DYNSAMP_CLI_PRESETS_HPP

#include <optional>
#include <string>
#include <vector>

#include "dynsamp/cli/checks.hpp"
#include "dynsamp/cli/config.hpp"

namespace dynsamp::cli {

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"aldroubi-diagonal", "shift-orbit", "circulant-zmodel",
                                                 "perturbation-gallery", "vacuity-search"};
  return names;
}

namespace detail {

inline json coordinate(Index dim, Index k, double scale = 1.0) {
  json v = json::array();
  for (Index i = 0; i < dim; ++i) v.push_back(i == k ? scale : 0.0);
  return v;
}

inline json real_list(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i).real());
  return out;
}

inline std::vector<json> preset_jsons(const std::string& name, std::optional<Index> dim, std::uint64_t seed) {
  if (name == "aldroubi-diagonal") {
    const Index d = dim.value_or(16);
    return {{{"label", "aldroubi-diagonal"},
             {"dimension", d},
             {"operator", {{"diagonal", real_list(checks::aldroubi_diagonal(d))}}},
             {"generators", json::array({real_list(checks::aldroubi_generator(d))})},
             {"horizon", d},
             {"checks", json::array({"repro-aldroubi"})},
             {"seed", seed}}};
  }
  if (name == "shift-orbit") {
    const Index d = dim.value_or(3);
    return {{{"label", "shift-orbit"},
             {"dimension", d},
             {"operator", "nilpotent_shift"},
             {"generators", json::array({coordinate(d, 0)})},
             {"weights", {{"geometric", 0.5}}},
             {"horizon", d},
             {"checks", {"orbit-bounds", "stein", "surjectivity", "ratio-bound", "kernel-invariance",
                         "representation", "riesz-profile"}},
             {"seed", seed}}};
  }
  if (name == "circulant-zmodel") {
    const Index d = dim.value_or(3);
    json row = coordinate(d, d - 1);  // T delta_k = delta_{k+1 mod d}
    json phi = coordinate(d, 0);
    if (d > 1) phi[1] = 1.0;
    return {{{"label", "circulant-zmodel"},
             {"dimension", d},
             {"operator", {{"circulant", row}}},
             {"generators", json::array({phi})},
             {"horizon", d},
             {"period", d},
             {"checks", {"periodic", "orbit-bounds", "nogo-proxy"}},
             {"seed", seed}}};
  }
  if (name == "perturbation-gallery") {
    const json block = {{"block_diag", json::array({{{"nilpotent_shift", 2}}, {{"diagonal", json::array({0.5})}}})}};
    return {
        {{"label", "riesz-block"},
         {"dimension", 3},
         {"operator", block},
         {"generators", json::array({coordinate(3, 0)})},
         {"horizon", 2},
         {"checks", json::array({"perturbation:riesz_orbit_perturbation"})},
         {"perturbation", {{"subspace", json::array({coordinate(3, 2)})}, {"psi", coordinate(3, 2, 0.4)}}},
         {"seed", seed}},
        {{"label", "weighted-block"},
         {"dimension", 3},
         {"operator", block},
         {"generators", json::array({coordinate(3, 0)})},
         {"horizon", 8},
         {"checks", json::array({"perturbation:weighted_frame_perturbation"})},
         {"perturbation", {{"subspace", json::array({coordinate(3, 2)})}, {"psi", coordinate(3, 2, 0.5)}}},
         {"seed", seed}},
        {{"label", "scaled-shift"},
         {"dimension", 2},
         {"operator", "nilpotent_shift"},
         {"generators", json::array({coordinate(2, 0)})},
         {"horizon", 2},
         {"checks", json::array({"perturbation:scaled_generator_perturbation"})},
         {"perturbation", {{"psi", coordinate(2, 0, 0.1)}}},
         {"seed", seed}},
        {{"label", "two-operator-scalar"},
         {"dimension", 1},
         {"operator", {{"diagonal", json::array({0.5})}}},
         {"generators", json::array({json::array({1.0})})},
         {"horizon", 64},
         {"checks", json::array({"perturbation:two_operator_frame"})},
         {"perturbation", {{"second_operator", {{"diagonal", json::array({0.25})}}}}},
         {"seed", seed}},
        {{"label", "multi-generator-scalar"},
         {"dimension", 1},
         {"operator", {{"diagonal", json::array({0.25})}}},
         {"generators", json::array({json::array({1.0})})},
         {"horizon", 1},
         {"checks", json::array({"perturbation:multi_generator_riesz"})},
         {"perturbation", {{"second_operator", {{"diagonal", json::array({0.5})}}}}},
         {"seed", seed}}};
  }
  if (name == "vacuity-search") {
    return {{{"label", "vacuity-search"},
             {"dimension", 1},
             {"operator", {{"diagonal", json::array({0.5})}}},
             {"generators", json::array({json::array({1.0})})},
             {"horizon", 1},
             {"trials", 1000},
             {"checks", {"satisfiability:multi_generator_riesz", "satisfiability:two_operator_frame",
                         "satisfiability:riesz_orbit_perturbation"}},
             {"expect_satisfiable",
              {{"multi_generator_riesz", false}, {"two_operator_frame", false}, {"riesz_orbit_perturbation", true}}},
             {"seed", seed}}};
  }
  fail(ErrorKind::config_error, "unknown preset '" + name + "'");
}

}  // namespace detail

/// Curated configs for a preset; `dim` applies to the single-family presets.
inline std::vector<ExperimentConfig> preset_configs(const std::string& name, std::optional<Index> dim = std::nullopt,
                                                    std::uint64_t seed = 0) {
  if (dim && *dim < 1) fail(ErrorKind::config_error, "--dim must be >= 1");
  std::vector<ExperimentConfig> out;
  for (const json& j : detail::preset_jsons(name, dim, seed)) out.push_back(parse_config(j));
  return out;
}

}  // namespace dynsamp::cli

#endif  // DYNSAMP_CLI_PRESETS_HPP
