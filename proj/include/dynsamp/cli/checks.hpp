#ifndef DYNSAMP_CLI_CHECKS_HPP
#define DYNSAMP_CLI_CHECKS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "dynsamp/cli/config.hpp"
#include "dynsamp/cli/json_io.hpp"
#include "dynsamp/frames.hpp"
#include "dynsamp/numkit.hpp"
#include "dynsamp/perturb.hpp"
#include "dynsamp/sampling.hpp"

namespace dynsamp::cli {

struct CheckOutcome {
  json inputs = json::object();
  json outputs = json::object();
  json margins = json::object();
  bool pass = false;
};

struct CheckContext {
  const ExperimentConfig& config;
  unsigned workers = 1;
};

namespace checks {

inline constexpr Index kMatrixEchoMaxDim = 16;

inline const Vector& first_generator(const ExperimentConfig& c) { return c.generators.front(); }

inline frames::VectorSystem config_orbit(const ExperimentConfig& c, std::optional<Index> horizon = std::nullopt) {
  return sampling::orbit(sampling::OrbitSpec{c.op, c.generators, c.weights, horizon.value_or(c.horizon)});
}

inline json maybe_matrix(const Matrix& m) { return m.rows() <= kMatrixEchoMaxDim ? matrix_to_json(m) : json(nullptr); }

inline CheckOutcome orbit_bounds(const CheckContext& ctx) {
  const auto& c = ctx.config;
  const frames::VectorSystem sys = config_orbit(c);
  CheckOutcome o;
  o.inputs = {{"horizon", c.horizon}, {"generator_count", c.generators.size()}};
  o.outputs["ambient"] = bounds_to_json(frames::frame_bounds(sys));
  o.outputs["span"] = bounds_to_json(frames::frame_bounds(sys, frames::BoundsRelativeTo::span));
  o.outputs["frame_operator"] = maybe_matrix(frames::frame_operator(sys));
  o.pass = true;
  return o;
}

inline CheckOutcome stein(const CheckContext& ctx) {
  const auto& c = ctx.config;
  const double tol = c.tol("stein", 1e-12);
  Matrix rhs = Matrix::Zero(c.dimension, c.dimension);
  double tail = 0.0;
  for (const Vector& g : c.generators) {
    rhs += g * g.adjoint();
    tail += sampling::truncation_tail_bound(c.op, g, c.horizon);
  }
  const numkit::SteinSolution sol = numkit::solve_stein(c.op, rhs, tol);
  const Matrix truncated =
      frames::frame_operator(sampling::orbit(sampling::OrbitSpec{c.op, c.generators, sampling::ConstantWeights{}, c.horizon}));
  const double trunc_err = (truncated - sol.s).norm();
  const RealVector eig = numkit::eig_hermitian(sol.s).values;

  CheckOutcome o;
  o.inputs = {{"horizon", c.horizon}, {"tol", tol}, {"weights", "ignored"}};
  o.outputs = {{"method", std::string(numkit::to_string(sol.method))},
               {"iterations", sol.iterations},
               {"residual", real_to_json(sol.residual)},
               {"eigenvalues", reals_to_json(eig)},
               {"positive_definite", eig(0) > 1e-10 * std::max(1.0, eig(eig.size() - 1))},
               {"krylov_rank", sampling::krylov_rank(c.op, first_generator(c))},
               {"truncation_error", real_to_json(trunc_err)},
               {"tail_bound", real_to_json(tail)},
               {"solution", maybe_matrix(sol.s)}};
  const double res_margin = tol * (1.0 + rhs.norm()) - sol.residual;
  const double tail_margin = std::isfinite(tail) ? tail + 1e-10 - trunc_err : 0.0;
  o.margins = {{"residual", real_to_json(res_margin)}, {"truncation", real_to_json(tail_margin)}};
  o.pass = res_margin >= 0.0 && tail_margin >= 0.0;
  return o;
}

inline CheckOutcome surjectivity(const CheckContext& ctx) {
  const auto& c = ctx.config;
  const Vector& phi = first_generator(c);
  const double tol = c.default_tol();
  const numkit::SteinSolution sol = sampling::orbit_frame_operator_exact(c.op, phi);
  const sampling::SurjectivityReport r = sampling::surjectivity_report(c.op, phi, sol.s, std::nullopt, tol);
  CheckOutcome o;
  o.inputs = {{"horizon", r.horizon}, {"tol", tol}};
  o.outputs = {
      {"criterion_i", {{"max_abs_inner_product", real_to_json(r.max_tail_inner_product)},
                       {"witness", r.witness ? json(*r.witness) : json(nullptr)},
                       {"surjective", r.verdicts[0]}}},
      {"criterion_ii", {{"range_distance", real_to_json(r.range_distance)}, {"surjective", r.verdicts[1]}}},
      {"criterion_iii", {{"adjoint_norm", real_to_json(r.adjoint_norm)}, {"surjective", r.verdicts[2]}}},
      {"criterion_iv", {{"value", real_to_json(r.inverse_sqrt_defect)},
                        {"inverse_sqrt_norm", real_to_json(r.inverse_sqrt_norm)},
                        {"surjective", r.verdicts[3]}}},
      {"ground_truth_surjective", r.ground_truth_surjective},
      {"consistent", r.consistent},
      {"tail_coefficient_energy", real_to_json(r.tail_coefficient_energy)},
      {"tail_synthesis_norm", real_to_json(r.tail_synthesis_norm)},
      {"coefficient_identity_gap", real_to_json(r.coefficient_identity_gap)}};
  o.pass = r.consistent;
  return o;
}

inline CheckOutcome periodic(const CheckContext& ctx) {
  const auto& c = ctx.config;
  const std::optional<Index> p = c.period ? c.period : sampling::find_period(c.op, 4096);
  if (!p) fail(ErrorKind::invalid_input, "periodic: operator has no period up to 4096");
  const Vector& phi = first_generator(c);
  const sampling::PeriodicModel m = sampling::periodic_orbit_model(c.op, phi, *p, c.seed);
  const double rel = c.tol("periodic", 1e-10);
  CheckOutcome o;
  o.inputs = {{"period", *p}, {"seed", c.seed}, {"samples", 20}};
  o.outputs = {{"bounds", bounds_to_json(m.bounds)},
               {"frame_sequence_branch", m.frame_sequence_branch},
               {"tst_residual", real_to_json(m.tst_residual)},
               {"u_unitarity_residual", real_to_json(m.u_unitarity_residual)},
               {"transformed_bounds", {real_to_json(m.transformed_lower), real_to_json(m.transformed_upper)}},
               {"frame_operator", maybe_matrix(m.s)}};
  o.margins = {{"tst", real_to_json(rel * m.s.norm() - m.tst_residual)},
               {"unitarity", real_to_json(rel - m.u_unitarity_residual)},
               {"sandwich_lower", real_to_json(m.sandwich_lower_margin)},
               {"sandwich_upper", real_to_json(m.sandwich_upper_margin)},
               {"transformed", real_to_json(m.transformed_margin)}};
  o.pass = m.tst_residual <= rel * m.s.norm() && m.u_unitarity_residual <= rel && m.sandwich_lower_margin >= -rel &&
           m.sandwich_upper_margin >= -rel && m.transformed_margin >= -rel;
  const bool unitary = (c.op.adjoint() * c.op - numkit::identity(c.dimension)).norm() <= 1e-10;
  if (unitary) {
    const sampling::CommutantResidual cr = sampling::commutant_transport(c.op, c.op, phi, *p);
    o.outputs["commutant_transport"] = {{"transport_residual", real_to_json(cr.transport_residual)},
                                        {"power_residual", real_to_json(cr.power_residual)}};
    o.pass = o.pass && cr.transport_residual <= rel * std::max(1.0, m.s.norm()) &&
             cr.power_residual <= rel * std::max(1.0, std::pow(m.s.norm(), 3.0));
  }
  return o;
}

inline CheckOutcome ratio_bound(const CheckContext& ctx) {
  const auto& c = ctx.config;
  const sampling::RatioBound r = sampling::ratio_bound_check(config_orbit(c));
  CheckOutcome o;
  o.inputs = {{"horizon", c.horizon}};
  o.outputs = {{"sup_ratio", real_to_json(r.sup_ratio)}, {"bound", real_to_json(r.bound)}};
  o.margins = {{"ratio", real_to_json(r.margin)}};
  o.pass = r.margin >= -1e-10;
  return o;
}

inline CheckOutcome kernel_invariance(const CheckContext& ctx) {
  const auto& c = ctx.config;
  const double tol = c.default_tol();
  const sampling::KernelInvarianceReport k = sampling::kernel_invariance_check(config_orbit(c), tol);
  const double ext = sampling::orbit_kernel_extension_defect(
      sampling::OrbitSpec{c.op, {first_generator(c)}, c.weights, c.horizon});
  CheckOutcome o;
  o.inputs = {{"horizon", c.horizon}, {"tol", tol}};
  o.outputs = {{"kernel_dim", k.kernel_dim},
               {"truncated_defect", real_to_json(k.defect)},
               {"truncated_invariant", k.invariant},
               {"truncated", k.truncated},
               {"max_dropped_coefficient", real_to_json(k.max_dropped_coefficient)},
               {"extension_defect", real_to_json(ext)}};
  o.margins = {{"extension", real_to_json(tol - ext)}};
  o.pass = ext <= tol;
  return o;
}

inline CheckOutcome representation(const CheckContext& ctx) {
  const auto& c = ctx.config;
  if (c.generators.size() != 1) fail(ErrorKind::invalid_input, "representation: single-generator orbits only");
  const frames::VectorSystem f = config_orbit(c);
  const frames::VectorSystem g = frames::canonical_dual(f);
  const std::vector<Complex> a = sampling::evaluate_weights(c.weights, c.horizon + 1);
  const Vector next = a.back() * (sampling::matrix_power(c.op, c.horizon) * first_generator(c));
  const double res = sampling::representation_residual(f, g, a, next);
  const double scale = std::max(1.0, numkit::operator_norm(frames::synthesis(f)));
  const double tol = c.default_tol();
  CheckOutcome o;
  o.inputs = {{"horizon", c.horizon}, {"dual", "canonical"}, {"tol", tol}};
  o.outputs = {{"residual", real_to_json(res)}};
  o.margins = {{"residual", real_to_json(tol * scale - res)}};
  o.pass = res <= tol * scale;
  return o;
}

inline CheckOutcome nogo_proxy(const CheckContext& ctx) {
  const auto& c = ctx.config;
  const Vector& phi = first_generator(c);
  const Index d = c.dimension;
  const std::vector<Index> horizons = {d, 4 * d, 16 * d};
  const std::vector<double> b = sampling::unitary_nogo_proxy(c.op, phi, horizons);
  CheckOutcome o;
  o.inputs = {{"horizons", horizons}};
  o.outputs = {{"upper_bounds", reals_to_json(b)}};
  double worst = std::numeric_limits<double>::infinity();
  json floors = json::array();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double floor = static_cast<double>(horizons[i]) * phi.squaredNorm() / static_cast<double>(d);
    floors.push_back(real_to_json(floor));
    worst = std::min(worst, b[i] - floor);
  }
  o.outputs["trace_floors"] = floors;
  o.margins = {{"pigeonhole", real_to_json(worst)}};
  o.pass = worst >= -1e-10;
  return o;
}

inline CheckOutcome riesz_profile(const CheckContext& ctx) {
  const auto& c = ctx.config;
  const std::vector<double> p = frames::lower_riesz_profile(config_orbit(c));
  double worst_rise = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) worst_rise = std::max(worst_rise, p[i] - p[i - 1]);
  CheckOutcome o;
  o.inputs = {{"horizon", c.horizon}};
  o.outputs = {{"profile", reals_to_json(p)},
               {"final_over_initial", real_to_json(p.front() > 0.0 ? p.back() / p.front() : 0.0)}};
  const double slack = 1e-12 * std::max(1.0, p.front());
  o.margins = {{"monotone", real_to_json(slack - worst_rise)}};
  o.pass = worst_rise <= slack;
  return o;
}

inline CheckOutcome iterated_frame_operator(const CheckContext& ctx) {
  const auto& c = ctx.config;
  const sampling::IteratedFrameCheck r =
      sampling::iterated_frame_operator_check(config_orbit(c), c.generators, c.horizon);
  CheckOutcome o;
  o.inputs = {{"horizon", c.horizon}};
  o.outputs = {{"lower_bound", real_to_json(r.lower_bound)},
               {"prefix_upper_bounds", reals_to_json(r.prefix_upper_bounds)},
               {"growth_ratio", real_to_json(r.growth_ratio)},
               {"verdict", std::string(sampling::to_string(r.verdict))}};
  o.pass = r.verdict != sampling::IteratedVerdict::contradiction;
  return o;
}

/// lambda_k = 1 - 2^{-k}, k = 1..d.
inline Vector aldroubi_diagonal(Index d) {
  Vector v(d);
  for (Index k = 1; k <= d; ++k) v(k - 1) = 1.0 - std::ldexp(1.0, -static_cast<int>(k));
  return v;
}

/// b_k = sqrt(1 - lambda_k^2).
inline Vector aldroubi_generator(Index d) {
  const Vector lam = aldroubi_diagonal(d);
  Vector b(d);
  for (Index k = 0; k < d; ++k) b(k) = std::sqrt(1.0 - std::norm(lam(k)));
  return b;
}

inline CheckOutcome repro_aldroubi(const CheckContext& ctx) {
  const auto& c = ctx.config;
  const Matrix& t = c.op;
  if ((t - Matrix(t.diagonal().asDiagonal())).norm() != 0.0) {
    fail(ErrorKind::invalid_input, "repro-aldroubi: operator must be diagonal");
  }
  const double tol = c.tol("exact", 1e-12);
  const frames::VectorSystem basis(numkit::identity(c.dimension));
  const frames::VectorSystem f = sampling::frame_from_positive_operator(t, basis);
  const double err = (frames::frame_operator(f) - t).cwiseAbs().maxCoeff();

  CheckOutcome o;
  o.inputs = {{"dimension", c.dimension}, {"tol", tol}};
  o.outputs["frame_operator_max_error"] = real_to_json(err);
  o.margins["frame_operator"] = real_to_json(tol - err);
  bool pass = err <= tol;

  std::vector<Index> dims = {4, 8, 16, 32};
  if (std::find(dims.begin(), dims.end(), c.dimension) == dims.end()) dims.push_back(c.dimension);
  std::sort(dims.begin(), dims.end());
  json sweep = json::array();
  double prev_min = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (Index d : dims) {
    const Matrix s = sampling::orbit_frame_operator_diagonal(aldroubi_diagonal(d), aldroubi_generator(d));
    const RealVector ev = numkit::eig_hermitian(s).values;
    const double norm_t = aldroubi_diagonal(d).cwiseAbs().maxCoeff();
    sweep.push_back({{"dim", d},
                     {"lambda_min", real_to_json(ev(0))},
                     {"lambda_max", real_to_json(ev(d - 1))},
                     {"operator_norm", real_to_json(norm_t)},
                     {"one_minus_norm", real_to_json(std::ldexp(1.0, -static_cast<int>(d)))}});
    monotone = monotone && ev(0) > 0.0 && ev(0) <= prev_min * (1.0 + 1e-12);
    prev_min = ev(0);
  }
  o.outputs["sweep"] = sweep;
  o.outputs["lambda_min_non_increasing"] = monotone;
  o.pass = pass && monotone;
  return o;
}

inline json certificate_to_json(const perturb::Certificate& cert) {
  json hv = json::object();
  for (const auto& [k, v] : cert.hypothesis_values) hv[k] = real_to_json(v);
  return {{"name", std::string(perturb::to_string(cert.name))},
          {"form", cert.form},
          {"hypothesis_values", hv},
          {"margin", real_to_json(cert.margin)},
          {"verdict", cert.verdict},
          {"conclusion_check", cert.conclusion_check ? bounds_to_json(*cert.conclusion_check) : json(nullptr)},
          {"conclusion_holds", cert.conclusion_holds ? json(*cert.conclusion_holds) : json(nullptr)}};
}

inline Matrix subspace_basis(const std::optional<std::vector<Vector>>& vs, Index dim) {
  if (!vs) return numkit::identity(dim);
  Matrix m(dim, static_cast<Index>(vs->size()));
  for (std::size_t i = 0; i < vs->size(); ++i) m.col(static_cast<Index>(i)) = (*vs)[i];
  return numkit::orthonormal_range(m);
}

inline CheckOutcome perturbation(const CheckContext& ctx, perturb::CertificateName name) {
  const auto& c = ctx.config;
  const PerturbationSpec ps = c.perturbation.value_or(PerturbationSpec{});
  const Index n = ps.horizon.value_or(c.horizon);
  const Matrix v = subspace_basis(ps.subspace, c.dimension);
  const Matrix w_op = ps.second_operator ? build_operator(*ps.second_operator, c.dimension) : c.op;
  const Matrix w_v = ps.second_subspace ? subspace_basis(ps.second_subspace, c.dimension) : v;
  const Vector psi = ps.psi.value_or(Vector::Zero(c.dimension));
  const Vector& phi = first_generator(c);
  const double tol = c.default_tol();

  std::vector<perturb::Certificate> certs;
  using perturb::CertificateName;
  switch (name) {
    case CertificateName::riesz_orbit_perturbation:
      certs.push_back(perturb::riesz_perturbation_certificate(perturb::contraction_data(c.op, v, tol), phi, psi, n, tol));
      break;
    case CertificateName::weighted_frame_perturbation:
      certs.push_back(perturb::weighted_frame_perturbation_certificate(perturb::contraction_data(c.op, v, tol), phi,
                                                                       psi, c.weights, n, tol));
      break;
    case CertificateName::scaled_generator_perturbation:
      certs.push_back(perturb::scaled_generator_perturbation_certificate(c.op, phi, psi, c.weights, n));
      break;
    case CertificateName::multi_generator_riesz:
      certs.push_back(perturb::multi_generator_riesz_certificate(perturb::contraction_data(w_op, w_v, tol),
                                                                 perturb::contraction_data(c.op, v, tol),
                                                                 c.generators, n, tol));
      break;
    case CertificateName::two_operator_frame:
    case CertificateName::two_operator_riesz_sum: {
      const auto out = perturb::two_operator_certificates(perturb::contraction_data(c.op, v, tol),
                                                          perturb::contraction_data(w_op, w_v, tol), phi, n, tol);
      for (const auto* cert : {&out.frame_cert, &out.sum_cert, &out.riesz_cert}) {
        if (*cert) certs.push_back(**cert);
      }
      break;
    }
  }
  CheckOutcome o;
  o.inputs = {{"horizon", n}, {"psi", vector_to_json(psi)}, {"tol", tol}};
  o.outputs["certificates"] = json::array();
  bool pass = true;
  for (const auto& cert : certs) {
    o.outputs["certificates"].push_back(certificate_to_json(cert));
    o.margins[std::string(perturb::to_string(cert.name)) + "/" + cert.form] = real_to_json(cert.margin);
    if (cert.verdict) pass = pass && cert.conclusion_holds.value_or(false);
  }
  o.pass = pass;
  return o;
}

inline CheckOutcome satisfiability(const CheckContext& ctx, perturb::CertificateName name) {
  const auto& c = ctx.config;
  const perturb::SearchReport r = perturb::satisfiability_search(name, c.trials, c.seed, ctx.workers);
  CheckOutcome o;
  o.inputs = {{"certificate", std::string(perturb::to_string(name))}, {"trials", c.trials}, {"seed", c.seed}};
  json sat = json::array();
  bool conclusions_ok = true;
  for (const auto& rec : r.satisfying_instances) {
    sat.push_back({{"trial", rec.trial}, {"dim", rec.dim}, {"margin", real_to_json(rec.margin)}});
    if (rec.conclusion_holds && !*rec.conclusion_holds) conclusions_ok = false;
  }
  json margins = json::array();
  for (const auto& rec : r.trials) margins.push_back(real_to_json(rec.margin));
  o.outputs = {{"tried", r.tried},
               {"skipped", r.skipped},
               {"satisfying_count", r.satisfying_instances.size()},
               {"satisfying_instances", sat},
               {"max_margin", real_to_json(r.max_margin)},
               {"trial_margins", margins}};
  o.margins = {{"max_margin", real_to_json(r.max_margin)}};
  bool pass = conclusions_ok;
  if (auto it = c.expect_satisfiable.find(std::string(perturb::to_string(name))); it != c.expect_satisfiable.end()) {
    o.inputs["expect_satisfiable"] = it->second;
    pass = pass && (it->second == !r.satisfying_instances.empty());
  }
  o.pass = pass;
  return o;
}

}  // namespace checks

/// Runs one named check. Library errors become a failed outcome with the
/// error text in outputs.error.
inline CheckOutcome run_check(const std::string& name, const CheckContext& ctx) {
  try {
    if (name == "orbit-bounds") return checks::orbit_bounds(ctx);
    if (name == "stein") return checks::stein(ctx);
    if (name == "surjectivity") return checks::surjectivity(ctx);
    if (name == "periodic") return checks::periodic(ctx);
    if (name == "ratio-bound") return checks::ratio_bound(ctx);
    if (name == "kernel-invariance") return checks::kernel_invariance(ctx);
    if (name == "representation") return checks::representation(ctx);
    if (name == "nogo-proxy") return checks::nogo_proxy(ctx);
    if (name == "riesz-profile") return checks::riesz_profile(ctx);
    if (name == "iterated-frame-operator") return checks::iterated_frame_operator(ctx);
    if (name == "repro-aldroubi") return checks::repro_aldroubi(ctx);
    if (name.rfind("perturbation:", 0) == 0) {
      return checks::perturbation(ctx, *perturb::certificate_from_string(name.substr(13)));
    }
    if (name.rfind("satisfiability:", 0) == 0) {
      return checks::satisfiability(ctx, *perturb::certificate_from_string(name.substr(15)));
    }
  } catch (const Error& e) {
    CheckOutcome o;
    o.outputs = {{"error", e.what()}, {"error_kind", std::string(to_string(e.kind()))}};
    o.pass = false;
    return o;
  }
  fail(ErrorKind::config_error, "unknown check '" + name + "'");
}

}  // namespace dynsamp::cli

#endif  // DYNSAMP_CLI_CHECKS_HPP
