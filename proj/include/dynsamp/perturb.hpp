#ifndef DYNSAMP_PERTURB_HPP
#define DYNSAMP_PERTURB_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dynsamp/frames.hpp"
#include "dynsamp/numkit.hpp"
#include "dynsamp/random.hpp"
#include "dynsamp/sampling.hpp"

namespace dynsamp::perturb {

using frames::BoundsReport;
using frames::BoundsRelativeTo;
using frames::VectorSystem;

/// Invariant subspace V of T on which T contracts by mu < 1.
struct ContractionData {
  Matrix t;
  Matrix v_basis;  // orthonormal columns
  double mu = 0.0;
  double invariance_defect = 0.0;  // ||(I - P_V) T P_V||
};

inline ContractionData contraction_data(const Matrix& t, const Matrix& v_basis, double tol = 1e-10) {
  numkit::require_square(t, "contraction_data operator");
  if (v_basis.rows() != t.rows() || v_basis.cols() < 1) {
    fail(ErrorKind::invalid_input, "contraction_data: subspace basis has the wrong shape");
  }
  if ((v_basis.adjoint() * v_basis - numkit::identity(v_basis.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    fail(ErrorKind::invalid_input, "contraction_data: subspace basis is not orthonormal");
  }
  ContractionData cd{t, v_basis, 0.0, 0.0};
  const Matrix tv = t * v_basis;
  cd.invariance_defect = numkit::operator_norm(tv - v_basis * (v_basis.adjoint() * tv));
  if (cd.invariance_defect > tol) {
    fail(ErrorKind::invalid_hypothesis,
         "contraction_data: V is not invariant under T (defect " + std::to_string(cd.invariance_defect) + ")");
  }
  cd.mu = numkit::operator_norm(tv);
  if (!(cd.mu < 1.0)) {
    fail(ErrorKind::invalid_hypothesis, "contraction_data: T does not contract V (mu = " + std::to_string(cd.mu) + ")");
  }
  return cd;
}

inline double distance_to_subspace(const Matrix& v_basis, const Vector& x) {
  return (x - v_basis * (v_basis.adjoint() * x)).norm();
}

inline bool in_subspace(const Matrix& v_basis, const Vector& x, double tol = 1e-10) {
  return distance_to_subspace(v_basis, x) <= tol * std::max(1.0, x.norm());
}

enum class CertificateName {
  riesz_orbit_perturbation,
  weighted_frame_perturbation,
  scaled_generator_perturbation,
  multi_generator_riesz,
  two_operator_frame,
  two_operator_riesz_sum,
};

inline std::string_view to_string(CertificateName n) {
  switch (n) {
    case CertificateName::riesz_orbit_perturbation: return "riesz_orbit_perturbation";
    case CertificateName::weighted_frame_perturbation: return "weighted_frame_perturbation";
    case CertificateName::scaled_generator_perturbation: return "scaled_generator_perturbation";
    case CertificateName::multi_generator_riesz: return "multi_generator_riesz";
    case CertificateName::two_operator_frame: return "two_operator_frame";
    case CertificateName::two_operator_riesz_sum: return "two_operator_riesz_sum";
  }
  return "unknown";
}

inline std::optional<CertificateName> certificate_from_string(std::string_view s) {
  for (auto n : {CertificateName::riesz_orbit_perturbation, CertificateName::weighted_frame_perturbation,
                 CertificateName::scaled_generator_perturbation, CertificateName::multi_generator_riesz,
                 CertificateName::two_operator_frame, CertificateName::two_operator_riesz_sum}) {
    if (to_string(n) == s) return n;
  }
  return std::nullopt;
}

struct Certificate {
  CertificateName name = CertificateName::riesz_orbit_perturbation;
  std::string form = "hypothesis";  // which inequality the margin measures
  std::map<std::string, double> hypothesis_values;
  double margin = 0.0;
  bool verdict = false;
  std::optional<BoundsReport> conclusion_check;
  /// Independent check of the conclusion; set whenever the verdict is true.
  std::optional<bool> conclusion_holds;

  void set_margin(double m) {
    margin = m;
    verdict = m > 0.0;
  }
};

// ---------------------------------------------------------------------------

namespace detail {

inline void require_horizon(Index n) {
  if (n < 1) fail(ErrorKind::invalid_input, "certificate horizon must be >= 1");
}

inline VectorSystem weighted_orbit(const Matrix& t, const Vector& phi, const sampling::WeightSpec& a, Index n) {
  return sampling::orbit(sampling::OrbitSpec{t, {phi}, a, n});
}

inline double sup_abs_weight(const sampling::WeightSpec& a, Index n) {
  if (const auto* g = std::get_if<sampling::GeometricWeights>(&a); g && std::abs(g->ratio) > 1.0) {
    fail(ErrorKind::hypothesis_violated, "weights must be bounded; geometric ratio exceeds 1 in modulus");
  }
  double s = 0.0;
  for (const Complex& x : sampling::evaluate_weights(a, n)) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace detail

/// ||psi|| < (1 - mu) sqrt(A) for the Riesz orbit {T^n phi}. Also evaluates
/// sum_{n<N} ||T^n psi|| ||S^+ T^n phi|| with the geometric tail
/// mu^N ||psi|| / ((1 - mu) sqrt(A)), and the prefix floor A (1 - sum)^2.
inline Certificate riesz_perturbation_certificate(const ContractionData& cd, const Vector& phi, const Vector& psi,
                                                  Index horizon, double tol = 1e-10) {
  detail::require_horizon(horizon);
  if (!in_subspace(cd.v_basis, psi, tol)) {
    fail(ErrorKind::invalid_hypothesis, "riesz certificate: psi does not lie in V");
  }
  const VectorSystem base = sampling::plain_orbit(cd.t, phi, horizon);
  const BoundsReport b = frames::frame_bounds(base, BoundsRelativeTo::span);
  if (!b.is_riesz() || !(b.lower_bound > 0.0)) {
    fail(ErrorKind::hypothesis_violated, "riesz certificate: {T^n phi} is not a Riesz sequence at this horizon");
  }
  const double a = b.lower_bound;
  const double mu = cd.mu;
  const double psi_norm = psi.norm();

  const Matrix u = frames::synthesis(base);
  const Matrix dual = numkit::pinv(u * u.adjoint(), b.tol) * u;
  double sum = 0.0;
  Vector x = psi;
  for (Index n = 0; n < horizon; ++n) {
    sum += x.norm() * dual.col(n).norm();
    x = cd.t * x;
  }
  const double tail = std::pow(mu, static_cast<double>(horizon)) * psi_norm / ((1.0 - mu) * std::sqrt(a));

  Certificate c;
  c.name = CertificateName::riesz_orbit_perturbation;
  c.hypothesis_values = {{"A", a},
                         {"mu", mu},
                         {"psi_norm", psi_norm},
                         {"threshold", (1.0 - mu) * std::sqrt(a)},
                         {"proof_sum", sum},
                         {"tail_bound", tail},
                         {"proof_sum_total", sum + tail},
                         {"floor", sum < 1.0 ? a * (1.0 - sum) * (1.0 - sum) : 0.0}};
  c.set_margin((1.0 - mu) * std::sqrt(a) - psi_norm);
  if (c.verdict) {
    const BoundsReport p =
        frames::frame_bounds(sampling::plain_orbit(cd.t, phi + psi, horizon), BoundsRelativeTo::span);
    c.conclusion_check = p;
    const double floor = a * (1.0 - sum) * (1.0 - sum);
    c.hypothesis_values["perturbed_lower"] = p.lower_bound;
    c.conclusion_holds = sum + tail < 1.0 && p.is_riesz() && p.lower_bound >= floor - 1e-8;
  }
  return c;
}

/// sup_n ||a_n psi|| < sqrt(A (1 - mu^2)) for the weighted orbit {a_n T^n phi}.
/// A is the lower bound of the base orbit on its span; the conclusion is
/// checked on the ambient space at horizons N and 2N.
inline Certificate weighted_frame_perturbation_certificate(const ContractionData& cd, const Vector& phi,
                                                           const Vector& psi, const sampling::WeightSpec& weights,
                                                           Index horizon, double tol = 1e-10) {
  detail::require_horizon(horizon);
  if (!in_subspace(cd.v_basis, psi, tol)) {
    fail(ErrorKind::invalid_hypothesis, "weighted frame certificate: psi does not lie in V");
  }
  const VectorSystem base = detail::weighted_orbit(cd.t, phi, weights, horizon);
  const BoundsReport b = frames::frame_bounds(base, BoundsRelativeTo::span);
  if (!(b.lower_bound > 0.0) || b.rank == 0) {
    fail(ErrorKind::hypothesis_violated, "weighted frame certificate: base orbit has no positive lower bound");
  }
  const double a = b.lower_bound;
  const double sup_a = detail::sup_abs_weight(weights, horizon);
  const double threshold = std::sqrt(a * (1.0 - cd.mu * cd.mu));

  Certificate c;
  c.name = CertificateName::weighted_frame_perturbation;
  c.hypothesis_values = {{"A", a},
                         {"mu", cd.mu},
                         {"sup_weight", sup_a},
                         {"psi_norm", psi.norm()},
                         {"threshold", threshold},
                         {"base_spans_ambient", b.spans_ambient ? 1.0 : 0.0}};
  c.set_margin(threshold - sup_a * psi.norm());

  const VectorSystem pert = detail::weighted_orbit(cd.t, phi + psi, weights, horizon);
  c.hypothesis_values["perturbed_span_lower"] = frames::frame_bounds(pert, BoundsRelativeTo::span).lower_bound;
  if (c.verdict) {
    const BoundsReport p = frames::frame_bounds(pert);
    c.conclusion_check = p;
    c.hypothesis_values["perturbed_lower"] = p.lower_bound;
    c.conclusion_holds = p.is_ambient_frame() && p.lower_bound > 0.0;
    // Horizon-doubling drift, 1 when within 10%.
    const auto* ex = std::get_if<sampling::ExplicitWeights>(&weights);
    if (!ex || static_cast<Index>(ex->values.size()) >= 2 * horizon) {
      const double lower2 =
          frames::frame_bounds(detail::weighted_orbit(cd.t, phi + psi, weights, 2 * horizon)).lower_bound;
      c.hypothesis_values["perturbed_lower_2N"] = lower2;
      c.hypothesis_values["stable_under_doubling"] = std::abs(lower2 - p.lower_bound) <= 0.1 * p.lower_bound;
    }
  }
  return c;
}

/// sup |a_n / a_{n+1}| < sqrt(A / B), A the ambient lower bound of
/// {a_n T^n phi} and B the Bessel bound of {a_{n+1} T^n psi}. B = 0 gives +inf.
inline Certificate scaled_generator_perturbation_certificate(const Matrix& t, const Vector& phi, const Vector& psi,
                                                             const sampling::WeightSpec& weights, Index horizon) {
  detail::require_horizon(horizon);
  const std::vector<Complex> a = sampling::evaluate_weights(weights, horizon + 1);
  const VectorSystem base = detail::weighted_orbit(t, phi, weights, horizon);
  const BoundsReport b = frames::frame_bounds(base);
  if (!b.is_ambient_frame() || !(b.lower_bound > 0.0)) {
    fail(ErrorKind::hypothesis_violated, "scaled generator certificate: {a_n T^n phi} is not a frame");
  }
  const std::vector<Complex> shifted(a.begin() + 1, a.end());
  const VectorSystem bessel =
      sampling::orbit(sampling::OrbitSpec{t, {psi}, sampling::ExplicitWeights{shifted}, horizon});
  const double bb = frames::frame_bounds(bessel).upper_bound;
  double sup_ratio = 0.0;
  for (Index n = 0; n < horizon; ++n) {
    sup_ratio = std::max(sup_ratio, std::abs(a[static_cast<std::size_t>(n)] / a[static_cast<std::size_t>(n + 1)]));
  }

  Certificate c;
  c.name = CertificateName::scaled_generator_perturbation;
  c.hypothesis_values = {{"A", b.lower_bound}, {"B", bb}, {"sup_ratio", sup_ratio}};
  const double threshold = bb > 0.0 ? std::sqrt(b.lower_bound / bb) : std::numeric_limits<double>::infinity();
  c.hypothesis_values["threshold"] = threshold;
  c.set_margin(bb > 0.0 ? threshold - sup_ratio : std::numeric_limits<double>::infinity());
  if (c.verdict) {
    const BoundsReport p = frames::frame_bounds(detail::weighted_orbit(t, phi + psi, weights, horizon));
    c.conclusion_check = p;
    c.conclusion_holds = p.is_ambient_frame() && p.lower_bound > 0.0;
  }
  return c;
}

/// sum_j ||g_j||^2 < (1 - lambda^2) / (2 ||S^+||) for the Riesz family
/// {W^n g_j}; the conclusion is that {T^n g_j} is Riesz.
inline Certificate multi_generator_riesz_certificate(const ContractionData& cd_w, const ContractionData& cd_t,
                                                     const std::vector<Vector>& generators, Index horizon,
                                                     double tol = 1e-10) {
  detail::require_horizon(horizon);
  if (generators.empty()) fail(ErrorKind::invalid_input, "multi generator certificate: need a generator");
  if (cd_w.t.rows() != cd_t.t.rows()) fail(ErrorKind::invalid_input, "multi generator certificate: dimension mismatch");
  for (const Vector& g : generators) {
    if (!in_subspace(cd_w.v_basis, g, tol) || !in_subspace(cd_t.v_basis, g, tol)) {
      fail(ErrorKind::invalid_hypothesis, "multi generator certificate: generator outside V_W and V_T");
    }
  }
  const sampling::OrbitSpec w_spec{cd_w.t, generators, sampling::ConstantWeights{}, horizon};
  const VectorSystem base = sampling::orbit(w_spec);
  const BoundsReport b = frames::frame_bounds(base, BoundsRelativeTo::span);
  if (!b.is_riesz() || !(b.lower_bound > 0.0)) {
    fail(ErrorKind::hypothesis_violated, "multi generator certificate: {W^n g_j} is not a Riesz sequence");
  }
  const double lambda = std::max(cd_w.mu, cd_t.mu);
  const double s_pinv_norm = 1.0 / b.lower_bound;
  double energy = 0.0;
  for (const Vector& g : generators) energy += g.squaredNorm();

  const Matrix u = frames::synthesis(base);
  const Matrix dual = numkit::pinv(u * u.adjoint(), b.tol) * u;
  double sum = 0.0;
  Index col = 0;
  for (const Vector& g : generators) {
    Vector xw = g, xt = g;
    for (Index n = 0; n < horizon; ++n, ++col) {
      sum += (xw - xt).norm() * dual.col(col).norm();
      xw = cd_w.t * xw;
      xt = cd_t.t * xt;
    }
  }
  const double tail =
      2.0 * std::pow(lambda, 2.0 * static_cast<double>(horizon)) * s_pinv_norm * energy / (1.0 - lambda * lambda);

  Certificate c;
  c.name = CertificateName::multi_generator_riesz;
  c.hypothesis_values = {{"lambda", lambda},        {"S_pinv_norm", s_pinv_norm}, {"generator_energy", energy},
                         {"threshold", (1.0 - lambda * lambda) / (2.0 * s_pinv_norm)},
                         {"proof_sum", sum},        {"tail_bound", tail}};
  c.set_margin((1.0 - lambda * lambda) / (2.0 * s_pinv_norm) - energy);
  if (c.verdict) {
    const BoundsReport p = frames::frame_bounds(
        sampling::orbit(sampling::OrbitSpec{cd_t.t, generators, sampling::ConstantWeights{}, horizon}),
        BoundsRelativeTo::span);
    c.conclusion_check = p;
    c.conclusion_holds = p.is_riesz();
  }
  return c;
}

struct TwoOperatorCertificates {
  std::optional<Certificate> frame_cert;  // 2||phi|| < sqrt(A (1 - lambda^2))
  std::optional<Certificate> sum_cert;    // sum ||T^n phi - W^n phi||^2 < A
  std::optional<Certificate> riesz_cert;  // ||phi|| < sqrt(A (1 - lambda^2)), Riesz base orbit
};

/// Certificates for moving from {T^n phi} to {W^n phi}. The frame and sum
/// forms need an ambient frame at the horizon; the Riesz form needs a Riesz
/// sequence. At least one must apply.
inline TwoOperatorCertificates two_operator_certificates(const ContractionData& cd_t, const ContractionData& cd_w,
                                                         const Vector& phi, Index horizon = 64, double tol = 1e-10) {
  detail::require_horizon(horizon);
  if (cd_w.t.rows() != cd_t.t.rows()) fail(ErrorKind::invalid_input, "two operator certificate: dimension mismatch");
  if (!in_subspace(cd_t.v_basis, phi, tol) || !in_subspace(cd_w.v_basis, phi, tol)) {
    fail(ErrorKind::invalid_hypothesis, "two operator certificate: phi outside V_T and V_W");
  }
  const VectorSystem base = sampling::plain_orbit(cd_t.t, phi, horizon);
  const BoundsReport amb = frames::frame_bounds(base);
  const BoundsReport span = frames::frame_bounds(base, BoundsRelativeTo::span);
  const bool frame = amb.is_ambient_frame() && amb.lower_bound > 0.0;
  const bool riesz = span.is_riesz() && span.lower_bound > 0.0;
  if (!frame && !riesz) {
    fail(ErrorKind::hypothesis_violated, "two operator certificate: {T^n phi} is neither a frame nor a Riesz sequence");
  }
  const double lambda = std::max(cd_t.mu, cd_w.mu);
  const double phi_norm = phi.norm();

  double sum = 0.0;
  Vector xt = phi, xw = phi;
  for (Index n = 0; n < horizon; ++n) {
    sum += (xt - xw).squaredNorm();
    xt = cd_t.t * xt;
    xw = cd_w.t * xw;
  }
  const double tail =
      4.0 * std::pow(lambda, 2.0 * static_cast<double>(horizon)) * phi_norm * phi_norm / (1.0 - lambda * lambda);

  TwoOperatorCertificates out;
  if (frame) {
    const double a = amb.lower_bound;
    Certificate f;
    f.name = CertificateName::two_operator_frame;
    f.form = "stated-inequality";
    f.hypothesis_values = {{"A", a}, {"lambda", lambda}, {"phi_norm", phi_norm},
                           {"threshold", std::sqrt(a * (1.0 - lambda * lambda))}};
    f.set_margin(std::sqrt(a * (1.0 - lambda * lambda)) - 2.0 * phi_norm);

    Certificate s;
    s.name = CertificateName::two_operator_frame;
    s.form = "proof-sum";
    s.hypothesis_values = {{"A", a}, {"lambda", lambda}, {"sum", sum}, {"tail_bound", tail}};
    s.set_margin(a - (sum + tail));

    const BoundsReport w = frames::frame_bounds(sampling::plain_orbit(cd_w.t, phi, horizon));
    for (Certificate* c : {&f, &s}) {
      if (!c->verdict) continue;
      c->conclusion_check = w;
      const double floor = sum + tail < a ? std::pow(std::sqrt(a) - std::sqrt(sum + tail), 2.0) : 0.0;
      c->hypothesis_values["floor"] = floor;
      c->conclusion_holds = w.is_ambient_frame() && w.lower_bound >= floor - 1e-8;
    }
    out.frame_cert = f;
    out.sum_cert = s;
  }
  if (riesz) {
    const double a = span.lower_bound;
    Certificate r;
    r.name = CertificateName::two_operator_riesz_sum;
    r.form = "stated-inequality";
    r.hypothesis_values = {{"A", a}, {"lambda", lambda}, {"phi_norm", phi_norm},
                           {"threshold", std::sqrt(a * (1.0 - lambda * lambda))}};
    r.set_margin(std::sqrt(a * (1.0 - lambda * lambda)) - phi_norm);
    if (r.verdict) {
      const Matrix both = frames::synthesis(sampling::plain_orbit(cd_t.t, phi, horizon)) +
                          frames::synthesis(sampling::plain_orbit(cd_w.t, phi, horizon));
      const BoundsReport p = frames::bounds_of_synthesis(both, BoundsRelativeTo::span);
      r.conclusion_check = p;
      r.conclusion_holds = p.is_riesz();
    }
    out.riesz_cert = r;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Satisfiability search

struct TrialRecord {
  Index trial = 0;
  Index dim = 0;
  double margin = 0.0;
  bool skipped = false;  // sampled instance violated a structural hypothesis
  std::optional<bool> conclusion_holds;
};

struct SearchReport {
  CertificateName name = CertificateName::riesz_orbit_perturbation;
  Index tried = 0;
  Index skipped = 0;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> trials;                // one per trial, in trial order
  std::vector<TrialRecord> satisfying_instances;  // margin > 0
  double max_margin = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline Certificate sample_certificate(CertificateName name, rnd::Rng& rng, Index& dim) {
  const Index d = rnd::uniform_int(rng, 1, 8);
  dim = d;
  switch (name) {
    case CertificateName::riesz_orbit_perturbation:
    case CertificateName::weighted_frame_perturbation: {
      const Index m = rnd::uniform_int(rng, 1, d);
      const auto blk = rnd::invariant_block(d, m, rnd::uniform(rng, 0.05, 0.95), rng);
      const ContractionData cd = contraction_data(blk.t, blk.v, 1e-8);
      const Vector phi = rnd::unit_vector(d, rng);
      const double scale = std::pow(10.0, rnd::uniform(rng, -3.0, 0.0));
      const Vector psi = scale * (blk.v * rnd::unit_vector(m, rng));
      if (name == CertificateName::riesz_orbit_perturbation) {
        return riesz_perturbation_certificate(cd, phi, psi, rnd::uniform_int(rng, 1, d), 1e-8);
      }
      return weighted_frame_perturbation_certificate(cd, phi, psi, sampling::ConstantWeights{},
                                                     rnd::uniform_int(rng, d, 4 * d), 1e-8);
    }
    case CertificateName::scaled_generator_perturbation: {
      const Matrix t = rnd::contraction(d, rnd::uniform(rng, 0.1, 0.95), rng);
      const Vector phi = rnd::unit_vector(d, rng);
      const Vector psi = std::pow(10.0, rnd::uniform(rng, -3.0, 0.0)) * rnd::unit_vector(d, rng);
      const sampling::WeightSpec a = sampling::GeometricWeights{Complex(rnd::uniform(rng, 0.7, 1.0), 0.0)};
      return scaled_generator_perturbation_certificate(t, phi, psi, a, rnd::uniform_int(rng, d, 4 * d));
    }
    case CertificateName::multi_generator_riesz: {
      const Index m = rnd::uniform_int(rng, 1, d);
      const Matrix q = rnd::unitary(d, rng);
      const auto w = rnd::invariant_block(q, m, rnd::uniform(rng, 0.05, 0.95), rng);
      const auto t = rnd::invariant_block(q, m, rnd::uniform(rng, 0.05, 0.95), rng);
      const ContractionData cd_w = contraction_data(w.t, w.v, 1e-8);
      const ContractionData cd_t = contraction_data(t.t, t.v, 1e-8);
      const Index k = rnd::uniform_int(rng, 1, m);
      std::vector<Vector> gens;
      for (Index j = 0; j < k; ++j) {
        gens.push_back(std::pow(10.0, rnd::uniform(rng, -3.0, 0.0)) * (w.v * rnd::unit_vector(m, rng)));
      }
      return multi_generator_riesz_certificate(cd_w, cd_t, gens, rnd::uniform_int(rng, 1, m / k), 1e-8);
    }
    case CertificateName::two_operator_frame:
    case CertificateName::two_operator_riesz_sum: {
      const Matrix id = numkit::identity(d);
      const ContractionData cd_t = contraction_data(rnd::contraction(d, rnd::uniform(rng, 0.05, 0.95), rng), id);
      const ContractionData cd_w = contraction_data(rnd::contraction(d, rnd::uniform(rng, 0.05, 0.95), rng), id);
      const Vector phi = std::pow(10.0, rnd::uniform(rng, -3.0, 0.0)) * rnd::unit_vector(d, rng);
      if (name == CertificateName::two_operator_frame) {
        const auto certs = two_operator_certificates(cd_t, cd_w, phi, rnd::uniform_int(rng, d, 4 * d), 1e-8);
        if (!certs.frame_cert) fail(ErrorKind::hypothesis_violated, "sampled orbit is not a frame");
        return *certs.frame_cert;
      }
      const auto certs = two_operator_certificates(cd_t, cd_w, phi, rnd::uniform_int(rng, 1, d), 1e-8);
      if (!certs.riesz_cert) fail(ErrorKind::hypothesis_violated, "sampled orbit is not a Riesz sequence");
      return *certs.riesz_cert;
    }
  }
  fail(ErrorKind::invalid_input, "unknown certificate");
}

}  // namespace detail

/// Evaluates `trials` random instances of the named certificate. Trial i
/// draws from substream (seed, i), so results do not depend on `workers`.
inline SearchReport satisfiability_search(CertificateName name, Index trials, std::uint64_t seed,
                                          unsigned workers = 1) {
  if (trials < 1) fail(ErrorKind::invalid_input, "satisfiability_search: trials must be >= 1");
  SearchReport r;
  r.name = name;
  r.tried = trials;
  r.seed = seed;
  r.trials.resize(static_cast<std::size_t>(trials));

  auto run_trial = [&](Index i) {
    TrialRecord rec;
    rec.trial = i;
    rnd::Rng rng = rnd::substream(seed, static_cast<std::uint64_t>(i));
    try {
      const Certificate c = detail::sample_certificate(name, rng, rec.dim);
      rec.margin = c.margin;
      rec.conclusion_holds = c.conclusion_holds;
    } catch (const Error&) {
      rec.skipped = true;
      rec.margin = std::numeric_limits<double>::quiet_NaN();
    }
    r.trials[static_cast<std::size_t>(i)] = rec;
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(trials)));
  if (workers == 1) {
    for (Index i = 0; i < trials; ++i) run_trial(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (Index i = w; i < trials; i += workers) run_trial(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (const TrialRecord& rec : r.trials) {
    if (rec.skipped) {
      ++r.skipped;
      continue;
    }
    r.max_margin = std::max(r.max_margin, rec.margin);
    if (rec.margin > 0.0) r.satisfying_instances.push_back(rec);
  }
  return r;
}

}  // namespace dynsamp::perturb

#endif  // DYNSAMP_PERTURB_HPP
