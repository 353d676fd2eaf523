#ifndef DYNSAMP_SAMPLING_HPP
#define DYNSAMP_SAMPLING_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dynsamp/frames.hpp"
#include "dynsamp/numkit.hpp"

namespace dynsamp::sampling {

using frames::BoundsRelativeTo;
using frames::BoundsReport;
using frames::Classification;
using frames::IndexModel;
using frames::VectorSystem;

// ---------------------------------------------------------------------------
// Weights and orbit construction

struct ConstantWeights {
  Complex value{1.0, 0.0};
};
/// a_n = ratio^n.
struct GeometricWeights {
  Complex ratio{1.0, 0.0};
};
struct ExplicitWeights {
  std::vector<Complex> values;
};
using WeightSpec = std::variant<ConstantWeights, GeometricWeights, ExplicitWeights>;

/// a_0 .. a_{count-1}. Every scalar must be nonzero.
inline std::vector<Complex> evaluate_weights(const WeightSpec& spec, Index count) {
  std::vector<Complex> out(static_cast<std::size_t>(count));
  if (const auto* c = std::get_if<ConstantWeights>(&spec)) {
    std::fill(out.begin(), out.end(), c->value);
  } else if (const auto* g = std::get_if<GeometricWeights>(&spec)) {
    Complex a{1.0, 0.0};
    for (auto& x : out) {
      x = a;
      a *= g->ratio;
    }
  } else {
    const auto& e = std::get<ExplicitWeights>(spec);
    if (static_cast<Index>(e.values.size()) < count) {
      fail(ErrorKind::invalid_input, "explicit weights: need " + std::to_string(count) + " scalars, got " +
                                         std::to_string(e.values.size()));
    }
    std::copy_n(e.values.begin(), count, out.begin());
  }
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (!(std::abs(out[n]) > 0.0) || !std::isfinite(std::abs(out[n]))) {
      fail(ErrorKind::invalid_input, "weights: a_" + std::to_string(n) +
                                         " is zero or non-finite; scaled orbits {a_n T^n phi} require nonzero scalars");
    }
  }
  return out;
}

struct OrbitSpec {
  Matrix op;
  std::vector<Vector> generators;
  WeightSpec weights = ConstantWeights{};
  Index horizon = 1;
  IndexModel index_model = IndexModel::natural;
  Index period = 0;
};

inline Matrix matrix_power(const Matrix& t, Index n) {
  Matrix result = numkit::identity(t.rows());
  Matrix base = t;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

inline bool is_periodic(const Matrix& t, Index period, double tol = 1e-10) {
  if (period < 1) return false;
  return (matrix_power(t, period) - numkit::identity(t.rows())).norm() <= tol;
}

/// Smallest p in [1, max_period] with T^p = I within tol.
inline std::optional<Index> find_period(const Matrix& t, Index max_period = 1024, double tol = 1e-10) {
  numkit::require_square(t, "find_period operator");
  Matrix p = t;
  const Matrix id = numkit::identity(t.rows());
  for (Index k = 1; k <= max_period; ++k) {
    if ((p - id).norm() <= tol) return k;
    p = p * t;
  }
  return std::nullopt;
}

/// Generator-major orbit {a_n T^n phi_j}: phi_1's run first, then phi_2's.
inline VectorSystem orbit(const OrbitSpec& spec) {
  numkit::require_square(spec.op, "orbit operator");
  numkit::require_finite(spec.op, "orbit operator");
  if (spec.horizon < 1) fail(ErrorKind::invalid_input, "orbit: horizon must be >= 1");
  if (spec.generators.empty()) fail(ErrorKind::invalid_input, "orbit: need at least one generator");
  const Index d = spec.op.rows();
  for (const Vector& g : spec.generators) {
    if (g.size() != d) fail(ErrorKind::invalid_input, "orbit: generator dimension differs from operator dimension");
  }
  if (spec.index_model == IndexModel::periodic && !is_periodic(spec.op, spec.period)) {
    fail(ErrorKind::invalid_input, "orbit: periodic index model requires T^p = I for the declared period");
  }
  const Index n = spec.horizon;
  const std::vector<Complex> a = evaluate_weights(spec.weights, n);
  const Index count = n * static_cast<Index>(spec.generators.size());
  Matrix vectors(d, count);
  std::vector<Complex> weights(static_cast<std::size_t>(count));
  Index col = 0;
  for (const Vector& g : spec.generators) {
    Vector x = g;
    for (Index k = 0; k < n; ++k, ++col) {
      vectors.col(col) = x;
      weights[static_cast<std::size_t>(col)] = a[static_cast<std::size_t>(k)];
      if (k + 1 < n) x = spec.op * x;
    }
  }
  frames::Provenance prov{spec.op, spec.generators, spec.index_model, spec.period, n};
  return VectorSystem(std::move(vectors), std::move(weights), std::move(prov));
}

/// Unweighted single-generator orbit {T^n phi}_{n<horizon}.
inline VectorSystem plain_orbit(const Matrix& t, const Vector& phi, Index horizon) {
  return orbit(OrbitSpec{t, {phi}, ConstantWeights{}, horizon});
}

// ---------------------------------------------------------------------------
// Exact infinite orbits

/// ||phi||^2 / (1 - ||T||^2), a Bessel bound for {T^n phi} when ||T|| < 1.
inline double bessel_bound_contractive(const Matrix& t, const Vector& phi) {
  const double norm = numkit::operator_norm(t);
  if (!(norm < 1.0)) {
    fail(ErrorKind::hypothesis_violated, "bessel_bound_contractive: ||T|| = " + std::to_string(norm) + " is not < 1");
  }
  return phi.squaredNorm() / (1.0 - norm * norm);
}

/// Frame operator of the whole orbit {T^n phi}_{n>=0}: the Stein solution
/// of S - T S T* = phi phi*.
inline numkit::SteinSolution orbit_frame_operator_exact(const Matrix& t, const Vector& phi, double tol = 1e-12) {
  if (phi.size() != t.rows()) fail(ErrorKind::invalid_input, "orbit_frame_operator_exact: dimension mismatch");
  return numkit::solve_stein(t, phi * phi.adjoint(), tol);
}

/// Closed form of the same series for diagonal T = diag(t): S_ij = phi_i conj(phi_j) / (1 - t_i conj(t_j)).
/// Needs every |t_i| < 1 but no spectral gap.
inline Matrix orbit_frame_operator_diagonal(const Vector& diag, const Vector& phi) {
  if (diag.size() != phi.size()) fail(ErrorKind::invalid_input, "orbit_frame_operator_diagonal: dimension mismatch");
  const Index d = diag.size();
  for (Index i = 0; i < d; ++i) {
    if (!(std::abs(diag(i)) < 1.0)) fail(ErrorKind::divergent_series, "diagonal entry has modulus >= 1");
  }
  Matrix s(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      s(i, j) = phi(i) * std::conj(phi(j)) / (1.0 - diag(i) * std::conj(diag(j)));
    }
  }
  return s;
}

/// Frobenius-norm bound on sum_{n>=horizon} T^n phi phi* T*^n. With
/// q = ||T^k|| < 1 and M = max_{r<k} ||T^r||, the tail trace is at most
/// k M^2 ||phi||^2 q^(2 floor(N/k)) / (1 - q^2); the best k <= max_block wins.
inline double truncation_tail_bound(const Matrix& t, const Vector& phi, Index horizon, Index max_block = 64) {
  double best = std::numeric_limits<double>::infinity();
  double m = 1.0;
  Matrix p = t;
  for (Index k = 1; k <= max_block; ++k) {
    const double q = numkit::operator_norm(p);
    if (q < 1.0) {
      const double bound = static_cast<double>(k) * m * m * phi.squaredNorm() *
                           std::pow(q, 2.0 * static_cast<double>(horizon / k)) / (1.0 - q * q);
      best = std::min(best, bound);
    }
    m = std::max(m, q);
    p = p * t;
  }
  return best;
}

/// Rank of the Krylov matrix [phi, T phi, ..., T^{d-1} phi].
inline Index krylov_rank(const Matrix& t, const Vector& phi, double rel_tol = 1e-10) {
  const Index d = t.rows();
  Matrix k(d, d);
  Vector x = phi;
  for (Index n = 0; n < d; ++n) {
    k.col(n) = x;
    x = t * x;
  }
  return numkit::numerical_rank(k, rel_tol);
}

// ---------------------------------------------------------------------------
// Surjectivity criteria

struct SurjectivityReport {
  // (i) max_{1<=n<=horizon} |<T^n phi, S^{-1} phi>| and the first n above tol
  double max_tail_inner_product = 0.0;
  std::optional<Index> witness;
  // (ii) ||(I - T T^+) phi||
  double range_distance = 0.0;
  // (iii) ||T* S^{-1} phi||
  double adjoint_norm = 0.0;
  // (iv) | ||S^{-1/2} phi|| - 1 |
  double inverse_sqrt_defect = 0.0;
  double inverse_sqrt_norm = 0.0;
  /// Per-criterion verdict "T is surjective".
  std::array<bool, 4> verdicts{};
  bool ground_truth_surjective = false;
  bool consistent = false;
  // Canonical coefficients c_n = <S^{-1} phi, T^n phi>, n >= 1: their
  // energy, the norm of sum c_n T^n phi, and the gap in q - q^2 = sum |c_n|^2
  // with q = <S^{-1} phi, phi>.
  double tail_coefficient_energy = 0.0;
  double tail_synthesis_norm = 0.0;
  double coefficient_identity_gap = 0.0;
  Index horizon = 0;
  double tol = 0.0;
};

/// Evaluates the four surjectivity criteria for a frame orbit {T^n phi}
/// with frame operator S. `horizon` defaults to 4*dim.
inline SurjectivityReport surjectivity_report(const Matrix& t, const Vector& phi, const Matrix& s,
                                              std::optional<Index> horizon = std::nullopt, double tol = 1e-8) {
  numkit::require_square(t, "surjectivity operator");
  const Index d = t.rows();
  if (phi.size() != d || s.rows() != d || s.cols() != d) {
    fail(ErrorKind::invalid_input, "surjectivity_report: dimension mismatch");
  }
  const numkit::HermitianEig e = numkit::eig_hermitian(s);
  if (!(e.values(0) > tol * std::max(1.0, e.values(d - 1)))) {
    fail(ErrorKind::not_a_frame, "surjectivity_report: frame operator is not positive definite");
  }
  SurjectivityReport r;
  r.horizon = horizon.value_or(4 * d);
  r.tol = tol;

  const Vector s_inv_phi = e.vectors * (e.vectors.adjoint() * phi).cwiseQuotient(e.values.cast<Complex>());
  const Complex q = s_inv_phi.dot(phi);  // <phi, S^{-1} phi>, real positive

  Vector x = phi;
  Vector tail_sum = Vector::Zero(d);
  for (Index n = 1; n <= r.horizon; ++n) {
    x = t * x;
    // c_n = <S^{-1} phi, T^n phi> with the inner product linear in the first slot.
    const Complex c = x.dot(s_inv_phi);
    const double mag = std::abs(c);
    if (mag > r.max_tail_inner_product) r.max_tail_inner_product = mag;
    if (!r.witness && mag > tol) r.witness = n;
    r.tail_coefficient_energy += mag * mag;
    tail_sum += c * x;
  }
  r.tail_synthesis_norm = tail_sum.norm();
  r.coefficient_identity_gap = std::abs(q.real() - q.real() * q.real() - r.tail_coefficient_energy);

  const Matrix t_pinv = numkit::pinv(t);
  r.range_distance = (phi - t * (t_pinv * phi)).norm();
  r.adjoint_norm = (t.adjoint() * s_inv_phi).norm();
  r.inverse_sqrt_norm = std::sqrt(std::max(0.0, q.real()));
  r.inverse_sqrt_defect = std::abs(r.inverse_sqrt_norm - 1.0);

  r.verdicts = {r.max_tail_inner_product > tol, r.range_distance <= tol, r.adjoint_norm > tol,
                r.inverse_sqrt_defect > tol};

  const RealVector sv = numkit::singular_values(t);
  r.ground_truth_surjective = sv(d - 1) > tol * std::max(1.0, sv(0));
  r.consistent = std::all_of(r.verdicts.begin(), r.verdicts.end(),
                             [&](bool v) { return v == r.ground_truth_surjective; });
  return r;
}

// ---------------------------------------------------------------------------
// Range of T versus the orbit tail

struct RangeSpanResult {
  bool equal = false;
  double gap = 0.0;  // sine of the largest principal angle (1 if dimensions differ)
  Index range_dim = 0;
  Index tail_dim = 0;
};

/// sin of the largest principal angle between two subspaces given by
/// orthonormal columns; 1 when their dimensions differ.
inline double subspace_gap(const Matrix& qa, const Matrix& qb) {
  if (qa.cols() == 0 && qb.cols() == 0) return 0.0;
  if (qa.cols() == 0 || qb.cols() == 0) return 1.0;
  const double ab = numkit::operator_norm(qa - qb * (qb.adjoint() * qa));
  const double ba = numkit::operator_norm(qb - qa * (qa.adjoint() * qb));
  return std::min(1.0, std::max(ab, ba));
}

/// Compares range(T) with span{T^n phi_j : n >= 1} of an orbit system.
inline RangeSpanResult range_span_check(const Matrix& t, const VectorSystem& sys, double tol = 1e-8) {
  if (!sys.provenance()) fail(ErrorKind::invalid_input, "range_span_check: system has no orbit provenance");
  const Index run = sys.provenance()->horizon;
  std::vector<Index> tail_cols;
  for (Index k = 0; k < sys.size(); ++k) {
    if (k % run != 0) tail_cols.push_back(k);
  }
  const Matrix u = frames::synthesis(sys);
  Matrix tail(sys.dim(), static_cast<Index>(tail_cols.size()));
  for (std::size_t i = 0; i < tail_cols.size(); ++i) tail.col(static_cast<Index>(i)) = u.col(tail_cols[i]);

  const Matrix q_range = numkit::orthonormal_range(t);
  const Matrix q_tail = tail.cols() ? numkit::orthonormal_range(tail) : Matrix(sys.dim(), 0);
  RangeSpanResult r;
  r.range_dim = q_range.cols();
  r.tail_dim = q_tail.cols();
  r.gap = subspace_gap(q_range, q_tail);
  r.equal = r.gap <= tol;
  return r;
}

// ---------------------------------------------------------------------------
// Frames from positive operators and iterated frame operators

/// {T^{1/2} e_k}: a frame whose frame operator is T.
inline VectorSystem frame_from_positive_operator(const Matrix& t, const VectorSystem& basis, double tol = 1e-12) {
  const numkit::HermitianEig e = numkit::eig_hermitian(t);
  if (!(e.values(0) >= tol) || !(tol > 0.0)) {
    fail(ErrorKind::invalid_input, "frame_from_positive_operator: operator is not positive definite");
  }
  const Matrix root = numkit::sqrt_psd(t);
  return frames::bessel_from_operator(root, basis);
}

enum class IteratedVerdict {
  cannot_be_frame,  // A >= 1 and the prefix Bessel bounds diverge
  bounded,          // prefix bounds stabilise (A < 1)
  unbounded,        // A < 1 but the prefix bounds still grow
  contradiction,    // A >= 1 and bounded: would contradict A < 1 being necessary
};

inline std::string_view to_string(IteratedVerdict v) {
  switch (v) {
    case IteratedVerdict::cannot_be_frame: return "cannot-be-frame";
    case IteratedVerdict::bounded: return "bounded";
    case IteratedVerdict::unbounded: return "unbounded";
    case IteratedVerdict::contradiction: return "contradiction";
  }
  return "unknown";
}

struct IteratedFrameCheck {
  double lower_bound = 0.0;                 // ambient A of the base frame
  std::vector<double> prefix_upper_bounds;  // B of {S^n g}_{n<m, g}, m = 1..horizon
  double growth_ratio = 1.0;                // B(horizon) / B(ceil(horizon/4))
  IteratedVerdict verdict = IteratedVerdict::bounded;
};

inline constexpr double kDivergenceRatio = 1.5;

/// Builds {S^n g} from the frame operator S of `sys` and tracks how the
/// Bessel bounds of its prefixes grow.
inline IteratedFrameCheck iterated_frame_operator_check(const VectorSystem& sys, const std::vector<Vector>& generators,
                                                        Index horizon) {
  if (horizon < 1) fail(ErrorKind::invalid_input, "iterated_frame_operator_check: horizon must be >= 1");
  if (generators.empty()) fail(ErrorKind::invalid_input, "iterated_frame_operator_check: need a generator");
  const BoundsReport b = frames::frame_bounds(sys);
  if (!b.is_ambient_frame() || !(b.lower_bound > b.tol)) {
    fail(ErrorKind::not_a_frame, "iterated_frame_operator_check: base system is not a frame");
  }
  const Matrix s = frames::frame_operator(sys);
  const Index d = sys.dim();
  const Index g_count = static_cast<Index>(generators.size());

  IteratedFrameCheck r;
  r.lower_bound = b.lower_bound;
  // Column layout: iteration-major so each prefix is a leading block.
  Matrix u(d, horizon * g_count);
  std::vector<Vector> current = generators;
  for (Index m = 0; m < horizon; ++m) {
    for (Index j = 0; j < g_count; ++j) {
      if (current[static_cast<std::size_t>(j)].size() != d) {
        fail(ErrorKind::invalid_input, "iterated_frame_operator_check: generator dimension mismatch");
      }
      u.col(m * g_count + j) = current[static_cast<std::size_t>(j)];
      current[static_cast<std::size_t>(j)] = s * current[static_cast<std::size_t>(j)];
    }
    const double top = numkit::operator_norm(u.leftCols((m + 1) * g_count));
    r.prefix_upper_bounds.push_back(top * top);
  }
  const std::size_t last = r.prefix_upper_bounds.size() - 1;
  const std::size_t quarter = static_cast<std::size_t>((horizon + 3) / 4) - 1;
  const double base = r.prefix_upper_bounds[quarter];
  r.growth_ratio = base > 0.0 ? r.prefix_upper_bounds[last] / base : 1.0;
  const bool diverging = r.growth_ratio >= kDivergenceRatio;
  if (r.lower_bound >= 1.0) {
    r.verdict = diverging ? IteratedVerdict::cannot_be_frame : IteratedVerdict::contradiction;
  } else {
    r.verdict = diverging ? IteratedVerdict::unbounded : IteratedVerdict::bounded;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Unitary orbits

/// Ambient B_opt of {T^n phi}_{n<N} for each N; grows at least like N||phi||^2/d.
inline std::vector<double> unitary_nogo_proxy(const Matrix& t, const Vector& phi, const std::vector<Index>& horizons) {
  numkit::require_square(t, "unitary_nogo_proxy operator");
  if ((t.adjoint() * t - numkit::identity(t.rows())).norm() > 1e-10) {
    fail(ErrorKind::invalid_input, "unitary_nogo_proxy: operator is not unitary");
  }
  std::vector<double> out;
  out.reserve(horizons.size());
  for (Index n : horizons) {
    out.push_back(frames::frame_bounds(plain_orbit(t, phi, n)).upper_bound);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Periodic (Z-indexed) orbit model

struct PeriodicModel {
  Index period = 0;
  Matrix s;  // sum over one period
  BoundsReport bounds;
  bool frame_sequence_branch = false;  // orbit does not span; everything restricted to its span
  double tst_residual = 0.0;           // ||T S T* - S||_F
  double u_unitarity_residual = 0.0;   // ||U*U - I||_F, U = S^{-1/2} T S^{1/2}
  // Worst margins of sqrt(A/B)||f|| <= ||T^n f||, ||T*^n f|| <= sqrt(B/A)||f||.
  double sandwich_lower_margin = 0.0;
  double sandwich_upper_margin = 0.0;
  // Bounds of the transformed orbit {U^n S^{-1/2} phi}, which must lie in [A/B, B/A].
  double transformed_lower = 0.0;
  double transformed_upper = 0.0;
  double transformed_margin = 0.0;
};

namespace detail {

inline Vector random_complex_vector(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

}  // namespace detail

inline PeriodicModel periodic_orbit_model(const Matrix& t, const Vector& phi, Index period, std::uint64_t seed = 0,
                                          Index samples = 20) {
  numkit::require_square(t, "periodic_orbit_model operator");
  if (phi.size() != t.rows()) fail(ErrorKind::invalid_input, "periodic_orbit_model: dimension mismatch");
  if (!is_periodic(t, period)) {
    fail(ErrorKind::invalid_input, "periodic_orbit_model: T^p != I for p = " + std::to_string(period));
  }
  PeriodicModel r;
  r.period = period;
  const VectorSystem sys = plain_orbit(t, phi, period);
  r.s = frames::frame_operator(sys);
  r.tst_residual = (t * r.s * t.adjoint() - r.s).norm();
  r.bounds = frames::frame_bounds(sys, BoundsRelativeTo::span);

  // Restrict to the orbit span, which T maps onto itself.
  Matrix q;
  if (r.bounds.spans_ambient) {
    q = numkit::identity(t.rows());
  } else {
    r.frame_sequence_branch = true;
    q = numkit::orthonormal_range(frames::synthesis(sys));
  }
  const Matrix tr = q.adjoint() * t * q;
  const Matrix sr = q.adjoint() * r.s * q;
  const Vector pr = q.adjoint() * phi;
  const double a = r.bounds.lower_bound;
  const double b = r.bounds.upper_bound;

  const Matrix s_half = numkit::sqrt_psd(sr);
  const Matrix s_mhalf = numkit::inv_sqrt_pd(sr);
  const Matrix u = s_mhalf * tr * s_half;
  r.u_unitarity_residual = (u.adjoint() * u - numkit::identity(u.rows())).norm();

  const double lo = std::sqrt(a / b);
  const double hi = std::sqrt(b / a);
  std::mt19937_64 rng(seed);
  double worst_lo = std::numeric_limits<double>::infinity();
  double worst_hi = std::numeric_limits<double>::infinity();
  const Matrix tr_inv = matrix_power(tr, period - 1);
  for (Index i = 0; i < samples; ++i) {
    const Vector f = detail::random_complex_vector(tr.rows(), rng);
    const double fn = f.norm();
    Vector fwd = f, bwd = f, fwd_adj = f, bwd_adj = f;
    for (Index n = 0; n <= period; ++n) {
      for (const Vector* v : {&fwd, &bwd, &fwd_adj, &bwd_adj}) {
        const double vn = v->norm();
        worst_lo = std::min(worst_lo, vn - lo * fn);
        worst_hi = std::min(worst_hi, hi * fn - vn);
      }
      fwd = tr * fwd;
      bwd = tr_inv * bwd;
      fwd_adj = tr.adjoint() * fwd_adj;
      bwd_adj = tr_inv.adjoint() * bwd_adj;
    }
  }
  r.sandwich_lower_margin = worst_lo;
  r.sandwich_upper_margin = worst_hi;

  const Vector psi = s_mhalf * pr;
  const BoundsReport tb = frames::frame_bounds(plain_orbit(u, psi, period));
  r.transformed_lower = tb.lower_bound;
  r.transformed_upper = tb.upper_bound;
  r.transformed_margin = std::min(tb.lower_bound - a / b, b / a - tb.upper_bound);
  return r;
}

struct CommutantResidual {
  double transport_residual = 0.0;  // ||S~ - V S V*||_F
  double power_residual = 0.0;      // max_{n=1,2,3} ||S~^n - V S^n V*||_F
};

/// Frame operators of the orbits of phi and V phi over `horizon` steps, for V
/// unitary and commuting with T.
inline CommutantResidual commutant_transport(const Matrix& t, const Matrix& v, const Vector& phi, Index horizon,
                                             double tol = 1e-10) {
  numkit::require_square(t, "commutant_transport operator");
  if (v.rows() != t.rows() || v.cols() != t.cols() || phi.size() != t.rows()) {
    fail(ErrorKind::invalid_input, "commutant_transport: dimension mismatch");
  }
  if ((v.adjoint() * v - numkit::identity(v.rows())).norm() > 1e-10) {
    fail(ErrorKind::invalid_input, "commutant_transport: V is not unitary");
  }
  if ((v * t - t * v).norm() > tol) fail(ErrorKind::invalid_input, "commutant_transport: V does not commute with T");
  const Matrix s = frames::frame_operator(plain_orbit(t, phi, horizon));
  const Matrix st = frames::frame_operator(plain_orbit(t, v * phi, horizon));
  CommutantResidual r;
  r.transport_residual = (st - v * s * v.adjoint()).norm();
  Matrix sp = s, stp = st;
  for (int n = 1; n <= 3; ++n) {
    r.power_residual = std::max(r.power_residual, (stp - v * sp * v.adjoint()).norm());
    sp = sp * s;
    stp = stp * st;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Scaled orbits {a_n T^n phi}

/// Truncated weighted right shift: (0, a_0/a_1 c_0, ..., a_{N-2}/a_{N-1} c_{N-2}).
inline Vector shift_weighted(const std::vector<Complex>& a, const Vector& c) {
  const Index n = c.size();
  if (static_cast<Index>(a.size()) != n) fail(ErrorKind::invalid_input, "shift_weighted: length mismatch");
  for (const Complex& x : a) {
    if (!(std::abs(x) > 0.0)) fail(ErrorKind::invalid_input, "shift_weighted: weights must be nonzero");
  }
  Vector out = Vector::Zero(n);
  for (Index k = 1; k < n; ++k) {
    out(k) = (a[static_cast<std::size_t>(k - 1)] / a[static_cast<std::size_t>(k)]) * c(k - 1);
  }
  return out;
}

struct KernelInvarianceReport {
  bool invariant = false;
  double defect = 0.0;  // max over unit kernel vectors of the shifted part off the kernel
  Index kernel_dim = 0;
  /// The finite shift drops (a_{N-1}/a_N) c_{N-1}; always set for truncations.
  bool truncated = true;
  double max_dropped_coefficient = 0.0;  // max |c_{N-1}| over the kernel basis
};

inline KernelInvarianceReport kernel_invariance_check(const VectorSystem& sys, double tol = 1e-8) {
  if (!sys.weights()) fail(ErrorKind::invalid_input, "kernel_invariance_check: system carries no weights");
  const frames::KernelBasis kb = frames::kernel_synthesis(sys);
  KernelInvarianceReport r;
  r.kernel_dim = kb.dimension();
  const Matrix& k = kb.basis;
  for (Index j = 0; j < k.cols(); ++j) {
    const Vector c = k.col(j);
    const Vector shifted = shift_weighted(*sys.weights(), c);
    const Vector off = shifted - k * (k.adjoint() * shifted);
    r.defect = std::max(r.defect, off.norm());
    r.max_dropped_coefficient = std::max(r.max_dropped_coefficient, std::abs(c(c.size() - 1)));
  }
  r.invariant = r.defect <= tol;
  return r;
}

/// Untruncated variant for orbit specs: shifts each kernel vector of the
/// horizon-N system into C^{N+1} and measures how far it is from the kernel
/// of the horizon-(N+1) synthesis, ||U_{N+1} T_w c|| for unit c.
inline double orbit_kernel_extension_defect(const OrbitSpec& spec, double tol = 1e-10) {
  if (spec.generators.size() != 1) {
    fail(ErrorKind::invalid_input, "orbit_kernel_extension_defect: single-generator orbits only");
  }
  OrbitSpec longer = spec;
  longer.horizon = spec.horizon + 1;
  longer.index_model = IndexModel::natural;
  OrbitSpec base = longer;
  base.horizon = spec.horizon;
  const VectorSystem sys = orbit(base);
  const VectorSystem ext = orbit(longer);
  const Matrix u_ext = frames::synthesis(ext);
  const std::vector<Complex> a = *ext.weights();
  const frames::KernelBasis kb = frames::kernel_synthesis(sys, tol);
  double defect = 0.0;
  for (Index j = 0; j < kb.dimension(); ++j) {
    Vector c = Vector::Zero(spec.horizon + 1);
    c.head(spec.horizon) = kb.basis.col(j);
    const Vector shifted = shift_weighted(a, c);
    defect = std::max(defect, (u_ext * shifted).norm());
  }
  const double scale = std::max(1.0, numkit::operator_norm(u_ext));
  return defect / scale;
}

struct RatioBound {
  double sup_ratio = 0.0;  // max |a_n / a_{n+1}|
  double bound = 0.0;      // sqrt(B/A) ||T||
  double margin = 0.0;     // bound - sup_ratio
};

inline RatioBound ratio_bound_check(const VectorSystem& sys) {
  if (!sys.provenance()) fail(ErrorKind::invalid_input, "ratio_bound_check: system has no orbit provenance");
  const BoundsReport b = frames::frame_bounds(sys);
  if (!b.is_ambient_frame() || !(b.lower_bound > b.tol)) {
    fail(ErrorKind::hypothesis_violated, "ratio_bound_check: weighted orbit is not a frame");
  }
  RatioBound r;
  const Index run = sys.provenance()->horizon;
  if (sys.weights()) {
    const auto& a = *sys.weights();
    for (Index k = 0; k + 1 < run; ++k) {
      r.sup_ratio = std::max(r.sup_ratio, std::abs(a[static_cast<std::size_t>(k)] / a[static_cast<std::size_t>(k + 1)]));
    }
  } else if (run > 1) {
    r.sup_ratio = 1.0;
  }
  r.bound = std::sqrt(b.upper_bound / b.lower_bound) * numkit::operator_norm(sys.provenance()->op);
  r.margin = r.bound - r.sup_ratio;
  return r;
}

/// max_j || f_{j+1} - (a_j/a_{j-1}) sum_k <f_j, g_k> (a_{k-1}/a_k) f_{k+1} || over
/// j = 1..N-1, with f and g the (weighted) elements of F and its dual G.
/// The k-sum stops at N-1 unless `next_element` supplies f_{N+1}, in which case
/// `weights` must hold a_0..a_N.
inline double representation_residual(const VectorSystem& f, const VectorSystem& g, const std::vector<Complex>& weights,
                                      const std::optional<Vector>& next_element = std::nullopt) {
  if (f.dim() != g.dim() || f.size() != g.size()) {
    fail(ErrorKind::invalid_input, "representation_residual: F and G differ in shape");
  }
  const Index n = f.size();
  const Index needed = next_element ? n + 1 : n;
  if (static_cast<Index>(weights.size()) < needed) {
    fail(ErrorKind::invalid_input, "representation_residual: need " + std::to_string(needed) + " weights");
  }
  for (const Complex& x : weights) {
    if (!(std::abs(x) > 0.0)) fail(ErrorKind::invalid_input, "representation_residual: weights must be nonzero");
  }
  const Matrix uf = frames::synthesis(f);
  const Matrix ug = frames::synthesis(g);
  const Matrix recon = uf * ug.adjoint() - numkit::identity(f.dim());
  if (recon.norm() > 1e-8) fail(ErrorKind::invalid_input, "representation_residual: G is not a dual of F");

  auto a = [&](Index i) { return weights[static_cast<std::size_t>(i)]; };
  // Zero-based: element k is f_{k+1}, and its successor term uses a_k/a_{k+1}.
  const Index k_terms = next_element ? n : n - 1;
  auto successor = [&](Index k) -> Vector { return k + 1 < n ? Vector(uf.col(k + 1)) : *next_element; };
  double worst = 0.0;
  for (Index j = 0; j + 1 < n; ++j) {
    Vector acc = Vector::Zero(f.dim());
    for (Index k = 0; k < k_terms; ++k) {
      acc += ug.col(k).dot(uf.col(j)) * (a(k) / a(k + 1)) * successor(k);
    }
    // (a_j / a_{j-1}) in one-based indices is a(j+1)/a(j) here.
    const Vector res = uf.col(j + 1) - (a(j + 1) / a(j)) * acc;
    worst = std::max(worst, res.norm());
  }
  return worst;
}

}  // namespace dynsamp::sampling

#endif  // DYNSAMP_SAMPLING_HPP
