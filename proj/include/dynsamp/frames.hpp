#ifndef DYNSAMP_FRAMES_HPP
#define DYNSAMP_FRAMES_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynsamp/numkit.hpp"

namespace dynsamp::frames {

enum class IndexModel { natural, periodic };

inline std::string_view to_string(IndexModel m) { return m == IndexModel::natural ? "natural" : "periodic"; }

/// Where an orbit system came from: {a_n T^n phi_j}.
struct Provenance {
  Matrix op;
  std::vector<Vector> generators;
  IndexModel index_model = IndexModel::natural;
  Index period = 0;   // only meaningful for the periodic model
  Index horizon = 0;  // orbit length per generator
};

/// Ordered finite family {f_k}, stored as the columns of a dim x N matrix,
/// with optional nonzero weights folded in by `synthesis`.
class VectorSystem {
 public:
  explicit VectorSystem(Matrix vectors, std::optional<std::vector<Complex>> weights = std::nullopt,
                        std::optional<Provenance> provenance = std::nullopt)
      : vectors_(std::move(vectors)), weights_(std::move(weights)), provenance_(std::move(provenance)) {
    if (vectors_.rows() < 1 || vectors_.cols() < 1) {
      fail(ErrorKind::invalid_input, "vector system needs dim >= 1 and at least one vector");
    }
    numkit::require_finite(vectors_, "vector system");
    if (weights_) {
      if (static_cast<Index>(weights_->size()) != vectors_.cols()) {
        fail(ErrorKind::invalid_input, "vector system: weight count differs from vector count");
      }
      for (const Complex& a : *weights_) {
        if (!(std::abs(a) > 0.0) || !std::isfinite(a.real()) || !std::isfinite(a.imag())) {
          fail(ErrorKind::invalid_input, "vector system: every weight a_n must be a finite nonzero scalar");
        }
      }
    }
  }

  static VectorSystem from_vectors(const std::vector<Vector>& vs) {
    if (vs.empty()) fail(ErrorKind::invalid_input, "vector system needs at least one vector");
    Matrix m(vs.front().size(), static_cast<Index>(vs.size()));
    for (std::size_t k = 0; k < vs.size(); ++k) {
      if (vs[k].size() != m.rows()) fail(ErrorKind::invalid_input, "vector system: vectors differ in dimension");
      m.col(static_cast<Index>(k)) = vs[k];
    }
    return VectorSystem(std::move(m));
  }

  Index dim() const { return vectors_.rows(); }
  Index size() const { return vectors_.cols(); }
  const Matrix& vectors() const { return vectors_; }
  Vector vector(Index k) const { return vectors_.col(k); }
  const std::optional<std::vector<Complex>>& weights() const { return weights_; }
  const std::optional<Provenance>& provenance() const { return provenance_; }

  /// Weighted column k: a_k f_k (or f_k without weights).
  Vector element(Index k) const {
    return weights_ ? Vector((*weights_)[static_cast<std::size_t>(k)] * vectors_.col(k)) : Vector(vectors_.col(k));
  }

 private:
  Matrix vectors_;
  std::optional<std::vector<Complex>> weights_;
  std::optional<Provenance> provenance_;
};

/// dim x N synthesis matrix U, columns a_k f_k.
inline Matrix synthesis(const VectorSystem& sys) {
  Matrix u = sys.vectors();
  if (sys.weights()) {
    for (Index k = 0; k < u.cols(); ++k) u.col(k) *= (*sys.weights())[static_cast<std::size_t>(k)];
  }
  return u;
}

enum class Classification { frame, frame_sequence, bessel_only, riesz_sequence, riesz_basis };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::frame: return "frame";
    case Classification::frame_sequence: return "frame_sequence";
    case Classification::bessel_only: return "bessel_only";
    case Classification::riesz_sequence: return "riesz_sequence";
    case Classification::riesz_basis: return "riesz_basis";
  }
  return "unknown";
}

/// Frame bound reference space: the whole truncation or the closed span.
enum class BoundsRelativeTo { ambient, span };

struct BoundsReport {
  double lower_bound = 0.0;  // optimal A
  double upper_bound = 0.0;  // optimal B
  Index rank = 0;
  bool spans_ambient = false;
  Classification classification = Classification::bessel_only;
  double tol = 0.0;

  bool is_ambient_frame() const {
    return classification == Classification::frame || classification == Classification::riesz_basis;
  }
  bool is_riesz() const {
    return classification == Classification::riesz_sequence || classification == Classification::riesz_basis;
  }
};

inline BoundsReport bounds_of_synthesis(const Matrix& u, BoundsRelativeTo rel, std::optional<double> tol = std::nullopt) {
  const RealVector s = numkit::singular_values(u);
  const Index dim = u.rows();
  const Index n = u.cols();
  BoundsReport r;
  r.upper_bound = s.size() ? s(0) * s(0) : 0.0;
  r.tol = tol.value_or(1e-10 * r.upper_bound);
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) * s(i) > r.tol) ++r.rank;
  }
  r.spans_ambient = r.rank == dim;

  if (r.rank == 0) {
    r.classification = Classification::bessel_only;
  } else if (r.rank == n && n == dim) {
    r.classification = Classification::riesz_basis;
  } else if (r.rank == dim) {
    r.classification = Classification::frame;
  } else if (r.rank == n) {
    r.classification = Classification::riesz_sequence;
  } else {
    r.classification = Classification::frame_sequence;
  }

  const double smallest_nonzero = r.rank > 0 ? s(r.rank - 1) * s(r.rank - 1) : 0.0;
  if (rel == BoundsRelativeTo::ambient) {
    r.lower_bound = r.spans_ambient ? smallest_nonzero : 0.0;
  } else {
    // On the span the lower frame bound and, for independent columns, the
    // lower Riesz bound both equal the smallest nonzero sigma^2.
    r.lower_bound = smallest_nonzero;
  }
  return r;
}

inline BoundsReport frame_bounds(const VectorSystem& sys, BoundsRelativeTo rel = BoundsRelativeTo::ambient,
                                 std::optional<double> tol = std::nullopt) {
  return bounds_of_synthesis(synthesis(sys), rel, tol);
}

/// S = U U*.
inline Matrix frame_operator(const VectorSystem& sys) {
  const Matrix u = synthesis(sys);
  return u * u.adjoint();
}

/// {S^+ f_k} for the (weighted) elements f_k. Reconstructs on the span.
inline VectorSystem canonical_dual(const VectorSystem& sys, std::optional<double> tol = std::nullopt) {
  const BoundsReport b = frame_bounds(sys, BoundsRelativeTo::span, tol);
  if (b.lower_bound <= b.tol || b.rank == 0) {
    fail(ErrorKind::not_a_frame, "canonical_dual: system has no positive lower frame bound on its span");
  }
  const Matrix u = synthesis(sys);
  const Matrix s = u * u.adjoint();
  // Eigenvalues of S are the squared singular values of U, so the same
  // cutoff decides the rank here.
  const Matrix s_pinv = numkit::pinv(s, b.tol);
  return VectorSystem(s_pinv * u);
}

/// T f = sum_k <f, g_k> f_k, i.e. U_F U_G*.
inline Matrix mixed_frame_operator(const VectorSystem& f, const VectorSystem& g) {
  if (f.dim() != g.dim() || f.size() != g.size()) {
    fail(ErrorKind::invalid_input, "mixed_frame_operator: systems differ in dimension or length");
  }
  return synthesis(f) * synthesis(g).adjoint();
}

struct KernelBasis {
  Matrix basis;  // N x k, orthonormal columns spanning ker U
  double tol = 0.0;
  Index dimension() const { return basis.cols(); }
};

/// Orthonormal basis of ker U: right singular vectors whose singular value
/// is at most tol * sigma_max, plus the trailing ones when N > dim.
inline KernelBasis kernel_synthesis(const VectorSystem& sys, double tol = 1e-10) {
  const Matrix u = synthesis(sys);
  const numkit::Svd d = numkit::svd(u);
  const Index n = u.cols();
  const double smax = d.sigma.size() ? d.sigma(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < d.sigma.size(); ++i) {
    if (d.sigma(i) > tol * smax) ++rank;
  }
  return KernelBasis{d.v.rightCols(n - rank), tol};
}

/// Entry n-1 is the optimal lower Riesz bound of the first n elements,
/// sigma_min(U_{1..n})^2, and zero once n exceeds the dimension.
inline std::vector<double> lower_riesz_profile(const VectorSystem& sys) {
  const Matrix u = synthesis(sys);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(u.cols()));
  for (Index n = 1; n <= u.cols(); ++n) {
    if (n > u.rows()) {
      out.push_back(0.0);
      continue;
    }
    const RealVector s = numkit::singular_values(u.leftCols(n));
    const double smin = s(s.size() - 1);
    out.push_back(smin * smin);
  }
  return out;
}

/// {T e_k} for an orthonormal basis {e_k}; its optimal Bessel bound is ||T||^2.
inline VectorSystem bessel_from_operator(const Matrix& t, const VectorSystem& basis) {
  numkit::require_square(t, "bessel_from_operator operator");
  const Matrix e = synthesis(basis);
  if (e.rows() != t.rows() || e.cols() != e.rows()) {
    fail(ErrorKind::invalid_input, "bessel_from_operator: basis must have exactly dim vectors of the operator's dimension");
  }
  const Matrix gram = e.adjoint() * e;
  if ((gram - numkit::identity(e.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    fail(ErrorKind::invalid_input, "bessel_from_operator: basis is not orthonormal");
  }
  return VectorSystem(t * e);
}

}  // namespace dynsamp::frames

#endif  // DYNSAMP_FRAMES_HPP
