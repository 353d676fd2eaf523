#ifndef DYNSAMP_NUMKIT_HPP
#define DYNSAMP_NUMKIT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "dynsamp/error.hpp"

namespace dynsamp {

using Complex = std::complex<double>;
using Index = Eigen::Index;
/// Dense operator on the truncated space (or a rectangular synthesis map).
using Matrix = Eigen::MatrixXcd;
/// Vector in the truncated space, coordinates w.r.t. the canonical basis.
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace numkit {

inline constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    fail(ErrorKind::invalid_input, std::string(what) + " has non-finite entries");
  }
}

inline void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorKind::invalid_input, std::string(what) + " must be a non-empty square matrix");
  }
}

inline Matrix identity(Index dim) { return Matrix::Identity(dim, dim); }

/// e_k in C^dim (zero-based k).
inline Vector basis_vector(Index dim, Index k) {
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return v;
}

inline bool is_hermitian(const Matrix& m, double rel_tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= rel_tol * m.norm();
}

struct Svd {
  Matrix u;
  RealVector sigma;  // descending
  Matrix v;
};

/// Full SVD, M = U diag(sigma) V*. Works for rectangular input.
inline Svd svd(const Matrix& m) {
  require_finite(m, "svd input");
  if (m.size() == 0) fail(ErrorKind::invalid_input, "svd of an empty matrix");
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Svd{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

inline RealVector singular_values(const Matrix& m) {
  require_finite(m, "svd input");
  if (m.size() == 0) return RealVector();
  Eigen::BDCSVD<Matrix> dec(m);
  return dec.singularValues();
}

/// Spectral norm, the largest singular value.
inline double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  RealVector s = singular_values(m);
  return s.size() ? s(0) : 0.0;
}

struct HermitianEig {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns
};

inline HermitianEig eig_hermitian(const Matrix& m) {
  require_square(m, "eig_hermitian input");
  require_finite(m, "eig_hermitian input");
  if (!is_hermitian(m)) fail(ErrorKind::invalid_input, "eig_hermitian: matrix is not Hermitian");
  // The solver reads only the lower triangle; feed it the Hermitian part.
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) fail(ErrorKind::no_convergence, "Hermitian eigensolver failed");
  return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

/// Moore-Penrose pseudo-inverse. Singular values <= rank_tol are treated as
/// zero; the default is max(rows, cols) * eps * sigma_max.
inline Matrix pinv(const Matrix& m, std::optional<double> rank_tol = std::nullopt) {
  if (rank_tol && *rank_tol < 0.0) fail(ErrorKind::invalid_input, "pinv: negative rank tolerance");
  Svd d = svd(m);
  const double smax = d.sigma.size() ? d.sigma(0) : 0.0;
  const double cut = rank_tol.value_or(static_cast<double>(std::max(m.rows(), m.cols())) * kEpsilon * smax);
  const Index r = d.sigma.size();
  Matrix out = Matrix::Zero(m.cols(), m.rows());
  for (Index i = 0; i < r; ++i) {
    if (d.sigma(i) > cut) {
      out += (d.v.col(i) / d.sigma(i)) * d.u.col(i).adjoint();
    }
  }
  return out;
}

/// Number of singular values strictly above rel_tol * sigma_max.
inline Index numerical_rank(const Matrix& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return 0;
  RealVector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++r;
  }
  return r;
}

/// Orthonormal basis for the column space (singular values > rel_tol * sigma_max).
inline Matrix orthonormal_range(const Matrix& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return Matrix(m.rows(), 0);
  Svd d = svd(m);
  Index r = 0;
  if (d.sigma.size() && d.sigma(0) > 0.0) {
    for (Index i = 0; i < d.sigma.size(); ++i) {
      if (d.sigma(i) > rel_tol * d.sigma(0)) ++r;
    }
  }
  return d.u.leftCols(r);
}

namespace detail {

inline double psd_dust_threshold(const HermitianEig& e) {
  const double scale = e.values.size() ? e.values.cwiseAbs().maxCoeff() : 0.0;
  return 1e-10 * scale;
}

inline void require_psd(const HermitianEig& e) {
  const double thr = psd_dust_threshold(e);
  if (e.values.size() && e.values(0) < -thr) {
    fail(ErrorKind::not_psd, "matrix has eigenvalue " + std::to_string(e.values(0)) + " below -1e-10*||M||");
  }
}

inline Matrix spectral_function(const HermitianEig& e, RealVector mapped) {
  return e.vectors * mapped.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

}  // namespace detail

/// Principal square root of a Hermitian PSD matrix. Eigenvalue dust above
/// -1e-10*||M|| is clamped to zero.
inline Matrix sqrt_psd(const Matrix& m) {
  HermitianEig e = eig_hermitian(m);
  detail::require_psd(e);
  RealVector r = e.values.cwiseMax(0.0).cwiseSqrt();
  return detail::spectral_function(e, r);
}

/// M^{-1/2} for Hermitian positive definite M. Eigenvalues at or below
/// rel_tol * lambda_max make the input count as singular.
inline Matrix inv_sqrt_pd(const Matrix& m, double rel_tol = 1e-12) {
  HermitianEig e = eig_hermitian(m);
  detail::require_psd(e);
  const double top = e.values.size() ? e.values.maxCoeff() : 0.0;
  if (e.values.size() == 0 || e.values(0) <= rel_tol * top || top <= 0.0) {
    fail(ErrorKind::not_psd, "inv_sqrt_pd: matrix is not positive definite");
  }
  RealVector r = e.values.cwiseSqrt().cwiseInverse();
  return detail::spectral_function(e, r);
}

/// max |lambda| over the eigenvalues of a general square matrix.
inline double spectral_radius(const Matrix& m) {
  require_square(m, "spectral_radius input");
  require_finite(m, "spectral_radius input");
  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() == Eigen::Success) {
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  // Gelfand formula on repeated squares, renormalised to avoid overflow.
  Matrix p = m;
  double log_scale = 0.0;
  double estimate = operator_norm(m);
  for (int k = 1; k <= 40; ++k) {
    const double n = p.norm();
    if (n == 0.0) return 0.0;
    p /= n;
    log_scale = 2.0 * (log_scale + std::log(n));
    p = p * p;
    const double pn = p.norm();
    if (pn == 0.0) return 0.0;
    estimate = std::exp((log_scale + std::log(pn)) / std::ldexp(1.0, k));
  }
  return estimate;
}

enum class SteinMethod { vectorized_solve, doubling_iteration };

inline std::string_view to_string(SteinMethod m) {
  return m == SteinMethod::vectorized_solve ? "vectorized-solve" : "doubling-iteration";
}

struct SteinSolution {
  Matrix s;         // Hermitian PSD
  double residual;  // ||S - T S T* - C||_F
  SteinMethod method;
  int iterations;
};

inline double stein_residual(const Matrix& t, const Matrix& c, const Matrix& s) {
  return (s - t * s * t.adjoint() - c).norm();
}

inline constexpr Index kSteinVectorizedMaxDim = 64;
inline constexpr int kSteinMaxDoublings = 200;

/// Solves S - T S T* = C, i.e. S = sum_{n>=0} T^n C T*^n, for rho(T) < 1.
/// Small problems use the Kronecker-vectorised linear system; larger ones
/// use squaring: S <- S + T_k S T_k*, T_k <- T_k^2.
inline SteinSolution solve_stein(const Matrix& t, const Matrix& c, double tol = 1e-12,
                                 std::optional<SteinMethod> force = std::nullopt) {
  require_square(t, "solve_stein operator");
  require_finite(t, "solve_stein operator");
  require_finite(c, "solve_stein right-hand side");
  if (c.rows() != t.rows() || c.cols() != t.cols()) {
    fail(ErrorKind::invalid_input, "solve_stein: operator and right-hand side dimensions differ");
  }
  if (!is_hermitian(c)) fail(ErrorKind::invalid_input, "solve_stein: right-hand side is not Hermitian");
  if (!(tol > 0.0)) fail(ErrorKind::invalid_input, "solve_stein: tolerance must be positive");

  const double rho = spectral_radius(t);
  if (rho >= 1.0 - 1e-8) {
    fail(ErrorKind::divergent_series,
         "solve_stein: spectral radius " + std::to_string(rho) + " >= 1 - 1e-8, the series diverges");
  }

  const Index d = t.rows();
  const double bound = tol * (1.0 + c.norm());
  const SteinMethod method = force.value_or(d <= kSteinVectorizedMaxDim ? SteinMethod::vectorized_solve
                                                                         : SteinMethod::doubling_iteration);
  Matrix s;
  int iterations = 0;

  if (method == SteinMethod::vectorized_solve) {
    // Column-major vec: vec(T S T*) = (conj(T) kron T) vec(S).
    const Index n = d * d;
    Matrix k = Matrix::Identity(n, n);
    const Matrix tc = t.conjugate();
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i < d; ++i) {
        k.block(i * d, j * d, d, d) -= tc(i, j) * t;
      }
    }
    Eigen::PartialPivLU<Matrix> lu(k);
    Vector rhs = Eigen::Map<const Vector>(c.data(), n);
    Vector x = lu.solve(rhs);
    iterations = 1;
    // A couple of refinement sweeps recover the last digits for
    // ill-conditioned (rho close to 1) operators.
    for (int sweep = 0; sweep < 3; ++sweep) {
      Matrix trial = Eigen::Map<Matrix>(x.data(), d, d);
      if (stein_residual(t, c, trial) <= 0.25 * bound) break;
      Vector r = rhs - k * x;
      x += lu.solve(r);
      ++iterations;
    }
    s = Eigen::Map<Matrix>(x.data(), d, d);
  } else {
    s = c;
    Matrix tk = t;
    bool converged = false;
    while (iterations < kSteinMaxDoublings) {
      Matrix update = tk * s * tk.adjoint();
      s += update;
      tk = tk * tk;
      ++iterations;
      if (update.norm() < bound) {
        converged = true;
        break;
      }
    }
    if (!converged) fail(ErrorKind::no_convergence, "solve_stein: doubling iteration cap exceeded");
  }

  s = 0.5 * (s + s.adjoint());
  const double residual = stein_residual(t, c, s);
  if (!(residual <= bound)) {
    fail(ErrorKind::no_convergence,
         "solve_stein: residual " + std::to_string(residual) + " exceeds tolerance " + std::to_string(bound));
  }
  return SteinSolution{std::move(s), residual, method, iterations};
}

}  // namespace numkit
}  // namespace dynsamp

#endif  // DYNSAMP_NUMKIT_HPP
