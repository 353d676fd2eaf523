#ifndef DYNSAMP_RANDOM_HPP
#define DYNSAMP_RANDOM_HPP

#include <cstdint>
#include <random>

#include <Eigen/QR>

#include "dynsamp/numkit.hpp"

namespace dynsamp::rnd {

using Rng = std::mt19937_64;

/// Independent stream for (seed, index), stable across worker layouts.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index uniform_int(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Entries with i.i.d. standard normal real and imaginary parts.
inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

inline Vector gaussian_vector(Index dim, Rng& rng) { return gaussian_matrix(dim, 1, rng).col(0); }

inline Vector unit_vector(Index dim, Rng& rng) {
  Vector v = gaussian_vector(dim, rng);
  return v / v.norm();
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase of R's diagonal removed).
inline Matrix unitary(Index dim, Rng& rng) {
  const Matrix g = gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// Random matrix rescaled to operator norm `norm`.
inline Matrix contraction(Index dim, double norm, Rng& rng) {
  const Matrix g = gaussian_matrix(dim, dim, rng);
  return g * (norm / numkit::operator_norm(g));
}

/// Diagonal matrix with entries of modulus in [lo, hi] and uniform phases.
inline Matrix diagonal_contraction(Index dim, double lo, double hi, Rng& rng, bool real_positive = false) {
  Matrix m = Matrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const double r = uniform(rng, lo, hi);
    m(i, i) = real_positive ? Complex(r, 0.0) : std::polar(r, uniform(rng, 0.0, 2.0 * M_PI));
  }
  return m;
}

/// Random matrix with spectral radius exactly `rho`.
inline Matrix with_spectral_radius(Index dim, double rho, Rng& rng) {
  const Matrix g = gaussian_matrix(dim, dim, rng);
  return g * (rho / numkit::spectral_radius(g));
}

/// T = Q [[C, X], [0, Y]] Q* with ||C|| = mu, so V = Q[:, :m] is invariant and
/// T contracts it by mu.
struct InvariantBlock {
  Matrix t;
  Matrix v;
};

inline InvariantBlock invariant_block(const Matrix& q, Index m, double mu, Rng& rng, double coupling = 0.5,
                                      double outer_norm = 0.9) {
  const Index d = q.rows();
  Matrix block = Matrix::Zero(d, d);
  block.topLeftCorner(m, m) = contraction(m, mu, rng);
  if (m < d) {
    block.topRightCorner(m, d - m) = coupling * gaussian_matrix(m, d - m, rng) / std::sqrt(static_cast<double>(d));
    block.bottomRightCorner(d - m, d - m) = contraction(d - m, outer_norm, rng);
  }
  return {q * block * q.adjoint(), q.leftCols(m)};
}

inline InvariantBlock invariant_block(Index d, Index m, double mu, Rng& rng) {
  const Matrix q = unitary(d, rng);
  return invariant_block(q, m, mu, rng);
}

}  // namespace dynsamp::rnd

#endif  // DYNSAMP_RANDOM_HPP
