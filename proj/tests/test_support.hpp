#ifndef DYNSAMP_TESTS_TEST_SUPPORT_HPP
#define DYNSAMP_TESTS_TEST_SUPPORT_HPP

#include <initializer_list>

#include "dynsamp/numkit.hpp"

namespace testing_support {

using dynsamp::Complex;
using dynsamp::Index;
using dynsamp::Matrix;
using dynsamp::Vector;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows.begin()->size());
  Matrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Matrix diag(std::initializer_list<double> xs) { return Matrix(vec(xs).asDiagonal()); }

/// delta_{k+1} = T delta_k, zero on the last coordinate.
inline Matrix nilpotent_shift(Index d) {
  Matrix m = Matrix::Zero(d, d);
  for (Index i = 0; i + 1 < d; ++i) m(i + 1, i) = 1.0;
  return m;
}

/// delta_{k+1 mod d} = T delta_k.
inline Matrix circulant_shift(Index d) {
  Matrix m = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) m((i + 1) % d, i) = 1.0;
  return m;
}

inline Vector delta(Index d, Index k) { return dynsamp::numkit::basis_vector(d, k); }

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing_support

#endif  // DYNSAMP_TESTS_TEST_SUPPORT_HPP
