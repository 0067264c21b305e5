#pragma once

#include "l1h/linalg.hpp"
#include "l1h/rng.hpp"

namespace l1h::testing {

inline Matrix randn(Index rows, Index cols, Rng& rng, double sigma = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = sigma * rng.normal();
  return m;
}

inline Vector randn(Index n, Rng& rng, double sigma = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = sigma * rng.normal();
  return v;
}

inline Matrix random_spd(Index n, Rng& rng) {
  const Matrix b = randn(n + 3, n, rng);
  return b.transpose() * b + 0.1 * Matrix::Identity(n, n);
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace l1h::testing
