#pragma once

#include "repro/types.hpp"

namespace repro {

// Thin orthonormal factor spanning a column space. Projections are applied
// as Q (Q^T v); the n x n projection matrix is never materialized.
struct OrthoBasis {
  Matrix Q;           // n x rank, orthonormal columns
  int rank = 0;
  bool rank_deficient = false;  // rank < number of source columns

  int n() const { return static_cast<int>(Q.rows()); }

  // H v
  Vector project(const Vector& v) const;
  // (I - H) v
  Vector residual(const Vector& v) const;
};

// Orthonormal basis of an arbitrary column block. Directions with singular
// value below 1e-10 times the largest are dropped. A zero-column input
// yields rank 0 (the projection is the zero map).
OrthoBasis ortho_basis(const Matrix& cols);

// Basis of span(X_support); the empty support gives the rank-0 basis.
OrthoBasis ortho_basis(const Matrix& X, const ModelSupport& support);

struct LeastSquares {
  Vector coef;
  Vector fitted;
  double rss = 0.0;
};

// Minimum-norm least squares of y on X_sub (rank-deficient safe).
LeastSquares least_squares(const Matrix& X_sub, const Vector& y);

// Squared cosine of the angle between two nonzero vectors; lies in [0, 1]
// and is invariant to rescaling either argument.
double cosine_sim_sq(const Vector& v1, const Vector& v2);

}  // namespace repro
