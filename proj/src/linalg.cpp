#include "repro/linalg.hpp"

#include <Eigen/SVD>

namespace repro {

namespace {
constexpr double kRankTol = 1e-10;
}

Vector OrthoBasis::project(const Vector& v) const {
  if (v.size() != Q.rows()) {
    fail(ErrorCode::dimension_mismatch, "project: vector length mismatch");
  }
  if (rank == 0) return Vector::Zero(v.size());
  return Q * (Q.transpose() * v);
}

Vector OrthoBasis::residual(const Vector& v) const {
  if (v.size() != Q.rows()) {
    fail(ErrorCode::dimension_mismatch, "project: vector length mismatch");
  }
  if (rank == 0) return v;
  return v - Q * (Q.transpose() * v);
}

OrthoBasis ortho_basis(const Matrix& cols) {
  OrthoBasis basis;
  if (cols.cols() == 0) {
    basis.Q = Matrix::Zero(cols.rows(), 0);
    return basis;
  }
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double tol = kRankTol * sv(0);
  int r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  basis.Q = svd.matrixU().leftCols(r);
  basis.rank = r;
  basis.rank_deficient = r < cols.cols();
  return basis;
}

OrthoBasis ortho_basis(const Matrix& X, const ModelSupport& support) {
  if (support.empty()) {
    OrthoBasis basis;
    basis.Q = Matrix::Zero(X.rows(), 0);
    return basis;
  }
  return ortho_basis(columns(X, support));
}

LeastSquares least_squares(const Matrix& X_sub, const Vector& y) {
  if (X_sub.rows() != y.size()) {
    fail(ErrorCode::dimension_mismatch, "least_squares: row count mismatch");
  }
  LeastSquares out;
  if (X_sub.cols() == 0) {
    out.coef = Vector::Zero(0);
    out.fitted = Vector::Zero(y.size());
    out.rss = y.squaredNorm();
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(X_sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double tol = kRankTol * sv(0);
  Vector uty = svd.matrixU().transpose() * y;
  Vector z = Vector::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) z(i) = uty(i) / sv(i);
  }
  out.coef = svd.matrixV() * z;
  out.fitted = X_sub * out.coef;
  out.rss = (y - out.fitted).squaredNorm();
  return out;
}

double cosine_sim_sq(const Vector& v1, const Vector& v2) {
  if (v1.size() != v2.size()) {
    fail(ErrorCode::dimension_mismatch, "cosine_sim_sq: length mismatch");
  }
  double n1 = v1.squaredNorm();
  double n2 = v2.squaredNorm();
  if (n1 == 0.0 || n2 == 0.0) {
    fail(ErrorCode::zero_vector, "cosine_sim_sq requires nonzero vectors");
  }
  double dot = v1.dot(v2);
  double r = (dot * dot) / (n1 * n2);
  return r > 1.0 ? 1.0 : r;
}

}  // namespace repro
