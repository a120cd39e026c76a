#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace repro {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  empty_support,
  invalid_level,
  zero_vector,
  non_convergence,
  too_large,
  degenerate_residual,
  degenerate_denominator,
  singular_transform,
  parse_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// Index set of active covariates. Indices are 1-based, strictly increasing,
// within [1, p]. The empty support is valid and denotes the null model.
struct ModelSupport {
  std::vector<int> indices;

  ModelSupport() = default;
  explicit ModelSupport(std::vector<int> idx);

  int size() const { return static_cast<int>(indices.size()); }
  bool empty() const { return indices.empty(); }
  bool contains(int i) const;

  // Throws unless all indices lie in [1, p].
  void validate(int p) const;

  bool operator==(const ModelSupport& o) const { return indices == o.indices; }
  bool operator!=(const ModelSupport& o) const { return !(*this == o); }
  bool operator<(const ModelSupport& o) const { return indices < o.indices; }
};

// Response vector plus design matrix; the (y_obs, X) pair every operation
// consumes.
struct Dataset {
  Vector y;
  Matrix X;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }

  // Enforces: length match, finite entries, no all-zero columns.
  void validate() const;
};

// Columns of X selected by a support, preserving support order.
Matrix columns(const Matrix& X, const ModelSupport& support);

// Set helpers on sorted 1-based index lists.
ModelSupport support_union(const ModelSupport& a, const ModelSupport& b);
ModelSupport support_intersect(const ModelSupport& a, const ModelSupport& b);
ModelSupport support_difference(const ModelSupport& a, const ModelSupport& b);
ModelSupport full_support(int p);

std::string to_string(const ModelSupport& s);

}  // namespace repro
