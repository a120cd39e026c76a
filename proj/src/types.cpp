#include "repro/types.hpp"

#include <algorithm>
#include <sstream>

namespace repro {

ModelSupport::ModelSupport(std::vector<int> idx) : indices(std::move(idx)) {
  std::sort(indices.begin(), indices.end());
  auto last = std::unique(indices.begin(), indices.end());
  if (last != indices.end()) {
    fail(ErrorCode::invalid_argument, "support has duplicate indices");
  }
}

bool ModelSupport::contains(int i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

void ModelSupport::validate(int p) const {
  for (int i : indices) {
    if (i < 1 || i > p) {
      fail(ErrorCode::invalid_argument,
           "support index " + std::to_string(i) + " outside [1, " +
               std::to_string(p) + "]");
    }
  }
}

void Dataset::validate() const {
  if (y.size() != X.rows()) {
    fail(ErrorCode::dimension_mismatch,
         "y has length " + std::to_string(y.size()) + " but X has " +
             std::to_string(X.rows()) + " rows");
  }
  if (X.rows() < 1 || X.cols() < 1) {
    fail(ErrorCode::invalid_argument, "dataset must have n >= 1 and p >= 1");
  }
  if (!y.allFinite() || !X.allFinite()) {
    fail(ErrorCode::invalid_argument, "dataset contains non-finite entries");
  }
  for (int j = 0; j < X.cols(); ++j) {
    if (X.col(j).cwiseAbs().maxCoeff() == 0.0) {
      fail(ErrorCode::invalid_argument,
           "column " + std::to_string(j + 1) + " of X is all zero");
    }
  }
}

Matrix columns(const Matrix& X, const ModelSupport& support) {
  support.validate(static_cast<int>(X.cols()));
  Matrix out(X.rows(), support.size());
  for (int k = 0; k < support.size(); ++k) {
    out.col(k) = X.col(support.indices[k] - 1);
  }
  return out;
}

ModelSupport support_union(const ModelSupport& a, const ModelSupport& b) {
  ModelSupport out;
  std::set_union(a.indices.begin(), a.indices.end(), b.indices.begin(),
                 b.indices.end(), std::back_inserter(out.indices));
  return out;
}

ModelSupport support_intersect(const ModelSupport& a, const ModelSupport& b) {
  ModelSupport out;
  std::set_intersection(a.indices.begin(), a.indices.end(), b.indices.begin(),
                        b.indices.end(), std::back_inserter(out.indices));
  return out;
}

ModelSupport support_difference(const ModelSupport& a, const ModelSupport& b) {
  ModelSupport out;
  std::set_difference(a.indices.begin(), a.indices.end(), b.indices.begin(),
                      b.indices.end(), std::back_inserter(out.indices));
  return out;
}

ModelSupport full_support(int p) {
  ModelSupport out;
  out.indices.resize(p);
  for (int i = 0; i < p; ++i) out.indices[i] = i + 1;
  return out;
}

std::string to_string(const ModelSupport& s) {
  std::ostringstream os;
  os << '{';
  for (size_t k = 0; k < s.indices.size(); ++k) {
    if (k) os << ',';
    os << s.indices[k];
  }
  os << '}';
  return os.str();
}

}  // namespace repro
