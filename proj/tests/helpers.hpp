#pragma once

#include "repro/rng.hpp"
#include "repro/types.hpp"

namespace testutil {

using repro::Matrix;
using repro::RngStream;
using repro::Vector;

inline Matrix random_matrix(int n, int p, RngStream& stream) {
  Matrix X(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = stream.next_normal();
  }
  return X;
}

// Gram-Schmidt orthonormal columns, n >= p.
inline Matrix random_orthonormal(int n, int p, RngStream& stream) {
  Matrix X = random_matrix(n, p, stream);
  for (int j = 0; j < p; ++j) {
    for (int k = 0; k < j; ++k) X.col(j) -= X.col(k).dot(X.col(j)) * X.col(k);
    X.col(j).normalize();
  }
  return X;
}

struct Instance {
  repro::Dataset data;
  repro::ModelSupport tau0;
  Vector beta0;
  double sigma = 1.0;
  Vector u_rel;
};

// Gaussian design, leading-coordinate signals, y = X_tau0 beta0 + sigma u.
inline Instance make_instance(int n, int p, std::vector<double> signals,
                              double sigma, RngStream& stream) {
  Instance inst;
  inst.data.X = random_matrix(n, p, stream);
  std::vector<int> idx;
  Vector beta(signals.size());
  for (size_t k = 0; k < signals.size(); ++k) {
    idx.push_back(static_cast<int>(k) + 1);
    beta[k] = signals[k];
  }
  inst.tau0 = repro::ModelSupport(idx);
  inst.beta0 = beta;
  inst.sigma = sigma;
  inst.u_rel = repro::sample_gaussian(n, stream);
  inst.data.y =
      repro::columns(inst.data.X, inst.tau0) * beta + sigma * inst.u_rel;
  return inst;
}

}  // namespace testutil
