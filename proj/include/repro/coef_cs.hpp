#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "repro/model_cs.hpp"
#include "repro/rng.hpp"
#include "repro/search.hpp"
#include "repro/types.hpp"

namespace repro {

// One per-model component of a coefficient confidence set: an ellipsoid
// over the active coordinates (Lambda intersect tau) with the remaining
// Lambda coordinates pinned to exactly zero.
struct EllipsoidRegion {
  ModelSupport support;       // the model tau behind this component
  std::vector<int> active;    // Lambda intersect tau (1-based)
  Vector center;              // over active coords
  Matrix shape;               // positive definite Gram over active coords
  double radius2 = 0.0;
  std::vector<int> pinned;    // Lambda minus tau, forced to zero

  // beta_lambda indexed like the enclosing union's lambda_set.
  bool contains(const std::vector<int>& lambda_set,
                const Vector& beta_lambda) const;
};

struct RegionUnion {
  std::vector<EllipsoidRegion> regions;
  double alpha = 0.95;
  std::vector<int> lambda_set;  // 1-based target coordinates
  bool includes_zero_atom = false;

  bool contains(const Vector& beta_lambda) const;
};

// Disjoint sorted closed intervals plus an optional atom at zero.
struct IntervalUnion {
  std::vector<std::pair<double, double>> intervals;
  bool zero_atom = false;

  bool contains(double x) const;
  // Total Lebesgue length; atoms contribute zero.
  double width() const;
};

std::vector<std::pair<double, double>> merge_intervals(
    std::vector<std::pair<double, double>> intervals);

// Nuclear statistic for beta_Lambda under model tau (three-case map):
//   +inf                      if beta_i != 0 for some i in Lambda \ tau
//   0                         if Lambda and tau are disjoint (all beta zero)
//   [r' O r / |Lambda ^ tau|] / [r' (I - H_tau) r / (n - |tau|)]  otherwise,
// with r = y - X_Lambda beta_Lambda and O the projection onto
// (I - H_{tau \ Lambda}) X_{Lambda ^ tau}. The finite case is F
// distributed with (|Lambda ^ tau|, n - |tau|) degrees of freedom at the
// generating parameters.
double nuclear_subset(const Vector& y, const Matrix& X,
                      const std::vector<int>& lambda_set,
                      const Vector& beta_lambda, const ModelSupport& tau);

// Joint special case (Lambda = {1..p}), taking the full-length beta.
double nuclear_joint(const Vector& y, const Matrix& X, const Vector& beta_full,
                     const ModelSupport& tau);

// Closed-form level-alpha component for one model. Throws on a rank
// deficient active block.
EllipsoidRegion subset_region(const Vector& y, const Matrix& X,
                              const std::vector<int>& lambda_set,
                              const ModelSupport& tau, double alpha);

// Union over candidate models; components that fail (rank deficiency,
// degenerate residual) are dropped.
RegionUnion subset_conf_region(const Vector& y, const Matrix& X,
                               const std::vector<int>& lambda_set,
                               const std::vector<ModelSupport>& candidates,
                               double alpha);

// Union of per-model t-intervals for coordinate i, plus the zero atom
// whenever some candidate model excludes i.
IntervalUnion single_coef_ci(const Vector& y, const Matrix& X, int i,
                             const std::vector<ModelSupport>& candidates,
                             double alpha);

// Joint confidence set for the full coefficient vector: per-model
// ellipsoids in beta_tau with every other coordinate pinned to zero.
RegionUnion joint_conf_set(const Vector& y, const Matrix& X,
                           const std::vector<ModelSupport>& candidates,
                           double alpha);

// Fraction of the p coordinates pinned to [0, 0] in every region.
double shrunk_proportion(const RegionUnion& joint, int p);

struct FunctionalResult {
  IntervalUnion interval;
  int samples_per_region = 0;  // zero for the exact linear route
  bool exact = false;
};

// Exact support-function interval of a linear functional c'beta + c0 over
// each region of a joint union, merged.
FunctionalResult functional_linear(const RegionUnion& joint, const Vector& c,
                                   double intercept = 0.0);

// Monte-Carlo hull of an arbitrary functional: uniform draws inside each
// ellipsoid mapped through h, reported as per-region min/max hulls.
FunctionalResult functional_conf_set(
    const RegionUnion& joint, int p,
    const std::function<double(const Vector&)>& h, int samples_per_region,
    RngStream& stream);

struct TransformInference {
  RegionUnion region;        // confidence set for L beta
  CandidateSet candidates;   // searched on the transformed design
};

// Inference for L beta via the change of variables beta~ = L~ beta with
// L~ = [L; (0, I)]. The candidate search reruns on (y, X L~^{-1}) and the
// subset machinery targets the first l transformed coordinates. Throws
// SingularTransform when L~ is singular or has condition number >= 1e8.
TransformInference linear_transform_inference(const Matrix& L,
                                              const Dataset& data,
                                              const SearchConfig& config,
                                              double alpha);

// Remark-style two-stage set: model confidence set at alpha1, per-model
// regions at alpha2, reported level alpha1 + alpha2 - 1. Both levels must
// lie in (1/2, 1).
RegionUnion modified_conf_set(const Dataset& data,
                              const std::vector<ModelSupport>& candidates,
                              double alpha1, double alpha2,
                              const std::vector<int>& lambda_set, int J,
                              std::uint64_t seed, int threads = 1);

}  // namespace repro
