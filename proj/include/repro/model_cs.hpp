#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "repro/linalg.hpp"
#include "repro/rng.hpp"
#include "repro/types.hpp"

namespace repro {

// Sufficient statistic (H_tau y, ||(I - H_tau) y||) conditioning the
// resampling scheme.
struct ConditionalStats {
  Vector a_obs;
  double b_obs = 0.0;
  ModelSupport support;
};

ConditionalStats observed_stats(const Dataset& data, const ModelSupport& tau);

// y* = a_obs + b_obs (I - H) u* / ||(I - H) u*||, u* ~ N(0, I_n). The draw
// satisfies H y* = a_obs and ||(I - H) y*|| = b_obs by construction; a draw
// with (I - H) u* numerically zero is rejected and repeated.
Vector conditional_resample(const ConditionalStats& stats,
                            const OrthoBasis& basis, RngStream& stream);
Vector conditional_resample(const ConditionalStats& stats, const Matrix& X,
                            RngStream& stream);

// argmin over |tau| <= k of the least-squares fit of y on X_tau, realized
// as the largest adaptive-LASSO path support of size <= k (size ties
// resolved by refit RSS, then lexicographically). Whenever C(p, k) <= 2e4
// the exact exhaustive minimizer is used instead.
ModelSupport tau_hat_constrained(const Vector& y, const Matrix& X, int k);

// Empirical conditional law of the constrained model estimator given the
// sufficient statistic: counts over J resamples; probabilities are
// count / J exactly.
struct ConditionalPmf {
  ModelSupport tau_b;
  std::vector<std::pair<ModelSupport, int>> counts;  // sorted by support
  int J = 0;

  double prob(const ModelSupport& m) const;
  int count(const ModelSupport& m) const;
};

ConditionalPmf estimate_pmf(const Dataset& data, const ModelSupport& tau_b,
                            int J, RngStream& stream);

// Tail mass sum over atoms no more likely than the observed model. Ties in
// probability are included (weak inequality); a model absent from the table
// has probability zero, hence tail zero.
double tail_probability(const ConditionalPmf& pmf,
                        const ModelSupport& observed_model);

struct ModelCsEntry {
  ModelSupport model;
  double tail_prob = 0.0;
  bool included = false;
  bool error = false;
  std::string error_message;
};

struct ModelConfidenceSet {
  std::vector<ModelCsEntry> entries;  // candidate order preserved
  double alpha = 0.95;
  int J = 0;
  std::uint64_t seed = 0;

  std::vector<ModelSupport> included_models() const;
  bool includes(const ModelSupport& m) const;
  int cardinality() const;
};

struct ModelCsOptions {
  double alpha = 0.95;
  int J = 200;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Level-alpha confidence set for the true model over the candidate list:
// a candidate tau_b is included iff the estimated tail probability of the
// observed constrained estimate is >= 1 - alpha. Per-candidate substreams
// derive from (seed, candidate index), so each entry's randomness is
// independent of the rest of the list.
ModelConfidenceSet model_confidence_set(const Dataset& data,
                                        const std::vector<ModelSupport>& candidates,
                                        const ModelCsOptions& opts);

}  // namespace repro
