#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "repro/types.hpp"

namespace repro {

enum class TuningCriterion { aic, bic, cv };

// Frequency table of models selected across residual-bootstrap replicates,
// trimmed from the least frequent end while the removed mass stays within
// 5% of B.
struct BootstrapModelSet {
  std::vector<std::pair<ModelSupport, int>> frequency;  // sorted by support
  int B = 0;
  int failures = 0;
  std::vector<ModelSupport> retained;
  TuningCriterion criterion = TuningCriterion::bic;

  bool retains(const ModelSupport& m) const;
};

struct BootstrapOptions {
  int B = 1000;
  TuningCriterion criterion = TuningCriterion::bic;
  std::uint64_t seed = 0;
  int threads = 1;
  int cv_folds = 5;
};

// Selects one model from (y, X) by fitting an adaptive-LASSO path and
// scoring it with the criterion (AIC/BIC on refit RSS, or K-fold
// cross-validated prediction error).
ModelSupport select_model(const Vector& y, const Matrix& X,
                          TuningCriterion criterion, int cv_folds,
                          std::uint64_t fold_seed);

// Residual bootstrap comparison method: select a model on the observed
// data, resample refit residuals with replacement, re-select per replicate,
// tabulate, then trim.
BootstrapModelSet residual_bootstrap_models(const Dataset& data,
                                            const BootstrapOptions& opts);

// Trimming rule, exposed for direct verification: drop models in
// (count, support) order while the cumulative dropped count stays <= 5% of
// B. Input pairs need not be sorted.
std::vector<ModelSupport> trim_model_table(
    std::vector<std::pair<ModelSupport, int>> frequency, int B);

}  // namespace repro
