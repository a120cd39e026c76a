#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "repro/baselines.hpp"
#include "repro/types.hpp"

namespace repro {

// Generating parameters retained beside each simulated dataset.
struct GroundTruth {
  ModelSupport tau0;
  Vector beta0;   // over tau0, no zero entries
  double sigma0 = 1.0;
  Vector u_rel;   // realized standardized error
};

struct ScenarioConfig {
  std::string name = "custom";
  int n = 50;
  int p = 1000;
  // Leading coefficients of beta; zeros inside the head are allowed and
  // fall outside tau0. Coordinates past the head are zero.
  std::vector<double> beta_head = {3.0, 2.0, 1.5};
  double corr_decay = 0.5;  // Sigma_{j1 j2} = corr_decay^{|j1 - j2|}
  double sigma = 1.0;
  int replications = 200;
  int d = 1000;
  int J = 200;
  double alpha = 0.95;
  int B_bootstrap = 1000;
  std::uint64_t seed = 0;
  int threads = 1;

  // Which pipeline stages the replication driver runs and scores.
  bool run_model_cs = true;
  bool run_coef = true;
  bool run_joint = true;
  bool run_bootstrap = true;
  std::vector<TuningCriterion> bootstrap_criteria = {TuningCriterion::bic};

  void validate() const;
  ModelSupport tau0() const;
  Vector beta0() const;
};

// The three study designs at full scale.
ScenarioConfig scenario_m1();
ScenarioConfig scenario_m2();
ScenarioConfig scenario_m3();
// Shrinks (R, d, B), never (n, p), so the statistical regime is intact.
void apply_desk_scale(ScenarioConfig& config);

struct MetricRow {
  std::string method;
  std::string metric;
  double mean = 0.0;
  double se = 0.0;
  int count = 0;  // replications contributing
};

struct SimReport {
  std::string scenario;
  int replications = 0;
  int failures = 0;
  std::vector<MetricRow> rows;
  // Report metadata, recorded verbatim in the emitted files.
  bool regenerate_design_per_rep = true;
  bool restandardize_covariates = false;

  const MetricRow* find(const std::string& method,
                        const std::string& metric) const;
};

// Draws X with AR(1) rows (unit-variance marginals, geometric correlation)
// and y = X_tau0 beta0 + sigma u_rel. Deterministic per (seed, rep).
std::pair<Dataset, GroundTruth> generate(const ScenarioConfig& scenario,
                                         int rep);

// Full replication driver: per rep runs candidate search, the confidence
// set stages enabled in the config, and bootstrap baselines, scores them
// against the ground truth, and aggregates mean / standard error per
// metric. Failed replications are skipped and counted.
SimReport run_replications(const ScenarioConfig& scenario);

}  // namespace repro
