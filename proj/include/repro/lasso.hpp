#pragma once

#include <vector>

#include "repro/types.hpp"

namespace repro {

// w_j = 1 / (|pilot_j| + 1e-4)
Vector adaptive_weights(const Vector& pilot);

// Descending log-spaced grid of `size` points from lambda_max down to
// lambda_min_ratio * lambda_max, where lambda_max = max_j |X_j^T r0| / w_j
// is the smallest lambda with an all-zero penalized solution. When an
// unpenalized column is present, r0 is the residual of y on that column
// alone; otherwise r0 = y.
std::vector<double> default_lambda_grid(const Vector& y, const Matrix& X,
                                        const Vector* unpenalized,
                                        const Vector& weights, int size = 100,
                                        double min_ratio = 1e-3);

struct LassoPathEntry {
  double lambda = 0.0;
  ModelSupport support;
  Vector beta;              // length p, zeros off support
  double sigma_coef = 0.0;  // coefficient of the unpenalized column
};

struct LassoPath {
  std::vector<LassoPathEntry> entries;  // descending lambda order
  Vector weights;                       // adaptive weights actually used
  std::vector<double> grid;
};

struct LassoOptions {
  int grid_size = 100;
  double min_ratio = 1e-3;
  int pilot_grid_size = 50;
  int max_sweeps = 20000;
  double kkt_tol = 1e-8;  // solver target; emitted entries satisfy 1e-6
  // Truncate the path once a support exceeds this size (0 = never). The
  // candidate search sets it just above its support cap; the discarded
  // tail is the region the cap filters out regardless.
  int stop_support = 0;
};

// Adaptive weights from a two-stage pilot: a plain (unit-weight) LASSO path
// is scored by the extended BIC at zeta = 1, the winning support is refit
// by least squares together with the unpenalized column, and the refit
// magnitudes feed adaptive_weights. Columns the pilot drops get weight
// 1 / 1e-4, which prices them out of the weighted stage.
Vector pilot_weights(const Vector& y, const Matrix& X,
                     const Vector* unpenalized, const LassoOptions& opts = {});

// Adaptive-LASSO solution path of
//   (1/2) ||y - X beta - sigma u||^2 + lambda sum_j w_j |beta_j|
// with the optional column u entering unpenalized (it stands in for the
// error scale, never counted as a covariate). Weights come from
// pilot_weights unless overridden. Entries are ordered by descending
// lambda; supports need not be nested. Throws NonConvergence with the
// offending lambda if a grid point fails the KKT check.
LassoPath adaptive_lasso_path(const Vector& y, const Matrix& X,
                              const Vector* unpenalized,
                              std::vector<double> lambda_grid = {},
                              const LassoOptions& opts = {},
                              const Vector* weights_override = nullptr);

// Largest relative KKT violation of (beta, sigma_coef) at lambda:
// stationarity of active coordinates and the unpenalized column, and the
// subgradient bound for inactive ones, each scaled by lambda * w_j.
double kkt_gap(const Vector& y, const Matrix& X, const Vector* unpenalized,
               double lambda, const Vector& weights, const Vector& beta,
               double sigma_coef);

}  // namespace repro
