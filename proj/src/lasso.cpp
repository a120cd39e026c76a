#include "repro/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "repro/dist.hpp"
#include "repro/linalg.hpp"

namespace repro {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

std::vector<LassoPathEntry> solve_path(const Vector& y, const Matrix& X,
                                       const Vector* unpenalized,
                                       const std::vector<double>& lambda_grid,
                                       const Vector& weights,
                                       const LassoOptions& opts) {
  const int p = static_cast<int>(X.cols());

  Vector col_sq(p);
  for (int j = 0; j < p; ++j) col_sq[j] = X.col(j).squaredNorm();
  double usq = unpenalized != nullptr ? unpenalized->squaredNorm() : 0.0;

  Vector beta = Vector::Zero(p);
  double sigma_coef = 0.0;
  Vector r = y;
  std::vector<int> active;
  std::vector<char> in_active(p, 0);

  auto update_coord = [&](int j, double lambda) {
    double z = X.col(j).dot(r) + col_sq[j] * beta[j];
    double bn = soft_threshold(z, lambda * weights[j]) / col_sq[j];
    if (bn != beta[j]) {
      r += X.col(j) * (beta[j] - bn);
      beta[j] = bn;
    }
  };
  auto update_sigma = [&]() {
    if (unpenalized == nullptr || usq <= 0.0) return;
    double z = unpenalized->dot(r) + usq * sigma_coef;
    double sn = z / usq;
    if (sn != sigma_coef) {
      r += (*unpenalized) * (sigma_coef - sn);
      sigma_coef = sn;
    }
  };

  std::vector<LassoPathEntry> path;
  path.reserve(lambda_grid.size());
  const double change_tol = 1e-12 * (1.0 + y.norm());

  for (double lambda : lambda_grid) {
    int sweeps = 0;
    while (true) {
      double max_change;
      do {
        max_change = 0.0;
        for (int j : active) {
          double old = beta[j];
          update_coord(j, lambda);
          max_change = std::max(
              max_change, std::fabs(beta[j] - old) * std::sqrt(col_sq[j]));
        }
        update_sigma();
        ++sweeps;
        if (sweeps > opts.max_sweeps) break;
      } while (max_change > change_tol);

      // Full scan for violators of the subgradient bound.
      Vector g = X.transpose() * r;
      bool added = false;
      for (int j = 0; j < p; ++j) {
        if (in_active[j]) continue;
        if (std::fabs(g[j]) > lambda * weights[j] * (1.0 + 1e-12)) {
          active.push_back(j);
          in_active[j] = 1;
          added = true;
        }
      }
      ++sweeps;
      if (!added) {
        double gap =
            kkt_gap(y, X, unpenalized, lambda, weights, beta, sigma_coef);
        if (gap <= opts.kkt_tol) break;
      }
      if (sweeps > opts.max_sweeps) {
        double gap =
            kkt_gap(y, X, unpenalized, lambda, weights, beta, sigma_coef);
        if (gap <= 1e-6) break;  // still within the contract
        std::ostringstream os;
        os << "adaptive lasso did not converge at lambda=" << lambda
           << " (kkt gap " << gap << ")";
        fail(ErrorCode::non_convergence, os.str());
      }
    }

    std::vector<int> still;
    still.reserve(active.size());
    for (int j : active) {
      if (beta[j] != 0.0) {
        still.push_back(j);
      } else {
        in_active[j] = 0;
      }
    }
    active = std::move(still);

    LassoPathEntry entry;
    entry.lambda = lambda;
    entry.beta = beta;
    entry.sigma_coef = sigma_coef;
    std::vector<int> idx;
    idx.reserve(active.size());
    for (int j : active) idx.push_back(j + 1);
    std::sort(idx.begin(), idx.end());
    entry.support.indices = std::move(idx);
    path.push_back(std::move(entry));
    if (opts.stop_support > 0 &&
        path.back().support.size() > opts.stop_support) {
      break;
    }
  }
  return path;
}

void check_inputs(const Vector& y, const Matrix& X, const Vector* unpenalized) {
  if (y.size() != X.rows()) {
    fail(ErrorCode::dimension_mismatch, "adaptive_lasso_path: y length");
  }
  if (unpenalized != nullptr && unpenalized->size() != X.rows()) {
    fail(ErrorCode::dimension_mismatch, "adaptive_lasso_path: u length");
  }
}

void check_grid(const std::vector<double>& grid) {
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] < grid[i - 1])) {
      fail(ErrorCode::invalid_argument,
           "lambda grid must be strictly decreasing");
    }
  }
  if (!grid.empty() && grid.back() <= 0.0) {
    fail(ErrorCode::invalid_argument, "lambda grid must be positive");
  }
}

}  // namespace

Vector adaptive_weights(const Vector& pilot) {
  return (pilot.cwiseAbs().array() + 1e-4).inverse().matrix();
}

std::vector<double> default_lambda_grid(const Vector& y, const Matrix& X,
                                        const Vector* unpenalized,
                                        const Vector& weights, int size,
                                        double min_ratio) {
  Vector r0 = y;
  if (unpenalized != nullptr) {
    double usq = unpenalized->squaredNorm();
    if (usq > 0.0) r0 -= (*unpenalized) * (unpenalized->dot(y) / usq);
  }
  Vector g = (X.transpose() * r0).cwiseAbs().cwiseQuotient(weights);
  double lambda_max = g.maxCoeff();
  if (!(lambda_max > 0.0)) lambda_max = 1.0;
  std::vector<double> grid(size);
  double log_max = std::log(lambda_max);
  double log_min = std::log(lambda_max * min_ratio);
  for (int i = 0; i < size; ++i) {
    double t = size == 1 ? 0.0 : static_cast<double>(i) / (size - 1);
    grid[i] = std::exp(log_max + t * (log_min - log_max));
  }
  return grid;
}

Vector pilot_weights(const Vector& y, const Matrix& X,
                     const Vector* unpenalized, const LassoOptions& opts) {
  check_inputs(y, X, unpenalized);
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());

  // A refit pilot only makes sense while it leaves residual degrees of
  // freedom, so the plain path stops once supports pass min(n - 5, n / 2).
  int pilot_cap = std::max(1, std::min(n - 5, n / 2));
  LassoOptions pilot_opts = opts;
  pilot_opts.stop_support =
      opts.stop_support > 0 ? std::min(opts.stop_support, pilot_cap)
                            : pilot_cap;

  Vector unit = Vector::Ones(p);
  std::vector<double> grid = default_lambda_grid(
      y, X, unpenalized, unit, opts.pilot_grid_size, opts.min_ratio);
  std::vector<LassoPathEntry> plain =
      solve_path(y, X, unpenalized, grid, unit, pilot_opts);

  // Score entries with the zeta = 1 extended BIC on the penalized fit;
  // rss = ||y - X beta||^2 keeps the error estimate out of the covariates.
  double best_score = std::numeric_limits<double>::infinity();
  const ModelSupport* best = nullptr;
  for (const auto& entry : plain) {
    if (entry.support.size() > pilot_opts.stop_support) continue;
    double rss = (y - X * entry.beta).squaredNorm();
    double score;
    if (rss <= 0.0 || rss / n < 1e-300) {
      score = -std::numeric_limits<double>::infinity();
    } else {
      score = n * std::log(rss / n) +
              entry.support.size() * std::log(static_cast<double>(n)) +
              2.0 * log_choose(p, entry.support.size());
    }
    if (score < best_score) {
      best_score = score;
      best = &entry.support;
    }
  }

  Vector pilot = Vector::Zero(p);
  if (best != nullptr && !best->empty()) {
    Matrix Xs = columns(X, *best);
    Matrix design(n, Xs.cols() + (unpenalized != nullptr ? 1 : 0));
    design.leftCols(Xs.cols()) = Xs;
    if (unpenalized != nullptr) design.col(Xs.cols()) = *unpenalized;
    Vector coef = least_squares(design, y).coef;
    for (int k = 0; k < best->size(); ++k) {
      pilot[best->indices[k] - 1] = coef[k];
    }
  }
  return adaptive_weights(pilot);
}

double kkt_gap(const Vector& y, const Matrix& X, const Vector* unpenalized,
               double lambda, const Vector& weights, const Vector& beta,
               double sigma_coef) {
  Vector r = y - X * beta;
  if (unpenalized != nullptr) r -= (*unpenalized) * sigma_coef;
  Vector g = X.transpose() * r;
  double gap = 0.0;
  for (int j = 0; j < X.cols(); ++j) {
    double t = lambda * weights[j];
    if (beta[j] != 0.0) {
      double s = beta[j] > 0.0 ? 1.0 : -1.0;
      gap = std::max(gap, std::fabs(g[j] / t - s));
    } else {
      gap = std::max(gap, std::max(0.0, std::fabs(g[j]) / t - 1.0));
    }
  }
  if (unpenalized != nullptr) {
    double un = unpenalized->norm();
    double scale = un * std::max(1.0, y.norm());
    if (scale > 0.0) {
      gap = std::max(gap, std::fabs(unpenalized->dot(r)) / scale);
    }
  }
  return gap;
}

LassoPath adaptive_lasso_path(const Vector& y, const Matrix& X,
                              const Vector* unpenalized,
                              std::vector<double> lambda_grid,
                              const LassoOptions& opts,
                              const Vector* weights_override) {
  check_inputs(y, X, unpenalized);
  LassoPath out;
  if (weights_override != nullptr) {
    if (weights_override->size() != X.cols()) {
      fail(ErrorCode::dimension_mismatch, "adaptive_lasso_path: weights length");
    }
    out.weights = *weights_override;
  } else {
    out.weights = pilot_weights(y, X, unpenalized, opts);
  }
  if (lambda_grid.empty()) {
    lambda_grid = default_lambda_grid(y, X, unpenalized, out.weights,
                                      opts.grid_size, opts.min_ratio);
  }
  check_grid(lambda_grid);
  out.entries = solve_path(y, X, unpenalized, lambda_grid, out.weights, opts);
  out.grid = std::move(lambda_grid);
  return out;
}

}  // namespace repro
