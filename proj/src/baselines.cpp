#include "repro/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "repro/lasso.hpp"
#include "repro/linalg.hpp"
#include "repro/parallel.hpp"
#include "repro/rng.hpp"

namespace repro {

namespace {

double information_score(const Vector& y, const Matrix& X,
                         const ModelSupport& tau, bool bic) {
  const int n = static_cast<int>(y.size());
  double rss = least_squares(columns(X, tau), y).rss;
  if (rss <= 0.0 || rss / n < 1e-300) {
    return -std::numeric_limits<double>::infinity();
  }
  double penalty = bic ? tau.size() * std::log(static_cast<double>(n))
                       : 2.0 * tau.size();
  return n * std::log(rss / n) + penalty;
}

LassoOptions baseline_lasso_options(int n) {
  LassoOptions opts;
  opts.stop_support = std::max(1, std::min(n - 5, n / 2));
  return opts;
}

// Single-stage adaptive-lasso weights from a ridge pilot, the standard
// literature construction this comparison method stands for. (The repro
// pipeline's two-stage pilot would make the bootstrap selection far more
// stable than the baseline being benchmarked.)
Vector baseline_weights(const Vector& y, const Matrix& X) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  double kappa = 1e-3 * X.squaredNorm() / p;
  if (kappa <= 0.0) kappa = 1e-8;
  Vector ridge;
  if (p <= n) {
    Matrix G = X.transpose() * X;
    G.diagonal().array() += kappa;
    ridge = G.ldlt().solve(X.transpose() * y);
  } else {
    Matrix K = X * X.transpose();
    K.diagonal().array() += kappa;
    ridge = X.transpose() * K.ldlt().solve(y);
  }
  return adaptive_weights(ridge);
}

ModelSupport select_by_information(const Vector& y, const Matrix& X,
                                   bool bic) {
  Vector weights = baseline_weights(y, X);
  std::vector<LassoPathEntry> path =
      adaptive_lasso_path(y, X, nullptr, {},
                          baseline_lasso_options(static_cast<int>(y.size())),
                          &weights)
          .entries;
  int best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  std::map<ModelSupport, double> cache;
  for (size_t i = 0; i < path.size(); ++i) {
    auto it = cache.find(path[i].support);
    if (it == cache.end()) {
      it = cache.emplace(path[i].support,
                         information_score(y, X, path[i].support, bic))
               .first;
    }
    if (it->second < best_score) {
      best_score = it->second;
      best = static_cast<int>(i);
    }
  }
  return path[best].support;
}

ModelSupport select_by_cv(const Vector& y, const Matrix& X, int folds,
                          std::uint64_t fold_seed) {
  const int n = static_cast<int>(y.size());
  folds = std::min(folds, n);
  LassoOptions opts = baseline_lasso_options(n);

  // Shared grid across folds so errors are comparable per lambda. Paths
  // may stop early at the support cap; only grid points every fold
  // reached enter the comparison.
  Vector weights = baseline_weights(y, X);
  std::vector<double> grid =
      default_lambda_grid(y, X, nullptr, weights, opts.grid_size,
                          opts.min_ratio);

  RngStream stream = RngStream(fold_seed).child(stream_tag::cv_folds);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(stream.next_below(i + 1));
    std::swap(perm[i], perm[j]);
  }

  std::vector<double> err(grid.size(), 0.0);
  size_t usable = grid.size();
  for (int f = 0; f < folds; ++f) {
    std::vector<int> test, train;
    for (int i = 0; i < n; ++i) {
      (i % folds == f ? test : train).push_back(perm[i]);
    }
    if (test.empty() || train.empty()) continue;
    Matrix Xtr(train.size(), X.cols()), Xte(test.size(), X.cols());
    Vector ytr(train.size()), yte(test.size());
    for (size_t i = 0; i < train.size(); ++i) {
      Xtr.row(i) = X.row(train[i]);
      ytr[i] = y[train[i]];
    }
    for (size_t i = 0; i < test.size(); ++i) {
      Xte.row(i) = X.row(test[i]);
      yte[i] = y[test[i]];
    }
    Vector fold_weights = baseline_weights(ytr, Xtr);
    LassoPath path =
        adaptive_lasso_path(ytr, Xtr, nullptr, grid, opts, &fold_weights);
    usable = std::min(usable, path.entries.size());
    for (size_t g = 0; g < path.entries.size(); ++g) {
      Vector pred = Xte * path.entries[g].beta;
      err[g] += (yte - pred).squaredNorm();
    }
  }
  LassoPath path = adaptive_lasso_path(y, X, nullptr, grid, opts, &weights);
  usable = std::min(usable, path.entries.size());
  int best = 0;
  for (size_t g = 1; g < usable; ++g) {
    if (err[g] < err[best]) best = static_cast<int>(g);
  }
  return path.entries[best].support;
}

}  // namespace

ModelSupport select_model(const Vector& y, const Matrix& X,
                          TuningCriterion criterion, int cv_folds,
                          std::uint64_t fold_seed) {
  switch (criterion) {
    case TuningCriterion::aic:
      return select_by_information(y, X, false);
    case TuningCriterion::bic:
      return select_by_information(y, X, true);
    case TuningCriterion::cv:
      return select_by_cv(y, X, cv_folds, fold_seed);
  }
  fail(ErrorCode::invalid_argument, "unknown tuning criterion");
}

std::vector<ModelSupport> trim_model_table(
    std::vector<std::pair<ModelSupport, int>> frequency, int B) {
  // Trim order: lowest count first, lexicographic support on count ties.
  std::sort(frequency.begin(), frequency.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second < b.second;
              return a.first < b.first;
            });
  double budget = 0.05 * B;
  long removed = 0;
  size_t cut = 0;
  while (cut < frequency.size() &&
         removed + frequency[cut].second <= budget) {
    removed += frequency[cut].second;
    ++cut;
  }
  std::vector<ModelSupport> retained;
  retained.reserve(frequency.size() - cut);
  for (size_t i = cut; i < frequency.size(); ++i) {
    retained.push_back(frequency[i].first);
  }
  std::sort(retained.begin(), retained.end());
  return retained;
}

bool BootstrapModelSet::retains(const ModelSupport& m) const {
  return std::binary_search(retained.begin(), retained.end(), m);
}

BootstrapModelSet residual_bootstrap_models(const Dataset& data,
                                            const BootstrapOptions& opts) {
  data.validate();
  if (opts.B < 1) {
    fail(ErrorCode::invalid_argument, "bootstrap: B must be >= 1");
  }
  const int n = data.n();
  RngStream root(opts.seed);

  ModelSupport base_model = select_model(data.y, data.X, opts.criterion,
                                         opts.cv_folds, opts.seed);
  LeastSquares fit = least_squares(columns(data.X, base_model), data.y);
  Vector residuals = data.y - fit.fitted;

  struct Rep {
    ModelSupport model;
    bool failed = false;
  };
  std::vector<Rep> reps(opts.B);
  parallel_for(opts.B, opts.threads, [&](int b) {
    try {
      RngStream stream =
          root.child(stream_tag::bootstrap, static_cast<std::uint64_t>(b + 1));
      Vector y_star(n);
      for (int i = 0; i < n; ++i) {
        y_star[i] =
            fit.fitted[i] +
            residuals[static_cast<int>(stream.next_below(n))];
      }
      reps[b].model = select_model(y_star, data.X, opts.criterion,
                                   opts.cv_folds, stream.next_u64());
    } catch (const std::exception&) {
      reps[b].failed = true;
    }
  });

  BootstrapModelSet out;
  out.B = opts.B;
  out.criterion = opts.criterion;
  std::map<ModelSupport, int> table;
  for (const auto& rep : reps) {
    if (rep.failed) {
      ++out.failures;
      continue;
    }
    ++table[rep.model];
  }
  out.frequency.assign(table.begin(), table.end());
  out.retained = trim_model_table(out.frequency, opts.B);
  return out;
}

}  // namespace repro
