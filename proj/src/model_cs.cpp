#include "repro/model_cs.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <map>

#include "repro/dist.hpp"
#include "repro/lasso.hpp"
#include "repro/parallel.hpp"

namespace repro {

ConditionalStats observed_stats(const Dataset& data, const ModelSupport& tau) {
  data.validate();
  tau.validate(data.p());
  if (tau.size() >= data.n()) {
    fail(ErrorCode::invalid_argument, "observed_stats: |tau| must be < n");
  }
  OrthoBasis basis = ortho_basis(data.X, tau);
  ConditionalStats stats;
  stats.support = tau;
  stats.a_obs = basis.project(data.y);
  stats.b_obs = (data.y - stats.a_obs).norm();
  if (stats.b_obs < 1e-12) {
    fail(ErrorCode::degenerate_residual,
         "observed_stats: y lies in span(X_tau)");
  }
  return stats;
}

Vector conditional_resample(const ConditionalStats& stats,
                            const OrthoBasis& basis, RngStream& stream) {
  const int n = static_cast<int>(stats.a_obs.size());
  if (stats.b_obs == 0.0) return stats.a_obs;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector u = sample_gaussian(n, stream);
    Vector e = basis.residual(u);
    double norm = e.norm();
    if (norm >= 1e-12) {
      return stats.a_obs + (stats.b_obs / norm) * e;
    }
  }
  fail(ErrorCode::degenerate_residual,
       "conditional_resample: residual direction vanished repeatedly");
}

Vector conditional_resample(const ConditionalStats& stats, const Matrix& X,
                            RngStream& stream) {
  OrthoBasis basis = ortho_basis(X, stats.support);
  return conditional_resample(stats, basis, stream);
}

namespace {

bool next_combination(std::vector<int>& comb, int p) {
  int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[i] < p - (k - 1 - i)) {
      ++comb[i];
      for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// RSS of y on the Gram submatrix of tau; any solution of G z = b gives the
// projection residual, so semidefinite G is fine.
double gram_rss(const Matrix& G, const Vector& b, double yty,
                const std::vector<int>& tau) {
  int k = static_cast<int>(tau.size());
  if (k == 0) return yty;
  Matrix Gs(k, k);
  Vector bs(k);
  for (int i = 0; i < k; ++i) {
    bs[i] = b[tau[i] - 1];
    for (int j = 0; j < k; ++j) Gs(i, j) = G(tau[i] - 1, tau[j] - 1);
  }
  Vector z = Gs.ldlt().solve(bs);
  double rss = yty - bs.dot(z);
  return rss > 0.0 ? rss : 0.0;
}

ModelSupport exhaustive_best_subset(const Vector& y, const Matrix& X, int k) {
  const int p = static_cast<int>(X.cols());
  Matrix G = X.transpose() * X;
  Vector b = X.transpose() * y;
  double yty = y.squaredNorm();
  double tol = 1e-9 * std::max(1.0, yty);

  ModelSupport best;
  double best_rss = yty;  // empty model
  for (int size = 1; size <= k; ++size) {
    std::vector<int> comb(size);
    for (int i = 0; i < size; ++i) comb[i] = i + 1;
    while (true) {
      double rss = gram_rss(G, b, yty, comb);
      if (rss < best_rss - tol) {
        best_rss = rss;
        best.indices = comb;
      }
      if (!next_combination(comb, p)) break;
    }
  }
  return best;
}

ModelSupport path_best_subset(const Vector& y, const Matrix& X, int k) {
  LassoOptions opts;
  opts.stop_support = k + 10;  // larger supports can never be selected
  std::vector<LassoPathEntry> path =
      adaptive_lasso_path(y, X, nullptr, {}, opts).entries;
  int best_size = -1;
  for (const auto& e : path) {
    if (e.support.size() <= k) best_size = std::max(best_size, e.support.size());
  }
  if (best_size <= 0) return ModelSupport{};

  std::vector<ModelSupport> ties;
  for (const auto& e : path) {
    if (e.support.size() == best_size &&
        std::find(ties.begin(), ties.end(), e.support) == ties.end()) {
      ties.push_back(e.support);
    }
  }
  if (ties.size() == 1) return ties.front();
  ModelSupport best = ties.front();
  double best_rss = least_squares(columns(X, best), y).rss;
  for (size_t i = 1; i < ties.size(); ++i) {
    double rss = least_squares(columns(X, ties[i]), y).rss;
    if (rss < best_rss - 1e-12 * std::max(1.0, y.squaredNorm()) ||
        (std::fabs(rss - best_rss) <= 1e-12 * std::max(1.0, y.squaredNorm()) &&
         ties[i] < best)) {
      best = ties[i];
      best_rss = rss;
    }
  }
  return best;
}

}  // namespace

ModelSupport tau_hat_constrained(const Vector& y, const Matrix& X, int k) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (k <= 0) return ModelSupport{};
  if (k >= n) {
    fail(ErrorCode::invalid_argument, "tau_hat_constrained: k must be < n");
  }
  int kk = std::min(k, p);
  if (log_choose(p, kk) <= std::log(2e4)) {
    return exhaustive_best_subset(y, X, kk);
  }
  return path_best_subset(y, X, kk);
}

double ConditionalPmf::prob(const ModelSupport& m) const {
  return J > 0 ? static_cast<double>(count(m)) / J : 0.0;
}

int ConditionalPmf::count(const ModelSupport& m) const {
  auto it = std::lower_bound(
      counts.begin(), counts.end(), m,
      [](const std::pair<ModelSupport, int>& e, const ModelSupport& key) {
        return e.first < key;
      });
  if (it != counts.end() && it->first == m) return it->second;
  return 0;
}

ConditionalPmf estimate_pmf(const Dataset& data, const ModelSupport& tau_b,
                            int J, RngStream& stream) {
  if (J < 1) fail(ErrorCode::invalid_argument, "estimate_pmf: J must be >= 1");
  ConditionalStats stats = observed_stats(data, tau_b);
  OrthoBasis basis = ortho_basis(data.X, tau_b);
  std::map<ModelSupport, int> table;
  for (int j = 0; j < J; ++j) {
    Vector y_star = conditional_resample(stats, basis, stream);
    ModelSupport tau_hat = tau_hat_constrained(y_star, data.X, tau_b.size());
    ++table[tau_hat];
  }
  ConditionalPmf pmf;
  pmf.tau_b = tau_b;
  pmf.J = J;
  pmf.counts.assign(table.begin(), table.end());
  return pmf;
}

double tail_probability(const ConditionalPmf& pmf,
                        const ModelSupport& observed_model) {
  int observed = pmf.count(observed_model);
  long total = 0;
  for (const auto& [model, count] : pmf.counts) {
    if (count <= observed) total += count;
  }
  return pmf.J > 0 ? static_cast<double>(total) / pmf.J : 0.0;
}

std::vector<ModelSupport> ModelConfidenceSet::included_models() const {
  std::vector<ModelSupport> out;
  for (const auto& e : entries) {
    if (e.included) out.push_back(e.model);
  }
  return out;
}

bool ModelConfidenceSet::includes(const ModelSupport& m) const {
  for (const auto& e : entries) {
    if (e.included && e.model == m) return true;
  }
  return false;
}

int ModelConfidenceSet::cardinality() const {
  int c = 0;
  for (const auto& e : entries) c += e.included ? 1 : 0;
  return c;
}

ModelConfidenceSet model_confidence_set(const Dataset& data,
                                        const std::vector<ModelSupport>& candidates,
                                        const ModelCsOptions& opts) {
  data.validate();
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) {
    fail(ErrorCode::invalid_level, "model_confidence_set: alpha in (0, 1)");
  }
  if (candidates.empty()) {
    fail(ErrorCode::invalid_argument, "model_confidence_set: no candidates");
  }
  if (opts.J < 1) {
    fail(ErrorCode::invalid_argument, "model_confidence_set: J must be >= 1");
  }

  ModelConfidenceSet out;
  out.alpha = opts.alpha;
  out.J = opts.J;
  out.seed = opts.seed;
  out.entries.resize(candidates.size());

  RngStream root(opts.seed);
  const double threshold = 1.0 - opts.alpha;
  parallel_for(static_cast<int>(candidates.size()), opts.threads, [&](int i) {
    ModelCsEntry& entry = out.entries[i];
    entry.model = candidates[i];
    try {
      if (candidates[i].empty()) {
        // k = 0 pins the estimator to the empty model; its tail mass is 1.
        entry.tail_prob = 1.0;
        entry.included = entry.tail_prob >= threshold;
        return;
      }
      RngStream stream =
          root.child(stream_tag::model_cs, static_cast<std::uint64_t>(i + 1));
      ConditionalPmf pmf = estimate_pmf(data, candidates[i], opts.J, stream);
      ModelSupport observed =
          tau_hat_constrained(data.y, data.X, candidates[i].size());
      entry.tail_prob = tail_probability(pmf, observed);
      entry.included = entry.tail_prob >= threshold;
    } catch (const Error& e) {
      entry.error = true;
      entry.error_message = e.what();
      entry.included = false;
    } catch (const std::exception& e) {
      entry.error = true;
      entry.error_message = e.what();
      entry.included = false;
    }
  });
  return out;
}

}  // namespace repro
