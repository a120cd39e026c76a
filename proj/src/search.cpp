#include "repro/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "repro/dist.hpp"
#include "repro/linalg.hpp"
#include "repro/parallel.hpp"
#include "repro/rng.hpp"

namespace repro {

void SearchConfig::validate(int n) const {
  if (d < 1) fail(ErrorCode::invalid_argument, "search: d must be >= 1");
  for (size_t i = 1; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] < lambda_grid[i - 1])) {
      fail(ErrorCode::invalid_argument,
           "search: lambda grid must be strictly decreasing");
    }
  }
  if (mode == SearchMode::constrained && k_max < 1) {
    fail(ErrorCode::invalid_argument, "search: constrained mode needs k_max >= 1");
  }
  if (effective_max_support(n) >= n) {
    fail(ErrorCode::invalid_argument, "search: max_support must be < n");
  }
  if (zeta_low < 0.0 || zeta_high > 1.0 || zeta_low > zeta_high) {
    fail(ErrorCode::invalid_argument, "search: zeta endpoints must satisfy 0 <= low <= high <= 1");
  }
  if (threads < 1) fail(ErrorCode::invalid_argument, "search: threads >= 1");
}

int SearchConfig::effective_max_support(int n) const {
  if (max_support > 0) return max_support;
  return std::max(1, std::min(n - 5, n / 2));
}

bool CandidateSet::contains(const ModelSupport& m) const {
  return std::find(models.begin(), models.end(), m) != models.end();
}

double ebic_value(int n, int p, int support_size, double rss, double zeta) {
  if (rss <= 0.0 || rss / n < 1e-300) {
    return -std::numeric_limits<double>::infinity();
  }
  return n * std::log(rss / n) +
         support_size * std::log(static_cast<double>(n)) +
         2.0 * zeta * log_choose(p, support_size);
}

namespace {

// First index on ties, i.e. the largest lambda of the descending grid.
int argmin_index(const std::vector<double>& scores) {
  int best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

std::vector<ModelSupport> ebic_window(const std::vector<LassoPathEntry>& path,
                                      const Vector& y, const Matrix& X,
                                      double zeta_low, double zeta_high) {
  if (path.empty()) {
    fail(ErrorCode::invalid_argument, "ebic_window: empty path");
  }
  // Each support is scored once on its least-squares refit, so equal
  // supports at different lambdas tie and the window is about models.
  std::vector<double> s_low(path.size()), s_high(path.size());
  const int n = static_cast<int>(y.size());
  const int p = static_cast<int>(X.cols());
  std::map<ModelSupport, double> rss_cache;
  for (size_t i = 0; i < path.size(); ++i) {
    auto it = rss_cache.find(path[i].support);
    if (it == rss_cache.end()) {
      double rss = least_squares(columns(X, path[i].support), y).rss;
      it = rss_cache.emplace(path[i].support, rss).first;
    }
    s_low[i] = ebic_value(n, p, path[i].support.size(), it->second, zeta_low);
    s_high[i] = ebic_value(n, p, path[i].support.size(), it->second, zeta_high);
  }
  int i_low = argmin_index(s_low);
  int i_high = argmin_index(s_high);
  int lo = std::min(i_low, i_high);
  int hi = std::max(i_low, i_high);

  std::vector<ModelSupport> out;
  for (int i = lo; i <= hi; ++i) {
    if (std::find(out.begin(), out.end(), path[i].support) == out.end()) {
      out.push_back(path[i].support);
    }
  }
  return out;
}

ModelSupport largest_support_at_most(const std::vector<LassoPathEntry>& path,
                                     int k) {
  ModelSupport best;
  bool found = false;
  int best_size = -1;
  for (const auto& entry : path) {
    int sz = entry.support.size();
    if (sz > k) continue;
    // >= keeps the later (smaller lambda) entry on size ties.
    if (sz >= best_size) {
      best = entry.support;
      best_size = sz;
      found = true;
    }
  }
  if (!found) return ModelSupport{};
  return best;
}

CandidateSet search_candidates(const Dataset& data, const SearchConfig& config) {
  data.validate();
  const int n = data.n();
  config.validate(n);
  const int cap = config.effective_max_support(n);

  struct CopyResult {
    std::vector<ModelSupport> supports;
    bool failed = false;
  };
  std::vector<CopyResult> results(config.d);
  RngStream root(config.seed);

  LassoOptions opts;
  opts.grid_size = config.grid_size;
  opts.min_ratio = config.lambda_min_ratio;
  opts.stop_support = cap + 5;

  parallel_for(config.d, config.threads, [&](int b) {
    CopyResult& res = results[b];
    try {
      RngStream stream = root.child(stream_tag::search, static_cast<std::uint64_t>(b + 1));
      Vector u = sample_gaussian(n, stream);
      LassoPath path = adaptive_lasso_path(data.y, data.X, &u,
                                           config.lambda_grid, opts);
      std::vector<LassoPathEntry> kept;
      kept.reserve(path.entries.size());
      for (auto& e : path.entries) {
        if (e.support.size() <= cap) kept.push_back(std::move(e));
      }
      if (kept.empty()) return;

      std::vector<ModelSupport> supports;
      if (config.mode == SearchMode::penalized) {
        supports = ebic_window(kept, data.y, data.X, config.zeta_low,
                               config.zeta_high);
      } else {
        for (int k = 1; k <= config.k_max; ++k) {
          ModelSupport s = largest_support_at_most(kept, k);
          if (std::find(supports.begin(), supports.end(), s) == supports.end()) {
            supports.push_back(s);
          }
        }
      }
      res.supports = std::move(supports);
    } catch (const std::exception&) {
      res.failed = true;
    }
  });

  CandidateSet out;
  out.d_used = config.d;
  std::map<ModelSupport, int> index;
  for (int b = 0; b < config.d; ++b) {
    if (results[b].failed) {
      ++out.failures;
      continue;
    }
    for (const auto& s : results[b].supports) {
      auto it = index.find(s);
      if (it == index.end()) {
        index.emplace(s, static_cast<int>(out.models.size()));
        out.models.push_back(s);
        out.hits.push_back(1);
        out.first_hit.push_back(b + 1);
      } else {
        ++out.hits[it->second];
      }
    }
  }
  return out;
}

namespace {

// Enumerates k-subsets of {1..p} in lexicographic order.
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

}  // namespace

double c_min(const Matrix& X, const ModelSupport& tau0, const Vector& beta0) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  tau0.validate(p);
  if (beta0.size() != tau0.size()) {
    fail(ErrorCode::dimension_mismatch, "c_min: beta0 length != |tau0|");
  }
  if (tau0.empty()) {
    fail(ErrorCode::invalid_argument, "c_min: tau0 must be nonempty");
  }
  if (log_choose(p, tau0.size()) > std::log(1e6)) {
    fail(ErrorCode::too_large,
         "c_min: C(p, |tau0|) exceeds the 1e6 enumeration guard");
  }

  Vector mean = columns(X, tau0) * beta0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= tau0.size(); ++k) {
    std::vector<int> comb(k);
    for (int i = 0; i < k; ++i) comb[i] = i + 1;
    while (true) {
      ModelSupport tau;
      tau.indices = comb;
      if (tau != tau0) {
        OrthoBasis basis = ortho_basis(X, tau);
        double resid = basis.residual(mean).squaredNorm();
        int gap = std::max(support_difference(tau0, tau).size(), 1);
        best = std::min(best, resid / (static_cast<double>(n) * gap));
      }
      if (k == 0 || !next_combination(comb, p)) break;
    }
  }
  return best;
}

}  // namespace repro
