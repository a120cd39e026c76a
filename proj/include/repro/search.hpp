#pragma once

#include <cstdint>
#include <vector>

#include "repro/lasso.hpp"
#include "repro/types.hpp"

namespace repro {

enum class SearchMode { penalized, constrained };

struct SearchConfig {
  int d = 1000;                      // number of repro copies
  std::vector<double> lambda_grid;   // empty -> automatic per copy
  int grid_size = 100;
  double lambda_min_ratio = 1e-3;
  SearchMode mode = SearchMode::penalized;
  int k_max = 0;       // constrained mode: model-size cap, >= 1
  int max_support = 0; // 0 -> min(n - 5, n / 2)
  double zeta_low = 0.0;
  double zeta_high = 1.0;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate(int n) const;
  int effective_max_support(int n) const;
};

// Deduplicated model supports recovered across the repro copies, with the
// number of copies that produced each model and the first copy that did.
struct CandidateSet {
  std::vector<ModelSupport> models;
  std::vector<int> hits;
  std::vector<int> first_hit;  // 1-based repro copy index
  int d_used = 0;
  int failures = 0;

  bool contains(const ModelSupport& m) const;
};

// EBIC_zeta = n log(rss/n) + k log n + 2 zeta log C(p, k). Zero-RSS fits
// score -inf and win.
double ebic_value(int n, int p, int support_size, double rss, double zeta);

// Supports of every lambda in the closed interval between the zeta_low and
// zeta_high EBIC minimizers, deduplicated in path order. Entries are scored
// on a least-squares refit of their support.
std::vector<ModelSupport> ebic_window(const std::vector<LassoPathEntry>& path,
                                      const Vector& y, const Matrix& X,
                                      double zeta_low = 0.0,
                                      double zeta_high = 1.0);

// Largest path support of size <= k, ties broken toward smaller lambda.
// Returns the empty support when nothing on the path fits.
ModelSupport largest_support_at_most(const std::vector<LassoPathEntry>& path,
                                     int k);

// Algorithm: draw d repro copies u*_b, solve the penalized objective on
// (y, [X, u*_b]) via the adaptive-LASSO surrogate, select per-copy supports
// (EBIC window in penalized mode; size-capped path maxima in constrained
// mode), and pool them. Deterministic given (data, config, seed); failed
// copies are skipped and counted.
CandidateSet search_candidates(const Dataset& data, const SearchConfig& config);

// Degree of separation between (tau0, beta0) and every competing model of
// equal or smaller size:
//   min over tau != tau0, |tau| <= |tau0| of
//     ||X_tau0 beta0 - H_tau X_tau0 beta0||^2 / (n max(|tau0 \ tau|, 1)).
// Brute-force enumeration; throws TooLarge when C(p, |tau0|) > 1e6.
double c_min(const Matrix& X, const ModelSupport& tau0, const Vector& beta0);

}  // namespace repro
