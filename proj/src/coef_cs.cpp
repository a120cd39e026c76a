#include "repro/coef_cs.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "repro/dist.hpp"
#include "repro/linalg.hpp"

namespace repro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lambda_set(const std::vector<int>& lambda_set, int p) {
  if (lambda_set.empty()) {
    fail(ErrorCode::invalid_argument, "lambda set must be nonempty");
  }
  for (size_t k = 0; k < lambda_set.size(); ++k) {
    if (lambda_set[k] < 1 || lambda_set[k] > p) {
      fail(ErrorCode::invalid_argument, "lambda set index outside [1, p]");
    }
    if (k > 0 && lambda_set[k] <= lambda_set[k - 1]) {
      fail(ErrorCode::invalid_argument, "lambda set must be strictly increasing");
    }
  }
}

}  // namespace

bool EllipsoidRegion::contains(const std::vector<int>& lambda_set,
                               const Vector& beta_lambda) const {
  if (static_cast<int>(lambda_set.size()) != beta_lambda.size()) {
    fail(ErrorCode::dimension_mismatch, "region membership: beta length");
  }
  Vector beta_active(active.size());
  for (size_t k = 0; k < lambda_set.size(); ++k) {
    int idx = lambda_set[k];
    auto it = std::lower_bound(active.begin(), active.end(), idx);
    if (it != active.end() && *it == idx) {
      beta_active[it - active.begin()] = beta_lambda[k];
    } else if (beta_lambda[k] != 0.0) {
      return false;  // pinned coordinate off zero
    }
  }
  if (active.empty()) return true;
  Vector diff = beta_active - center;
  return diff.dot(shape * diff) <= radius2;
}

bool RegionUnion::contains(const Vector& beta_lambda) const {
  for (const auto& region : regions) {
    if (region.contains(lambda_set, beta_lambda)) return true;
  }
  return false;
}

bool IntervalUnion::contains(double x) const {
  if (zero_atom && x == 0.0) return true;
  for (const auto& [lo, hi] : intervals) {
    if (x >= lo && x <= hi) return true;
  }
  return false;
}

double IntervalUnion::width() const {
  double total = 0.0;
  for (const auto& [lo, hi] : intervals) total += hi - lo;
  return total;
}

std::vector<std::pair<double, double>> merge_intervals(
    std::vector<std::pair<double, double>> intervals) {
  std::sort(intervals.begin(), intervals.end());
  std::vector<std::pair<double, double>> out;
  for (const auto& iv : intervals) {
    if (!out.empty() && iv.first <= out.back().second) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

double nuclear_subset(const Vector& y, const Matrix& X,
                      const std::vector<int>& lambda_set,
                      const Vector& beta_lambda, const ModelSupport& tau) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  check_lambda_set(lambda_set, p);
  tau.validate(p);
  if (static_cast<int>(lambda_set.size()) != beta_lambda.size()) {
    fail(ErrorCode::dimension_mismatch, "nuclear_subset: beta length");
  }
  if (tau.size() >= n) {
    fail(ErrorCode::invalid_argument, "nuclear_subset: |tau| must be < n");
  }

  ModelSupport lambda;
  lambda.indices = lambda_set;
  ModelSupport active = support_intersect(lambda, tau);

  for (size_t k = 0; k < lambda_set.size(); ++k) {
    if (!tau.contains(lambda_set[k]) && beta_lambda[k] != 0.0) return kInf;
  }
  if (active.empty()) return 0.0;

  Vector r = y - columns(X, lambda) * beta_lambda;
  OrthoBasis tau_basis = ortho_basis(X, tau);
  double denom_ss = tau_basis.residual(r).squaredNorm();
  if (denom_ss < 1e-12) {
    fail(ErrorCode::degenerate_denominator,
         "nuclear_subset: residual sum of squares vanished");
  }
  ModelSupport rest = support_difference(tau, lambda);
  OrthoBasis rest_basis = ortho_basis(X, rest);
  Matrix Z = columns(X, active);
  for (int k = 0; k < Z.cols(); ++k) {
    Z.col(k) = rest_basis.residual(Z.col(k));
  }
  OrthoBasis o_basis = ortho_basis(Z);
  double numer_ss = o_basis.project(r).squaredNorm();

  double numer = numer_ss / active.size();
  double denom = denom_ss / (n - tau.size());
  return numer / denom;
}

double nuclear_joint(const Vector& y, const Matrix& X, const Vector& beta_full,
                     const ModelSupport& tau) {
  const int p = static_cast<int>(X.cols());
  std::vector<int> lambda(p);
  for (int i = 0; i < p; ++i) lambda[i] = i + 1;
  return nuclear_subset(y, X, lambda, beta_full, tau);
}

EllipsoidRegion subset_region(const Vector& y, const Matrix& X,
                              const std::vector<int>& lambda_set,
                              const ModelSupport& tau, double alpha) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  check_lambda_set(lambda_set, p);
  tau.validate(p);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorCode::invalid_level, "subset_region: alpha in (0, 1)");
  }
  if (tau.size() >= n) {
    fail(ErrorCode::invalid_argument, "subset_region: |tau| must be < n");
  }

  ModelSupport lambda;
  lambda.indices = lambda_set;
  ModelSupport active = support_intersect(lambda, tau);
  ModelSupport pinned = support_difference(lambda, tau);

  EllipsoidRegion region;
  region.support = tau;
  region.active = active.indices;
  region.pinned = pinned.indices;
  if (active.empty()) {
    // The nuclear value is identically zero: the component is the single
    // point with every Lambda coordinate at zero.
    region.center = Vector::Zero(0);
    region.shape = Matrix::Zero(0, 0);
    region.radius2 = 0.0;
    return region;
  }

  ModelSupport rest = support_difference(tau, lambda);
  OrthoBasis rest_basis = ortho_basis(X, rest);
  Matrix Z = columns(X, active);
  for (int k = 0; k < Z.cols(); ++k) {
    Z.col(k) = rest_basis.residual(Z.col(k));
  }
  LeastSquares fit = least_squares(Z, y);
  OrthoBasis z_basis = ortho_basis(Z);
  if (z_basis.rank < active.size()) {
    fail(ErrorCode::invalid_argument,
         "subset_region: partialled active block is rank deficient");
  }

  OrthoBasis tau_basis = ortho_basis(X, tau);
  double rss_tau = tau_basis.residual(y).squaredNorm();
  double sigma2 = rss_tau / (n - tau.size());

  region.center = fit.coef;
  region.shape = Z.transpose() * Z;
  region.radius2 = active.size() * sigma2 *
                   f_quantile(active.size(), n - tau.size(), alpha);
  return region;
}

RegionUnion subset_conf_region(const Vector& y, const Matrix& X,
                               const std::vector<int>& lambda_set,
                               const std::vector<ModelSupport>& candidates,
                               double alpha) {
  if (candidates.empty()) {
    fail(ErrorCode::invalid_argument, "subset_conf_region: no candidates");
  }
  RegionUnion out;
  out.alpha = alpha;
  out.lambda_set = lambda_set;
  for (const auto& tau : candidates) {
    try {
      EllipsoidRegion region = subset_region(y, X, lambda_set, tau, alpha);
      if (region.active.empty()) out.includes_zero_atom = true;
      out.regions.push_back(std::move(region));
    } catch (const Error&) {
      // dropped component
    }
  }
  return out;
}

IntervalUnion single_coef_ci(const Vector& y, const Matrix& X, int i,
                             const std::vector<ModelSupport>& candidates,
                             double alpha) {
  const int p = static_cast<int>(X.cols());
  if (i < 1 || i > p) {
    fail(ErrorCode::invalid_argument, "single_coef_ci: index outside [1, p]");
  }
  IntervalUnion out;
  std::vector<std::pair<double, double>> raw;
  for (const auto& tau : candidates) {
    if (!tau.contains(i)) {
      out.zero_atom = true;
      continue;
    }
    try {
      EllipsoidRegion region = subset_region(y, X, {i}, tau, alpha);
      double s = region.shape(0, 0);
      if (!(s > 0.0)) continue;
      double half = std::sqrt(region.radius2 / s);
      raw.emplace_back(region.center[0] - half, region.center[0] + half);
    } catch (const Error&) {
      // dropped component
    }
  }
  out.intervals = merge_intervals(std::move(raw));
  return out;
}

RegionUnion joint_conf_set(const Vector& y, const Matrix& X,
                           const std::vector<ModelSupport>& candidates,
                           double alpha) {
  const int p = static_cast<int>(X.cols());
  return subset_conf_region(y, X, full_support(p).indices, candidates, alpha);
}

double shrunk_proportion(const RegionUnion& joint, int p) {
  std::vector<char> free_coord(p + 1, 0);
  for (const auto& region : joint.regions) {
    for (int i : region.active) free_coord[i] = 1;
  }
  int pinned_everywhere = 0;
  for (int i = 1; i <= p; ++i) pinned_everywhere += free_coord[i] ? 0 : 1;
  return static_cast<double>(pinned_everywhere) / p;
}

namespace {

Vector embed_full(const EllipsoidRegion& region, const Vector& beta_active,
                  int p) {
  Vector beta = Vector::Zero(p);
  for (size_t k = 0; k < region.active.size(); ++k) {
    beta[region.active[k] - 1] = beta_active[k];
  }
  return beta;
}

}  // namespace

FunctionalResult functional_linear(const RegionUnion& joint, const Vector& c,
                                   double intercept) {
  FunctionalResult result;
  result.exact = true;
  if (joint.regions.empty()) return result;
  std::vector<std::pair<double, double>> raw;
  for (const auto& region : joint.regions) {
    double base = intercept;
    if (region.active.empty()) {
      raw.emplace_back(base, base);
      continue;
    }
    Vector c_active(region.active.size());
    for (size_t k = 0; k < region.active.size(); ++k) {
      c_active[k] = c[region.active[k] - 1];
    }
    double mid = base + c_active.dot(region.center);
    Eigen::LDLT<Matrix> ldlt(region.shape);
    Vector sol = ldlt.solve(c_active);
    double quad = c_active.dot(sol);
    double half = quad > 0.0 ? std::sqrt(region.radius2 * quad) : 0.0;
    raw.emplace_back(mid - half, mid + half);
  }
  result.interval.intervals = merge_intervals(std::move(raw));
  return result;
}

FunctionalResult functional_conf_set(
    const RegionUnion& joint, int p,
    const std::function<double(const Vector&)>& h, int samples_per_region,
    RngStream& stream) {
  if (samples_per_region < 1) {
    fail(ErrorCode::invalid_argument, "functional: samples_per_region >= 1");
  }
  FunctionalResult result;
  result.samples_per_region = samples_per_region;
  std::vector<std::pair<double, double>> raw;
  for (const auto& region : joint.regions) {
    if (region.active.empty() || region.radius2 <= 0.0) {
      double v = h(embed_full(region, region.center, p));
      raw.emplace_back(v, v);
      continue;
    }
    const int k = static_cast<int>(region.active.size());
    Eigen::LLT<Matrix> llt(region.shape);
    if (llt.info() != Eigen::Success) {
      fail(ErrorCode::invalid_argument,
           "functional: region shape is not positive definite");
    }
    double lo = kInf, hi = -kInf;
    double radius = std::sqrt(region.radius2);
    for (int s = 0; s < samples_per_region; ++s) {
      Vector g = sample_gaussian(k, stream);
      double norm = g.norm();
      if (norm == 0.0) continue;
      double t = std::pow(stream.next_open01(), 1.0 / k);
      Vector z = (radius * t / norm) * g;
      Vector beta_active =
          region.center + llt.matrixU().solve(z);  // U^-1 z, U'U = shape
      double v = h(embed_full(region, beta_active, p));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo > hi) {
      double v = h(embed_full(region, region.center, p));
      lo = hi = v;
    }
    raw.emplace_back(lo, hi);
  }
  result.interval.intervals = merge_intervals(std::move(raw));
  return result;
}

TransformInference linear_transform_inference(const Matrix& L,
                                              const Dataset& data,
                                              const SearchConfig& config,
                                              double alpha) {
  data.validate();
  const int p = data.p();
  const int l = static_cast<int>(L.rows());
  if (L.cols() != p) {
    fail(ErrorCode::dimension_mismatch, "transform: L must have p columns");
  }
  if (l < 1 || l > p) {
    fail(ErrorCode::invalid_argument, "transform: need 1 <= l <= p");
  }

  Matrix Ltilde = Matrix::Zero(p, p);
  Ltilde.topRows(l) = L;
  if (l < p) {
    Ltilde.block(l, l, p - l, p - l) = Matrix::Identity(p - l, p - l);
  }
  Eigen::JacobiSVD<Matrix> svd(Ltilde, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin >= 1e8) {
    fail(ErrorCode::singular_transform,
         "transform: stacked matrix is singular or ill conditioned");
  }

  // X~ = X Ltilde^{-1}, solved as Ltilde' W = X' row by row.
  Eigen::PartialPivLU<Matrix> lu(Ltilde.transpose());
  Dataset transformed;
  transformed.y = data.y;
  transformed.X = lu.solve(data.X.transpose()).transpose();

  TransformInference out;
  out.candidates = search_candidates(transformed, config);
  std::vector<int> lambda(l);
  for (int k = 0; k < l; ++k) lambda[k] = k + 1;
  if (out.candidates.models.empty()) {
    fail(ErrorCode::invalid_argument, "transform: candidate search came back empty");
  }
  out.region = subset_conf_region(transformed.y, transformed.X, lambda,
                                  out.candidates.models, alpha);
  return out;
}

RegionUnion modified_conf_set(const Dataset& data,
                              const std::vector<ModelSupport>& candidates,
                              double alpha1, double alpha2,
                              const std::vector<int>& lambda_set, int J,
                              std::uint64_t seed, int threads) {
  if (!(alpha1 > 0.5 && alpha1 < 1.0) || !(alpha2 > 0.5 && alpha2 < 1.0)) {
    fail(ErrorCode::invalid_level,
         "modified_conf_set: alpha1 and alpha2 must lie in (1/2, 1)");
  }
  ModelCsOptions opts;
  opts.alpha = alpha1;
  opts.J = J;
  opts.seed = seed;
  opts.threads = threads;
  ModelConfidenceSet mcs = model_confidence_set(data, candidates, opts);
  std::vector<ModelSupport> included = mcs.included_models();

  RegionUnion out;
  out.lambda_set = lambda_set;
  out.alpha = alpha1 + alpha2 - 1.0;
  if (included.empty()) return out;
  out = subset_conf_region(data.y, data.X, lambda_set, included, alpha2);
  out.alpha = alpha1 + alpha2 - 1.0;
  return out;
}

}  // namespace repro
