#include "repro/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "repro/coef_cs.hpp"
#include "repro/model_cs.hpp"
#include "repro/parallel.hpp"
#include "repro/rng.hpp"
#include "repro/search.hpp"

namespace repro {

void ScenarioConfig::validate() const {
  if (n < 2 || p < 1) fail(ErrorCode::invalid_argument, "scenario: bad n or p");
  if (static_cast<int>(beta_head.size()) > p) {
    fail(ErrorCode::invalid_argument, "scenario: beta head longer than p");
  }
  if (tau0().empty()) {
    fail(ErrorCode::invalid_argument, "scenario: beta has no nonzero entry");
  }
  if (!(corr_decay > -1.0 && corr_decay < 1.0)) {
    fail(ErrorCode::invalid_argument, "scenario: corr_decay in (-1, 1)");
  }
  if (sigma < 0.0) fail(ErrorCode::invalid_argument, "scenario: sigma >= 0");
  if (replications < 1 || d < 1 || J < 1 || B_bootstrap < 1) {
    fail(ErrorCode::invalid_argument, "scenario: counts must be >= 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorCode::invalid_level, "scenario: alpha in (0, 1)");
  }
}

ModelSupport ScenarioConfig::tau0() const {
  ModelSupport out;
  for (size_t j = 0; j < beta_head.size(); ++j) {
    if (beta_head[j] != 0.0) out.indices.push_back(static_cast<int>(j) + 1);
  }
  return out;
}

Vector ScenarioConfig::beta0() const {
  ModelSupport t = tau0();
  Vector out(t.size());
  for (int k = 0; k < t.size(); ++k) out[k] = beta_head[t.indices[k] - 1];
  return out;
}

ScenarioConfig scenario_m1() {
  ScenarioConfig c;
  c.name = "M1";
  c.n = 50;
  c.p = 1000;
  c.beta_head = {3.0, 2.0, 1.5};
  c.corr_decay = 0.5;
  c.sigma = 1.0;
  c.replications = 200;
  c.d = 1000;
  c.B_bootstrap = 1000;
  return c;
}

ScenarioConfig scenario_m2() {
  ScenarioConfig c;
  c.name = "M2";
  c.n = 80;
  c.p = 150;
  c.beta_head = {2.0, 1.5, 1.0, 0.8, 0.6};
  c.corr_decay = 0.1;
  c.sigma = 1.0;
  c.replications = 200;
  c.d = 10000;
  c.B_bootstrap = 10000;
  return c;
}

ScenarioConfig scenario_m3() {
  ScenarioConfig c;
  c.name = "M3";
  c.n = 100;
  c.p = 500;
  c.beta_head = {3.0, 2.0, 1.5, 1.0, 0.8, 0.6};
  c.corr_decay = 0.1;
  c.sigma = 1.0;
  c.replications = 200;
  c.d = 100000;
  c.B_bootstrap = 100000;
  return c;
}

void apply_desk_scale(ScenarioConfig& config) {
  config.replications = 50;
  if (config.name == "M1") {
    config.d = 500;
  } else {
    config.d = 2000;
  }
  config.B_bootstrap = 500;
}

const MetricRow* SimReport::find(const std::string& method,
                                 const std::string& metric) const {
  for (const auto& row : rows) {
    if (row.method == method && row.metric == metric) return &row;
  }
  return nullptr;
}

std::pair<Dataset, GroundTruth> generate(const ScenarioConfig& scenario,
                                         int rep) {
  scenario.validate();
  RngStream stream =
      RngStream(scenario.seed).child(stream_tag::generate,
                                     static_cast<std::uint64_t>(rep));
  const int n = scenario.n;
  const int p = scenario.p;
  const double rho = scenario.corr_decay;
  const double innov = std::sqrt(1.0 - rho * rho);

  Dataset data;
  data.X.resize(n, p);
  for (int i = 0; i < n; ++i) {
    double prev = stream.next_normal();
    data.X(i, 0) = prev;
    for (int j = 1; j < p; ++j) {
      prev = rho * prev + innov * stream.next_normal();
      data.X(i, j) = prev;
    }
  }

  GroundTruth truth;
  truth.tau0 = scenario.tau0();
  truth.beta0 = scenario.beta0();
  truth.sigma0 = scenario.sigma;
  truth.u_rel = sample_gaussian(n, stream);

  data.y = columns(data.X, truth.tau0) * truth.beta0 +
           scenario.sigma * truth.u_rel;
  return {std::move(data), std::move(truth)};
}

namespace {

const char* criterion_name(TuningCriterion c) {
  switch (c) {
    case TuningCriterion::aic: return "bootstrap_aic";
    case TuningCriterion::bic: return "bootstrap_bic";
    case TuningCriterion::cv: return "bootstrap_cv";
  }
  return "bootstrap";
}

struct RepValues {
  bool failed = false;
  std::vector<std::pair<std::string, double>> values;  // "method/metric"

  void add(const std::string& method, const std::string& metric, double v) {
    values.emplace_back(method + "/" + metric, v);
  }
};

RepValues run_one_rep(const ScenarioConfig& scenario, int rep) {
  RepValues out;
  auto [data, truth] = generate(scenario, rep);
  RngStream seeder =
      RngStream(scenario.seed).child(stream_tag::replication,
                                     static_cast<std::uint64_t>(rep));
  std::uint64_t seed_search = seeder.next_u64();
  std::uint64_t seed_mcs = seeder.next_u64();
  std::uint64_t seed_boot = seeder.next_u64();

  SearchConfig sc;
  sc.d = scenario.d;
  sc.seed = seed_search;
  sc.threads = 1;
  CandidateSet cands = search_candidates(data, sc);
  if (cands.models.empty()) {
    fail(ErrorCode::invalid_argument, "replication produced no candidates");
  }
  out.add("repro", "candidate_cardinality",
          static_cast<double>(cands.models.size()));
  out.add("repro", "candidate_inclusion",
          cands.contains(truth.tau0) ? 1.0 : 0.0);
  out.add("repro", "search_failures", static_cast<double>(cands.failures));

  if (scenario.run_model_cs) {
    ModelCsOptions opts;
    opts.alpha = scenario.alpha;
    opts.J = scenario.J;
    opts.seed = seed_mcs;
    ModelConfidenceSet cs = model_confidence_set(data, cands.models, opts);
    out.add("repro", "cs_cardinality", static_cast<double>(cs.cardinality()));
    out.add("repro", "cs_coverage", cs.includes(truth.tau0) ? 1.0 : 0.0);
  }

  if (scenario.run_coef) {
    Vector beta_full = Vector::Zero(scenario.p);
    for (int k = 0; k < truth.tau0.size(); ++k) {
      beta_full[truth.tau0.indices[k] - 1] = truth.beta0[k];
    }
    double cov_sig = 0.0, wid_sig = 0.0;
    double cov_null = 0.0, wid_null = 0.0;
    int n_sig = 0, n_null = 0;
    for (int i = 1; i <= scenario.p; ++i) {
      IntervalUnion ci =
          single_coef_ci(data.y, data.X, i, cands.models, scenario.alpha);
      double truth_i = beta_full[i - 1];
      double covered = ci.contains(truth_i) ? 1.0 : 0.0;
      double width = ci.width();
      if (truth_i != 0.0) {
        cov_sig += covered;
        wid_sig += width;
        ++n_sig;
        out.add("repro", "coef_coverage_b" + std::to_string(i), covered);
        out.add("repro", "coef_width_b" + std::to_string(i), width);
      } else {
        cov_null += covered;
        wid_null += width;
        ++n_null;
      }
    }
    if (n_sig > 0) {
      out.add("repro", "coef_coverage_signal", cov_sig / n_sig);
      out.add("repro", "coef_width_signal", wid_sig / n_sig);
    }
    if (n_null > 0) {
      out.add("repro", "coef_coverage_null", cov_null / n_null);
      out.add("repro", "coef_width_null", wid_null / n_null);
    }
    out.add("repro", "coef_coverage_all",
            (cov_sig + cov_null) / scenario.p);
    out.add("repro", "coef_width_all", (wid_sig + wid_null) / scenario.p);
  }

  if (scenario.run_joint) {
    RegionUnion joint =
        joint_conf_set(data.y, data.X, cands.models, scenario.alpha);
    Vector beta_full = Vector::Zero(scenario.p);
    for (int k = 0; k < truth.tau0.size(); ++k) {
      beta_full[truth.tau0.indices[k] - 1] = truth.beta0[k];
    }
    out.add("repro", "joint_coverage", joint.contains(beta_full) ? 1.0 : 0.0);
    out.add("repro", "joint_shrunk_proportion",
            shrunk_proportion(joint, scenario.p));
  }

  if (scenario.run_bootstrap) {
    for (TuningCriterion crit : scenario.bootstrap_criteria) {
      BootstrapOptions opts;
      opts.B = scenario.B_bootstrap;
      opts.criterion = crit;
      opts.seed = seed_boot + static_cast<std::uint64_t>(crit);
      BootstrapModelSet bs = residual_bootstrap_models(data, opts);
      out.add(criterion_name(crit), "retained_cardinality",
              static_cast<double>(bs.retained.size()));
      out.add(criterion_name(crit), "retained_coverage",
              bs.retains(truth.tau0) ? 1.0 : 0.0);
    }
  }
  return out;
}

}  // namespace

SimReport run_replications(const ScenarioConfig& scenario) {
  scenario.validate();
  std::vector<RepValues> reps(scenario.replications);
  parallel_for(scenario.replications, scenario.threads, [&](int r) {
    try {
      reps[r] = run_one_rep(scenario, r + 1);
    } catch (const std::exception&) {
      reps[r].failed = true;
    }
  });

  SimReport report;
  report.scenario = scenario.name;
  report.replications = scenario.replications;

  // Aggregate in first-appearance order over reps in index order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> samples;
  for (const auto& rep : reps) {
    if (rep.failed) {
      ++report.failures;
      continue;
    }
    for (const auto& [key, value] : rep.values) {
      auto it = samples.find(key);
      if (it == samples.end()) {
        order.push_back(key);
        it = samples.emplace(key, std::vector<double>{}).first;
      }
      it->second.push_back(value);
    }
  }
  for (const auto& key : order) {
    const auto& v = samples[key];
    MetricRow row;
    auto slash = key.find('/');
    row.method = key.substr(0, slash);
    row.metric = key.substr(slash + 1);
    row.count = static_cast<int>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= row.count;
    row.mean = mean;
    if (row.count > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      row.se = std::sqrt(ss / (row.count - 1)) / std::sqrt(row.count);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace repro
