#include "repro/repro_c.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "repro/coef_cs.hpp"
#include "repro/io.hpp"
#include "repro/model_cs.hpp"
#include "repro/search.hpp"
#include "repro/sim.hpp"

using nlohmann::json;

struct repro_dataset {
  repro::Dataset data;
};

struct repro_candidates {
  repro::CandidateSet set;
};

namespace {

thread_local std::string t_last_error;

repro_status status_of(const repro::Error& e) {
  switch (e.code()) {
    case repro::ErrorCode::parse_error:
      return REPRO_ERR_PARSE;
    case repro::ErrorCode::invalid_argument:
    case repro::ErrorCode::dimension_mismatch:
    case repro::ErrorCode::empty_support:
    case repro::ErrorCode::invalid_level:
    case repro::ErrorCode::zero_vector:
    case repro::ErrorCode::too_large:
      return REPRO_ERR_ARG;
    case repro::ErrorCode::non_convergence:
    case repro::ErrorCode::degenerate_residual:
    case repro::ErrorCode::degenerate_denominator:
    case repro::ErrorCode::singular_transform:
      return REPRO_ERR_NUMERIC;
  }
  return REPRO_ERR_INTERNAL;
}

template <typename Fn>
repro_status guarded(Fn&& fn) {
  try {
    fn();
    return REPRO_OK;
  } catch (const repro::Error& e) {
    t_last_error = e.what();
    return status_of(e);
  } catch (const json::exception& e) {
    t_last_error = e.what();
    return REPRO_ERR_PARSE;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return REPRO_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_options(const char* options_json) {
  if (options_json == nullptr || options_json[0] == '\0') {
    return json::object();
  }
  json j = json::parse(options_json);
  if (!j.is_object()) {
    repro::fail(repro::ErrorCode::parse_error, "options must be a JSON object");
  }
  return j;
}

repro::SearchConfig search_config_from(const json& j) {
  repro::SearchConfig c;
  if (j.contains("d")) c.d = j["d"].get<int>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  if (j.contains("mode")) {
    std::string mode = j["mode"].get<std::string>();
    if (mode == "penalized") {
      c.mode = repro::SearchMode::penalized;
    } else if (mode == "constrained") {
      c.mode = repro::SearchMode::constrained;
    } else {
      repro::fail(repro::ErrorCode::invalid_argument,
                  "mode must be 'penalized' or 'constrained'");
    }
  }
  if (j.contains("k_max")) c.k_max = j["k_max"].get<int>();
  if (j.contains("max_support")) c.max_support = j["max_support"].get<int>();
  if (j.contains("lambda_grid")) {
    c.lambda_grid = j["lambda_grid"].get<std::vector<double>>();
  }
  if (j.contains("grid_size")) c.grid_size = j["grid_size"].get<int>();
  if (j.contains("lambda_min_ratio")) {
    c.lambda_min_ratio = j["lambda_min_ratio"].get<double>();
  }
  return c;
}

double alpha_from(const json& j) {
  double alpha = j.contains("alpha") ? j["alpha"].get<double>() : 0.95;
  if (!(alpha > 0.0 && alpha < 1.0)) {
    repro::fail(repro::ErrorCode::invalid_level, "alpha must lie in (0, 1)");
  }
  return alpha;
}

std::vector<int> lambda_from(const int* lambda_set, int l) {
  if (lambda_set == nullptr || l < 1) {
    repro::fail(repro::ErrorCode::invalid_argument, "lambda set is empty");
  }
  return std::vector<int>(lambda_set, lambda_set + l);
}

void require(bool ok, const char* what) {
  if (!ok) repro::fail(repro::ErrorCode::invalid_argument, what);
}

}  // namespace

extern "C" {

const char* repro_version(void) { return "0.1.0"; }

const char* repro_last_error(void) { return t_last_error.c_str(); }

void repro_string_free(char* str) { delete[] str; }

repro_status repro_dataset_create(const double* y, const double* x_rowmajor,
                                  int n, int p, repro_dataset** out) {
  return guarded([&] {
    require(y != nullptr && x_rowmajor != nullptr && out != nullptr,
            "null pointer argument");
    require(n >= 1 && p >= 1, "n and p must be >= 1");
    repro::Dataset data;
    data.y = Eigen::Map<const repro::Vector>(y, n);
    data.X = Eigen::Map<
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>>(x_rowmajor, n, p);
    data.validate();
    *out = new repro_dataset{std::move(data)};
  });
}

repro_status repro_dataset_from_csv(const char* x_path, const char* y_path,
                                    repro_dataset** out) {
  return guarded([&] {
    require(x_path != nullptr && y_path != nullptr && out != nullptr,
            "null pointer argument");
    *out = new repro_dataset{repro::load_dataset(x_path, y_path)};
  });
}

void repro_dataset_free(repro_dataset* dataset) { delete dataset; }

int repro_dataset_n(const repro_dataset* dataset) {
  return dataset ? dataset->data.n() : 0;
}

int repro_dataset_p(const repro_dataset* dataset) {
  return dataset ? dataset->data.p() : 0;
}

repro_status repro_search(const repro_dataset* dataset, const char* config_json,
                          repro_candidates** out) {
  return guarded([&] {
    require(dataset != nullptr && out != nullptr, "null pointer argument");
    repro::SearchConfig config = search_config_from(parse_options(config_json));
    *out = new repro_candidates{repro::search_candidates(dataset->data, config)};
  });
}

repro_status repro_candidates_from_json(const char* text,
                                        repro_candidates** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null pointer argument");
    *out = new repro_candidates{repro::candidate_set_from_json(text)};
  });
}

repro_status repro_candidates_to_json(const repro_candidates* candidates,
                                      char** out_json) {
  return guarded([&] {
    require(candidates != nullptr && out_json != nullptr,
            "null pointer argument");
    *out_json = dup_string(repro::candidate_set_to_json(candidates->set));
  });
}

void repro_candidates_free(repro_candidates* candidates) { delete candidates; }

repro_status repro_model_cs(const repro_dataset* dataset,
                            const repro_candidates* candidates,
                            const char* options_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && candidates != nullptr && out_json != nullptr,
            "null pointer argument");
    json j = parse_options(options_json);
    repro::ModelCsOptions opts;
    opts.alpha = alpha_from(j);
    if (j.contains("J")) opts.J = j["J"].get<int>();
    if (j.contains("seed")) opts.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) opts.threads = j["threads"].get<int>();
    repro::ModelConfidenceSet cs =
        repro::model_confidence_set(dataset->data, candidates->set.models, opts);
    *out_json = dup_string(repro::model_cs_to_json(cs));
  });
}

repro_status repro_coef_single(const repro_dataset* dataset,
                               const repro_candidates* candidates, int index,
                               const char* options_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && candidates != nullptr && out_json != nullptr,
            "null pointer argument");
    double alpha = alpha_from(parse_options(options_json));
    repro::IntervalUnion ci = repro::single_coef_ci(
        dataset->data.y, dataset->data.X, index, candidates->set.models, alpha);
    *out_json = dup_string(repro::interval_union_to_json(ci));
  });
}

repro_status repro_coef_subset(const repro_dataset* dataset,
                               const repro_candidates* candidates,
                               const int* lambda_set, int l,
                               const char* options_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && candidates != nullptr && out_json != nullptr,
            "null pointer argument");
    double alpha = alpha_from(parse_options(options_json));
    repro::RegionUnion region = repro::subset_conf_region(
        dataset->data.y, dataset->data.X, lambda_from(lambda_set, l),
        candidates->set.models, alpha);
    *out_json = dup_string(repro::region_union_to_json(region));
  });
}

repro_status repro_coef_joint(const repro_dataset* dataset,
                              const repro_candidates* candidates,
                              const char* options_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && candidates != nullptr && out_json != nullptr,
            "null pointer argument");
    double alpha = alpha_from(parse_options(options_json));
    repro::RegionUnion joint =
        repro::joint_conf_set(dataset->data.y, dataset->data.X,
                              candidates->set.models, alpha);
    json j = json::parse(repro::region_union_to_json(joint));
    j["shrunk_proportion"] = repro::shrunk_proportion(joint, dataset->data.p());
    *out_json = dup_string(j.dump());
  });
}

repro_status repro_coef_functional(const repro_dataset* dataset,
                                   const repro_candidates* candidates,
                                   repro_functional_fn h, void* user,
                                   const char* options_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && candidates != nullptr && out_json != nullptr,
            "null pointer argument");
    json j = parse_options(options_json);
    double alpha = alpha_from(j);
    const int p = dataset->data.p();
    repro::RegionUnion joint = repro::joint_conf_set(
        dataset->data.y, dataset->data.X, candidates->set.models, alpha);

    repro::FunctionalResult result;
    if (j.contains("linear")) {
      const json& lin = j["linear"];
      std::vector<double> coeffs = lin.at("coeffs").get<std::vector<double>>();
      require(static_cast<int>(coeffs.size()) == p,
              "linear coeffs must have length p");
      double intercept =
          lin.contains("intercept") ? lin["intercept"].get<double>() : 0.0;
      repro::Vector c = Eigen::Map<const repro::Vector>(coeffs.data(), p);
      result = repro::functional_linear(joint, c, intercept);
    } else {
      require(h != nullptr, "either h or options.linear must be given");
      int samples = j.contains("samples_per_region")
                        ? j["samples_per_region"].get<int>()
                        : 10000;
      std::uint64_t seed =
          j.contains("seed") ? j["seed"].get<std::uint64_t>() : 0;
      repro::RngStream stream =
          repro::RngStream(seed).child(repro::stream_tag::functional);
      auto fn = [&](const repro::Vector& beta) {
        return h(beta.data(), p, user);
      };
      result = repro::functional_conf_set(joint, p, fn, samples, stream);
    }
    *out_json = dup_string(repro::functional_to_json(result));
  });
}

repro_status repro_coef_modified(const repro_dataset* dataset,
                                 const repro_candidates* candidates,
                                 const int* lambda_set, int l,
                                 const char* options_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && candidates != nullptr && out_json != nullptr,
            "null pointer argument");
    json j = parse_options(options_json);
    require(j.contains("alpha1") && j.contains("alpha2"),
            "modified set needs alpha1 and alpha2");
    double alpha1 = j["alpha1"].get<double>();
    double alpha2 = j["alpha2"].get<double>();
    int J = j.contains("J") ? j["J"].get<int>() : 200;
    std::uint64_t seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : 0;
    int threads = j.contains("threads") ? j["threads"].get<int>() : 1;
    repro::RegionUnion region = repro::modified_conf_set(
        dataset->data, candidates->set.models, alpha1, alpha2,
        lambda_from(lambda_set, l), J, seed, threads);
    *out_json = dup_string(repro::region_union_to_json(region));
  });
}

repro_status repro_linear_transform(const repro_dataset* dataset,
                                    const double* L_rowmajor, int l,
                                    const char* config_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && L_rowmajor != nullptr && out_json != nullptr,
            "null pointer argument");
    require(l >= 1, "l must be >= 1");
    json j = parse_options(config_json);
    repro::SearchConfig config = search_config_from(j);
    double alpha = alpha_from(j);
    const int p = dataset->data.p();
    repro::Matrix L = Eigen::Map<
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>>(L_rowmajor, l, p);
    repro::TransformInference result =
        repro::linear_transform_inference(L, dataset->data, config, alpha);
    json out = json::parse(repro::region_union_to_json(result.region));
    out["candidates"] =
        json::parse(repro::candidate_set_to_json(result.candidates));
    *out_json = dup_string(out.dump());
  });
}

repro_status repro_bootstrap_models(const repro_dataset* dataset,
                                    const char* options_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && out_json != nullptr, "null pointer argument");
    json j = parse_options(options_json);
    repro::BootstrapOptions opts;
    if (j.contains("B")) opts.B = j["B"].get<int>();
    if (j.contains("seed")) opts.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) opts.threads = j["threads"].get<int>();
    if (j.contains("criterion")) {
      std::string name = j["criterion"].get<std::string>();
      if (name == "aic") {
        opts.criterion = repro::TuningCriterion::aic;
      } else if (name == "bic") {
        opts.criterion = repro::TuningCriterion::bic;
      } else if (name == "cv") {
        opts.criterion = repro::TuningCriterion::cv;
      } else {
        repro::fail(repro::ErrorCode::invalid_argument,
                    "criterion must be aic, bic or cv");
      }
    }
    repro::BootstrapModelSet set =
        repro::residual_bootstrap_models(dataset->data, opts);
    *out_json = dup_string(repro::bootstrap_to_json(set));
  });
}

repro_status repro_c_min(const repro_dataset* dataset, const int* tau0,
                         int tau0_len, const double* beta0, double* out) {
  return guarded([&] {
    require(dataset != nullptr && tau0 != nullptr && beta0 != nullptr &&
                out != nullptr,
            "null pointer argument");
    require(tau0_len >= 1, "tau0 must be nonempty");
    repro::ModelSupport support(std::vector<int>(tau0, tau0 + tau0_len));
    repro::Vector b = Eigen::Map<const repro::Vector>(beta0, tau0_len);
    *out = repro::c_min(dataset->data.X, support, b);
  });
}

repro_status repro_simulate(const char* scenario_json, char** out_report_json,
                            char** out_report_csv) {
  return guarded([&] {
    require(scenario_json != nullptr && out_report_json != nullptr &&
                out_report_csv != nullptr,
            "null pointer argument");
    json j = json::parse(scenario_json);
    repro::ScenarioConfig config;
    std::string name = j.contains("name") ? j["name"].get<std::string>() : "";
    bool has_config_keys = false;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() != "name" && it.key() != "scale") has_config_keys = true;
    }
    if (name == "M1") {
      config = repro::scenario_m1();
    } else if (name == "M2") {
      config = repro::scenario_m2();
    } else if (name == "M3") {
      config = repro::scenario_m3();
    } else if (!has_config_keys) {
      // A bare name that is not a preset is a typo, not a custom study.
      repro::fail(repro::ErrorCode::invalid_argument,
                  "unknown scenario '" + name + "' (valid: M1, M2, M3, or a custom config)");
    }
    if (j.contains("scale")) {
      std::string scale = j["scale"].get<std::string>();
      if (scale == "desk") {
        repro::apply_desk_scale(config);
      } else if (scale != "full") {
        repro::fail(repro::ErrorCode::invalid_argument,
                    "scale must be 'desk' or 'full'");
      }
    }
    // Remaining keys override the preset.
    json merged = json::parse(repro::scenario_to_json(config));
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "scale") continue;
      merged[it.key()] = it.value();
    }
    config = repro::scenario_from_json(merged.dump());
    repro::SimReport report = repro::run_replications(config);
    *out_report_json = dup_string(repro::sim_report_to_json(report));
    *out_report_csv = dup_string(repro::sim_report_to_csv(report));
  });
}

}  // extern "C"
