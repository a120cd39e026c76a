#pragma once

#include <string>

#include "repro/baselines.hpp"
#include "repro/coef_cs.hpp"
#include "repro/model_cs.hpp"
#include "repro/search.hpp"
#include "repro/sim.hpp"
#include "repro/types.hpp"

namespace repro {

// CSV ingestion: comma separated, '.' decimal, an optional single header
// row autodetected, no missing values. Parse errors name the offending
// row and column.
Matrix read_csv_matrix(const std::string& path);
Vector read_csv_vector(const std::string& path);
Dataset load_dataset(const std::string& x_path, const std::string& y_path);

void write_text_file(const std::string& path, const std::string& content);

// JSON wire formats. All emitters are canonical (sorted keys, compact),
// so identical inputs serialize byte-identically.
std::string candidate_set_to_json(const CandidateSet& set);
CandidateSet candidate_set_from_json(const std::string& json);

std::string model_cs_to_json(const ModelConfidenceSet& cs);
std::string region_union_to_json(const RegionUnion& region);
std::string interval_union_to_json(const IntervalUnion& interval);
std::string functional_to_json(const FunctionalResult& result);
std::string bootstrap_to_json(const BootstrapModelSet& set);
std::string sim_report_to_json(const SimReport& report);
std::string sim_report_to_csv(const SimReport& report);

// Scenario configs round trip through JSON for the CLI's custom scenarios.
std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& json);

}  // namespace repro
