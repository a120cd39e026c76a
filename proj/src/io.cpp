#include "repro/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace repro {

using nlohmann::json;

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& field, double& value) {
  const char* s = field.c_str();
  char* end = nullptr;
  value = std::strtod(s, &end);
  if (end == s) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
  std::ifstream file(path);
  if (!file.is_open()) {
    fail(ErrorCode::parse_error, "cannot open '" + path + "'");
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  bool first_data_line = true;
  size_t width = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (size_t j = 0; j < fields.size(); ++j) {
      if (fields[j].find_first_not_of(" \t") == std::string::npos) {
        fail(ErrorCode::parse_error,
             path + ": row " + std::to_string(line_no) + ", column " +
                 std::to_string(j + 1) + " is empty (missing values are not supported)");
      }
      if (!parse_double(fields[j], row[j])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first_data_line) {
        first_data_line = false;  // header row
        continue;
      }
      fail(ErrorCode::parse_error,
           path + ": row " + std::to_string(line_no) + " has a non-numeric field");
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      fail(ErrorCode::parse_error,
           path + ": row " + std::to_string(line_no) + " has " +
               std::to_string(row.size()) + " fields, expected " +
               std::to_string(width));
    }
    first_data_line = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    fail(ErrorCode::parse_error, path + ": no data rows");
  }
  return rows;
}

json support_to_json(const ModelSupport& s) { return json(s.indices); }

ModelSupport support_from_json(const json& j) {
  ModelSupport s;
  s.indices = j.get<std::vector<int>>();
  ModelSupport checked(s.indices);  // sorts and rejects duplicates
  return checked;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json matrix_to_json_rowmajor(const Matrix& m) {
  json arr = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  }
  return arr;
}

const char* criterion_label(TuningCriterion c) {
  switch (c) {
    case TuningCriterion::aic: return "aic";
    case TuningCriterion::bic: return "bic";
    case TuningCriterion::cv: return "cv";
  }
  return "bic";
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
  auto rows = read_csv_rows(path);
  Matrix out(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
  }
  return out;
}

Vector read_csv_vector(const std::string& path) {
  auto rows = read_csv_rows(path);
  if (rows[0].size() != 1) {
    fail(ErrorCode::parse_error,
         path + ": expected a single column, found " +
             std::to_string(rows[0].size()));
  }
  Vector out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][0];
  return out;
}

Dataset load_dataset(const std::string& x_path, const std::string& y_path) {
  Dataset data;
  data.X = read_csv_matrix(x_path);
  data.y = read_csv_vector(y_path);
  if (data.y.size() != data.X.rows()) {
    fail(ErrorCode::parse_error,
         "y has " + std::to_string(data.y.size()) + " rows but X has " +
             std::to_string(data.X.rows()));
  }
  data.validate();
  return data;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file.is_open()) {
    fail(ErrorCode::parse_error, "cannot write '" + path + "'");
  }
  file << content;
}

std::string candidate_set_to_json(const CandidateSet& set) {
  json j;
  j["models"] = json::array();
  for (const auto& m : set.models) j["models"].push_back(support_to_json(m));
  j["hits"] = set.hits;
  j["first_hit"] = set.first_hit;
  j["d"] = set.d_used;
  j["failures"] = set.failures;
  return j.dump();
}

CandidateSet candidate_set_from_json(const std::string& text) {
  CandidateSet set;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, std::string("candidate set JSON: ") + e.what());
  }
  if (!j.contains("models") || !j["models"].is_array()) {
    fail(ErrorCode::parse_error, "candidate set JSON: missing 'models' array");
  }
  try {
    for (const auto& m : j["models"]) set.models.push_back(support_from_json(m));
    if (j.contains("hits")) set.hits = j["hits"].get<std::vector<int>>();
    if (j.contains("first_hit")) {
      set.first_hit = j["first_hit"].get<std::vector<int>>();
    }
    if (j.contains("d")) set.d_used = j["d"].get<int>();
    if (j.contains("failures")) set.failures = j["failures"].get<int>();
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, std::string("candidate set JSON: ") + e.what());
  }
  if (!set.hits.empty() && set.hits.size() != set.models.size()) {
    fail(ErrorCode::parse_error, "candidate set JSON: hits length mismatch");
  }
  return set;
}

std::string model_cs_to_json(const ModelConfidenceSet& cs) {
  json j;
  j["alpha"] = cs.alpha;
  j["J"] = cs.J;
  j["seed"] = cs.seed;
  json models = json::array();
  for (const auto& e : cs.entries) {
    json entry;
    entry["indices"] = support_to_json(e.model);
    entry["tail_prob"] = e.tail_prob;
    entry["included"] = e.included;
    if (e.error) entry["error"] = e.error_message;
    models.push_back(std::move(entry));
  }
  j["models"] = std::move(models);
  return j.dump();
}

std::string region_union_to_json(const RegionUnion& region) {
  json j;
  j["alpha"] = region.alpha;
  j["lambda"] = region.lambda_set;
  j["zero_atom"] = region.includes_zero_atom;
  json regions = json::array();
  for (const auto& r : region.regions) {
    json jr;
    jr["support"] = support_to_json(r.support);
    jr["active"] = r.active;
    jr["center"] = vector_to_json(r.center);
    jr["shape"] = matrix_to_json_rowmajor(r.shape);
    jr["radius2"] = r.radius2;
    jr["pinned"] = r.pinned;
    regions.push_back(std::move(jr));
  }
  j["regions"] = std::move(regions);
  return j.dump();
}

std::string interval_union_to_json(const IntervalUnion& interval) {
  json j;
  json arr = json::array();
  for (const auto& [lo, hi] : interval.intervals) {
    arr.push_back(json::array({lo, hi}));
  }
  j["intervals"] = std::move(arr);
  j["zero_atom"] = interval.zero_atom;
  j["width"] = interval.width();
  return j.dump();
}

std::string functional_to_json(const FunctionalResult& result) {
  json j = json::parse(interval_union_to_json(result.interval));
  j["samples_per_region"] = result.samples_per_region;
  j["exact"] = result.exact;
  return j.dump();
}

std::string bootstrap_to_json(const BootstrapModelSet& set) {
  json j;
  j["B"] = set.B;
  j["criterion"] = criterion_label(set.criterion);
  j["failures"] = set.failures;
  json freq = json::array();
  for (const auto& [model, count] : set.frequency) {
    json entry;
    entry["model"] = support_to_json(model);
    entry["count"] = count;
    freq.push_back(std::move(entry));
  }
  j["frequency"] = std::move(freq);
  json retained = json::array();
  for (const auto& m : set.retained) retained.push_back(support_to_json(m));
  j["retained"] = std::move(retained);
  return j.dump();
}

std::string sim_report_to_json(const SimReport& report) {
  json j;
  j["scenario"] = report.scenario;
  j["replications"] = report.replications;
  j["failures"] = report.failures;
  j["metadata"] = {
      {"regenerate_design_per_rep", report.regenerate_design_per_rep},
      {"restandardize_covariates", report.restandardize_covariates},
  };
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["method"] = row.method;
    r["metric"] = row.metric;
    r["mean"] = row.mean;
    r["se"] = row.se;
    r["count"] = row.count;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump();
}

std::string sim_report_to_csv(const SimReport& report) {
  std::ostringstream os;
  os << "scenario,method,metric,mean,se,count\n";
  char buf[64];
  for (const auto& row : report.rows) {
    os << report.scenario << ',' << row.method << ',' << row.metric << ',';
    std::snprintf(buf, sizeof(buf), "%.12g", row.mean);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.12g", row.se);
    os << buf << ',' << row.count << '\n';
  }
  return os.str();
}

std::string scenario_to_json(const ScenarioConfig& config) {
  json j;
  j["name"] = config.name;
  j["n"] = config.n;
  j["p"] = config.p;
  j["beta"] = config.beta_head;
  j["corr_decay"] = config.corr_decay;
  j["sigma"] = config.sigma;
  j["replications"] = config.replications;
  j["d"] = config.d;
  j["J"] = config.J;
  j["alpha"] = config.alpha;
  j["B_bootstrap"] = config.B_bootstrap;
  j["seed"] = config.seed;
  j["threads"] = config.threads;
  j["run_model_cs"] = config.run_model_cs;
  j["run_coef"] = config.run_coef;
  j["run_joint"] = config.run_joint;
  j["run_bootstrap"] = config.run_bootstrap;
  json crits = json::array();
  for (auto c : config.bootstrap_criteria) crits.push_back(criterion_label(c));
  j["bootstrap_criteria"] = std::move(crits);
  return j.dump();
}

ScenarioConfig scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, std::string("scenario JSON: ") + e.what());
  }
  ScenarioConfig c;
  try {
    if (j.contains("name")) c.name = j["name"].get<std::string>();
    if (j.contains("n")) c.n = j["n"].get<int>();
    if (j.contains("p")) c.p = j["p"].get<int>();
    if (j.contains("beta")) c.beta_head = j["beta"].get<std::vector<double>>();
    if (j.contains("corr_decay")) c.corr_decay = j["corr_decay"].get<double>();
    if (j.contains("sigma")) c.sigma = j["sigma"].get<double>();
    if (j.contains("replications")) c.replications = j["replications"].get<int>();
    if (j.contains("d")) c.d = j["d"].get<int>();
    if (j.contains("J")) c.J = j["J"].get<int>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("B_bootstrap")) c.B_bootstrap = j["B_bootstrap"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("run_model_cs")) c.run_model_cs = j["run_model_cs"].get<bool>();
    if (j.contains("run_coef")) c.run_coef = j["run_coef"].get<bool>();
    if (j.contains("run_joint")) c.run_joint = j["run_joint"].get<bool>();
    if (j.contains("run_bootstrap")) c.run_bootstrap = j["run_bootstrap"].get<bool>();
    if (j.contains("bootstrap_criteria")) {
      c.bootstrap_criteria.clear();
      for (const auto& s : j["bootstrap_criteria"]) {
        std::string name = s.get<std::string>();
        if (name == "aic") {
          c.bootstrap_criteria.push_back(TuningCriterion::aic);
        } else if (name == "bic") {
          c.bootstrap_criteria.push_back(TuningCriterion::bic);
        } else if (name == "cv") {
          c.bootstrap_criteria.push_back(TuningCriterion::cv);
        } else {
          fail(ErrorCode::parse_error, "scenario JSON: unknown criterion '" + name + "'");
        }
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, std::string("scenario JSON: ") + e.what());
  }
  return c;
}

}  // namespace repro
