// Command-line front end for the repro-samples inference library. Talks to
// the library exclusively through the C API in repro/repro_c.h.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "repro/repro_c.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& message) {
  throw CliError{kExitUsage, message};
}

int exit_code_of(repro_status status) {
  switch (status) {
    case REPRO_OK:
      return kExitOk;
    case REPRO_ERR_ARG:
    case REPRO_ERR_PARSE:
      return kExitUsage;
    default:
      return kExitNumeric;
  }
}

void check(repro_status status) {
  if (status != REPRO_OK) {
    throw CliError{exit_code_of(status), repro_last_error()};
  }
}

// Wraps library-owned strings.
std::string take_string(char* s) {
  std::string out = s ? s : "";
  repro_string_free(s);
  return out;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file.is_open()) usage_error("cannot open '" + path + "'");
  std::uint64_t hash = 1469598103934665603ULL;
  char buf[1 << 14];
  while (file.read(buf, sizeof(buf)) || file.gcount() > 0) {
    std::streamsize got = file.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
    if (!file) break;
  }
  return hash;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ManifestBuilder {
  std::string command;
  json config = json::object();
  json inputs = json::object();
  std::uint64_t seed = 0;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void add_input(const std::string& key, const std::string& path) {
    char digest[32];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(path)));
    inputs[key] = {{"path", path}, {"digest_fnv1a64", digest}};
  }

  json build() const {
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    json m;
    m["command"] = command;
    m["config"] = config;
    m["inputs"] = inputs;
    m["seed"] = seed;
    m["version"] = repro_version();
    m["wall_time_s"] = wall;
    m["timestamp_utc"] = utc_timestamp();
    return m;
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file.is_open()) usage_error("cannot write '" + path + "'");
  file << content;
}

// Output JSON = result object with a "manifest" key alongside.
void emit_result(const std::string& path, const ManifestBuilder& manifest,
                 const std::string& result_json) {
  json out = json::parse(result_json);
  out["manifest"] = manifest.build();
  write_file(path, out.dump() + "\n");
  std::cout << "wrote " << path << "\n";
}

struct DatasetHandle {
  repro_dataset* ptr = nullptr;
  ~DatasetHandle() { repro_dataset_free(ptr); }
};

struct CandidatesHandle {
  repro_candidates* ptr = nullptr;
  ~CandidatesHandle() { repro_candidates_free(ptr); }
};

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file.is_open()) usage_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << file.rdbuf();
  return os.str();
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("REPRO_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

// Linear expressions over coordinates b1..bp, e.g. "2*b1 - 0.5*b3 + 1".
struct LinearExpr {
  std::vector<double> coeffs;
  double intercept = 0.0;
};

LinearExpr parse_linear_expr(const std::string& text, int p) {
  LinearExpr expr;
  expr.coeffs.assign(p, 0.0);
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) usage_error("empty functional expression");
  size_t pos = 0;
  while (pos < s.size()) {
    double sign = 1.0;
    while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      if (s[pos] == '-') sign = -sign;
      ++pos;
    }
    if (pos >= s.size()) usage_error("dangling sign in functional expression");
    double coef = 1.0;
    bool have_coef = false;
    if (s[pos] != 'b' && s[pos] != 'B') {
      char* end = nullptr;
      coef = std::strtod(s.c_str() + pos, &end);
      if (end == s.c_str() + pos) {
        usage_error("cannot parse functional expression near '" +
                    s.substr(pos) + "'");
      }
      pos = end - s.c_str();
      have_coef = true;
      if (pos < s.size() && s[pos] == '*') ++pos;
    }
    if (pos < s.size() && (s[pos] == 'b' || s[pos] == 'B')) {
      ++pos;
      char* end = nullptr;
      long idx = std::strtol(s.c_str() + pos, &end, 10);
      if (end == s.c_str() + pos || idx < 1 || idx > p) {
        usage_error("functional expression references a bad coordinate");
      }
      pos = end - s.c_str();
      expr.coeffs[idx - 1] += sign * coef;
    } else if (have_coef) {
      expr.intercept += sign * coef;
    } else {
      usage_error("cannot parse functional expression near '" +
                  s.substr(pos) + "'");
    }
  }
  return expr;
}

struct CommonFlags {
  std::string x_path;
  std::string y_path;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
};

void add_data_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--x", flags.x_path, "design matrix CSV (n x p)")
      ->required();
  cmd->add_option("--y", flags.y_path, "response CSV (n x 1)")->required();
  cmd->add_option("--seed", flags.seed, "random seed (default 0)");
  cmd->add_option("--threads", flags.threads,
                  "worker threads (default: REPRO_THREADS or 1)");
}

DatasetHandle load_data(const CommonFlags& flags, ManifestBuilder& manifest) {
  manifest.add_input("x", flags.x_path);
  manifest.add_input("y", flags.y_path);
  DatasetHandle data;
  check(repro_dataset_from_csv(flags.x_path.c_str(), flags.y_path.c_str(),
                               &data.ptr));
  return data;
}

CandidatesHandle load_candidates(const std::string& path,
                                 ManifestBuilder& manifest) {
  manifest.add_input("candidates", path);
  CandidatesHandle cands;
  check(repro_candidates_from_json(read_file(path).c_str(), &cands.ptr));
  return cands;
}

void require_level(double alpha, const char* flag) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    usage_error(std::string(flag) + " must lie in the open interval (0, 1)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repro-samples inference for high-dimensional linear regression"};
  app.require_subcommand(1);

  // ---- search ----
  CommonFlags search_flags;
  int search_d = 1000;
  std::string search_mode = "penalized";
  int search_kmax = 0;
  int search_max_support = 0;
  auto* search_cmd =
      app.add_subcommand("search", "data-driven candidate-model search");
  add_data_flags(search_cmd, search_flags);
  search_cmd->add_option("--d", search_d, "number of repro copies (default 1000)");
  search_cmd->add_option("--mode", search_mode, "penalized | constrained");
  search_cmd->add_option("--k-max", search_kmax,
                         "constrained mode: largest model size");
  search_cmd->add_option("--max-support", search_max_support,
                         "discard candidate supports above this size");
  search_cmd->add_option("--out", search_flags.out, "output JSON path")
      ->default_val("candidates.json");

  // ---- model-cs ----
  CommonFlags mcs_flags;
  std::string mcs_candidates;
  double mcs_alpha = 0.95;
  int mcs_J = 200;
  auto* mcs_cmd =
      app.add_subcommand("model-cs", "level-alpha model confidence set");
  add_data_flags(mcs_cmd, mcs_flags);
  mcs_cmd->add_option("--candidates", mcs_candidates,
                      "candidate set JSON from `search`")
      ->required();
  mcs_cmd->add_option("--alpha", mcs_alpha, "coverage target (default 0.95)");
  mcs_cmd->add_option("--J", mcs_J, "conditional Monte Carlo draws (default 200)");
  mcs_cmd->add_option("--out", mcs_flags.out, "output JSON path")
      ->default_val("model_cs.json");

  // ---- coef ----
  CommonFlags coef_flags;
  std::string coef_candidates;
  int coef_index = 0;
  std::string coef_subset;
  bool coef_joint = false;
  std::string coef_functional;
  double coef_alpha = 0.95;
  double coef_alpha1 = 0.0;
  double coef_alpha2 = 0.0;
  int coef_J = 200;
  int coef_samples = 10000;
  auto* coef_cmd = app.add_subcommand(
      "coef", "coefficient confidence sets accounting for model uncertainty");
  add_data_flags(coef_cmd, coef_flags);
  coef_cmd->add_option("--candidates", coef_candidates,
                       "candidate set JSON from `search`")
      ->required();
  auto* opt_index =
      coef_cmd->add_option("--index", coef_index, "single coefficient (1-based)");
  auto* opt_subset = coef_cmd->add_option(
      "--subset", coef_subset, "comma-separated coordinate list, e.g. 1,2,5");
  auto* opt_joint = coef_cmd->add_flag("--joint", coef_joint,
                                       "joint set for the full vector");
  auto* opt_functional = coef_cmd->add_option(
      "--functional", coef_functional,
      "linear expression of the coefficients, e.g. '2*b1 - b3 + 1'");
  auto* opt_alpha =
      coef_cmd->add_option("--alpha", coef_alpha, "coverage target (default 0.95)");
  auto* opt_alpha1 = coef_cmd->add_option(
      "--alpha1", coef_alpha1, "model-stage level of the two-stage set");
  auto* opt_alpha2 = coef_cmd->add_option(
      "--alpha2", coef_alpha2, "region-stage level of the two-stage set");
  coef_cmd->add_option("--J", coef_J, "draws for the two-stage model set");
  coef_cmd->add_option("--samples", coef_samples,
                       "samples per region for nonlinear functionals");
  coef_cmd->add_option("--out", coef_flags.out, "output JSON path")
      ->default_val("coef_cs.json");

  // ---- simulate ----
  std::string sim_scenario = "M1";
  std::string sim_scale = "desk";
  int sim_reps = 0;
  std::uint64_t sim_seed = 0;
  int sim_threads = 0;
  std::string sim_prefix = "sim";
  auto* sim_cmd = app.add_subcommand(
      "simulate", "replication harness for the M1-M3 study designs");
  sim_cmd->add_option("--scenario", sim_scenario,
                      "M1 | M2 | M3 | path to a scenario JSON file");
  sim_cmd->add_option("--scale", sim_scale, "desk | full (default desk)");
  sim_cmd->add_option("--reps", sim_reps, "override replication count");
  sim_cmd->add_option("--seed", sim_seed, "random seed (default 0)");
  sim_cmd->add_option("--threads", sim_threads,
                      "worker threads (default: REPRO_THREADS or 1)");
  sim_cmd->add_option("--out-prefix", sim_prefix,
                      "prefix for <prefix>_report.{json,csv}");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (search_cmd->parsed()) {
      ManifestBuilder manifest;
      manifest.command = "search";
      manifest.seed = search_flags.seed;
      if (search_mode != "penalized" && search_mode != "constrained") {
        usage_error("--mode must be penalized or constrained");
      }
      if (search_mode == "constrained" && search_kmax < 1) {
        usage_error("constrained mode needs --k-max >= 1");
      }
      json config;
      config["d"] = search_d;
      config["seed"] = search_flags.seed;
      config["threads"] = resolve_threads(search_flags.threads);
      config["mode"] = search_mode;
      if (search_kmax > 0) config["k_max"] = search_kmax;
      if (search_max_support > 0) config["max_support"] = search_max_support;
      manifest.config = config;

      DatasetHandle data = load_data(search_flags, manifest);
      CandidatesHandle cands;
      check(repro_search(data.ptr, config.dump().c_str(), &cands.ptr));
      char* out_json = nullptr;
      check(repro_candidates_to_json(cands.ptr, &out_json));
      emit_result(search_flags.out, manifest, take_string(out_json));
      return kExitOk;
    }

    if (mcs_cmd->parsed()) {
      ManifestBuilder manifest;
      manifest.command = "model-cs";
      manifest.seed = mcs_flags.seed;
      require_level(mcs_alpha, "--alpha");
      if (mcs_J < 1) usage_error("--J must be >= 1");
      if (mcs_J == 1) {
        std::cerr << "warning: --J 1 gives a degenerate one-atom conditional "
                     "pmf; tail probabilities are 0 or 1\n";
      }
      json options;
      options["alpha"] = mcs_alpha;
      options["J"] = mcs_J;
      options["seed"] = mcs_flags.seed;
      options["threads"] = resolve_threads(mcs_flags.threads);
      manifest.config = options;

      DatasetHandle data = load_data(mcs_flags, manifest);
      CandidatesHandle cands = load_candidates(mcs_candidates, manifest);
      char* out_json = nullptr;
      check(repro_model_cs(data.ptr, cands.ptr, options.dump().c_str(),
                           &out_json));
      emit_result(mcs_flags.out, manifest, take_string(out_json));
      return kExitOk;
    }

    if (coef_cmd->parsed()) {
      ManifestBuilder manifest;
      manifest.command = "coef";
      manifest.seed = coef_flags.seed;
      int n_modes = (opt_index->count() > 0) + (opt_subset->count() > 0) +
                    (opt_joint->count() > 0) + (opt_functional->count() > 0);
      if (n_modes != 1) {
        usage_error(
            "exactly one of --index, --subset, --joint, --functional is "
            "required");
      }
      bool two_stage = opt_alpha1->count() > 0 || opt_alpha2->count() > 0;
      if (two_stage && opt_alpha->count() > 0) {
        usage_error("--alpha conflicts with --alpha1/--alpha2; give one form");
      }
      if (two_stage &&
          (opt_alpha1->count() == 0 || opt_alpha2->count() == 0)) {
        usage_error("--alpha1 and --alpha2 must be given together");
      }
      if (two_stage) {
        if (!(coef_alpha1 > 0.5 && coef_alpha1 < 1.0) ||
            !(coef_alpha2 > 0.5 && coef_alpha2 < 1.0)) {
          usage_error("--alpha1 and --alpha2 must lie in (1/2, 1)");
        }
        if (opt_functional->count() > 0 || opt_joint->count() > 0) {
          usage_error("--alpha1/--alpha2 applies to --index or --subset");
        }
      } else {
        require_level(coef_alpha, "--alpha");
      }

      json options;
      options["seed"] = coef_flags.seed;
      manifest.config = options;
      DatasetHandle data = load_data(coef_flags, manifest);
      CandidatesHandle cands = load_candidates(coef_candidates, manifest);
      const int p = repro_dataset_p(data.ptr);

      std::vector<int> lambda;
      if (opt_index->count() > 0) {
        if (coef_index < 1 || coef_index > p) {
          usage_error("--index must lie in [1, p]");
        }
        lambda = {coef_index};
      } else if (opt_subset->count() > 0) {
        std::istringstream is(coef_subset);
        std::string tok;
        while (std::getline(is, tok, ',')) {
          try {
            lambda.push_back(std::stoi(tok));
          } catch (const std::exception&) {
            usage_error("--subset must be a comma-separated integer list");
          }
        }
        if (lambda.empty()) usage_error("--subset is empty");
      }

      char* out_json = nullptr;
      if (two_stage) {
        options["alpha1"] = coef_alpha1;
        options["alpha2"] = coef_alpha2;
        options["J"] = coef_J;
        options["threads"] = resolve_threads(coef_flags.threads);
        manifest.config = options;
        check(repro_coef_modified(data.ptr, cands.ptr, lambda.data(),
                                  static_cast<int>(lambda.size()),
                                  options.dump().c_str(), &out_json));
      } else if (opt_index->count() > 0) {
        options["alpha"] = coef_alpha;
        manifest.config = options;
        check(repro_coef_single(data.ptr, cands.ptr, coef_index,
                                options.dump().c_str(), &out_json));
      } else if (opt_subset->count() > 0) {
        options["alpha"] = coef_alpha;
        manifest.config = options;
        check(repro_coef_subset(data.ptr, cands.ptr, lambda.data(),
                                static_cast<int>(lambda.size()),
                                options.dump().c_str(), &out_json));
      } else if (opt_joint->count() > 0) {
        options["alpha"] = coef_alpha;
        manifest.config = options;
        check(repro_coef_joint(data.ptr, cands.ptr, options.dump().c_str(),
                               &out_json));
      } else {
        LinearExpr expr = parse_linear_expr(coef_functional, p);
        options["alpha"] = coef_alpha;
        options["linear"] = {{"coeffs", expr.coeffs},
                             {"intercept", expr.intercept}};
        options["samples_per_region"] = coef_samples;
        manifest.config = options;
        check(repro_coef_functional(data.ptr, cands.ptr, nullptr, nullptr,
                                    options.dump().c_str(), &out_json));
      }
      emit_result(coef_flags.out, manifest, take_string(out_json));
      return kExitOk;
    }

    if (sim_cmd->parsed()) {
      ManifestBuilder manifest;
      manifest.command = "simulate";
      manifest.seed = sim_seed;
      if (sim_scale != "desk" && sim_scale != "full") {
        usage_error("--scale must be desk or full");
      }
      if (sim_scale == "full") {
        std::cerr << "warning: full-scale replication uses the full study "
                     "draw and replication counts and can run for hours\n";
      }
      json scenario;
      if (sim_scenario == "M1" || sim_scenario == "M2" || sim_scenario == "M3") {
        scenario["name"] = sim_scenario;
      } else {
        // Treat anything else as a path to a custom scenario file.
        std::ifstream probe(sim_scenario);
        if (!probe.is_open()) {
          usage_error("unknown scenario '" + sim_scenario +
                      "' (valid names: M1, M2, M3, or a config file path)");
        }
        manifest.add_input("scenario", sim_scenario);
        scenario = json::parse(read_file(sim_scenario), nullptr, false);
        if (scenario.is_discarded() || !scenario.is_object()) {
          usage_error("scenario file '" + sim_scenario + "' is not a JSON object");
        }
      }
      scenario["scale"] = sim_scale;
      if (sim_reps > 0) scenario["replications"] = sim_reps;
      scenario["seed"] = sim_seed;
      scenario["threads"] = resolve_threads(sim_threads);
      manifest.config = scenario;

      char* report_json = nullptr;
      char* report_csv = nullptr;
      check(repro_simulate(scenario.dump().c_str(), &report_json, &report_csv));
      std::string json_path = sim_prefix + "_report.json";
      std::string csv_path = sim_prefix + "_report.csv";
      emit_result(json_path, manifest, take_string(report_json));
      std::string csv = "# manifest: " + json_path + "\n" +
                        take_string(report_csv);
      write_file(csv_path, csv);
      std::cout << "wrote " << csv_path << "\n";
      return kExitOk;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
