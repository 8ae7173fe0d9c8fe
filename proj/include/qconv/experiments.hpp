// Experiment harness: one subcommand per inequality family, JSON configs in,
// results.json (+ trace.csv for trajectory runs) out. Identical config and
// seed reproduce the record byte-for-byte except for the wall-clock field.
#pragma once

#include <string>

#include "json.hpp"

#include "qconv/magic.hpp"

namespace qconv {

using Json = nlohmann::ordered_json;

inline constexpr const char* kArtifactVersion = "qconv 1.0.0";
inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
  std::string experiment;
  long long d = 7;
  long long n = 1;
  long long trials = 20;
  long long rank = 0;  // 0 means full rank
  std::uint64_t seed = 1;
  long long n_max = 6;
  std::string fixture;  // "", "tstate", or "stabilizer"
  double alpha = 1.0;
  long long stabilizer_triples = 500;
  long long diagonal_trials = 100;
  long long scan_triples = 50;
  long long channels = 10;
  double bound_slack = tol::bound_slack;
  double margin_floor = -tol::bound_slack;
  double entropy_slack = tol::entropy;
  double unimodular_tol = tol::unimodular;
  Json raw;  // config echo for the record
};

// Parse + validate; rejects unknown keys, wrong experiment names, and field
// values outside their documented ranges.
ExperimentConfig load_config(const std::string& path, const std::string& subcommand);
ExperimentConfig config_from_json(const Json& doc, const std::string& subcommand);
ExperimentConfig default_config(const std::string& subcommand);

struct ExperimentResult {
  Json record;
  std::string trace_csv;  // empty when the command emits no trace
  bool all_passed = true;
};

ExperimentResult cmd_clt_run(const ExperimentConfig& cfg, long long workers);
ExperimentResult cmd_doubling(const ExperimentConfig& cfg, long long workers);
ExperimentResult cmd_qist(const ExperimentConfig& cfg, long long workers);
ExperimentResult cmd_ruzsa(const ExperimentConfig& cfg, long long workers);
ExperimentResult cmd_cssa_scan(const ExperimentConfig& cfg, long long workers);
ExperimentResult cmd_triangle_scan(const ExperimentConfig& cfg, long long workers);
ExperimentResult cmd_magic_measure(const ExperimentConfig& cfg, long long workers);
ExperimentResult cmd_params(long long d);

// Dispatch by cfg.experiment; stamps wall_clock_ms into the record.
ExperimentResult run_experiment(const ExperimentConfig& cfg, long long workers);

// Serialization with the wall-clock field removed; the determinism contract
// compares these bytes.
std::string canonical_record(const Json& record);

void write_results(const ExperimentResult& result, const std::string& out_dir);

}  // namespace qconv
