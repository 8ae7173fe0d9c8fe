#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qconv/experiments.hpp"

using namespace qconv;

namespace {

Json base_doc(const std::string& experiment) {
  Json doc;
  doc["schema_version"] = 1;
  doc["experiment"] = experiment;
  return doc;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

long long count_fields(const std::string& line) {
  return 1 + std::count(line.begin(), line.end(), ',');
}

}  // namespace

TEST_CASE("config parser rejects malformed documents") {
  Json doc = base_doc("clt-run");
  doc["trails"] = 3;  // typo for trials
  CHECK_THROWS_AS(config_from_json(doc, "clt-run"), config_error);

  doc = base_doc("clt-run");
  doc["schema_version"] = 2;
  CHECK_THROWS_AS(config_from_json(doc, "clt-run"), config_error);

  CHECK_THROWS_AS(config_from_json(base_doc("doubling"), "qist"), config_error);
  CHECK_THROWS_AS(config_from_json(base_doc("warp"), "warp"), config_error);

  doc = base_doc("clt-run");
  doc["fixture"] = "bogus";
  CHECK_THROWS_AS(config_from_json(doc, "clt-run"), config_error);

  doc = base_doc("clt-run");
  doc["fixture"] = "tstate";
  doc["d"] = 7;
  CHECK_THROWS_AS(config_from_json(doc, "clt-run"), config_error);

  doc = base_doc("clt-run");
  doc["trials"] = 0;
  CHECK_THROWS_AS(config_from_json(doc, "clt-run"), config_error);

  doc = base_doc("clt-run");
  doc["n_max"] = 0;
  CHECK_THROWS_AS(config_from_json(doc, "clt-run"), config_error);

  doc = base_doc("clt-run");
  doc["tolerances"] = Json{{"bound_slak", 1e-8}};  // typo for bound_slack
  CHECK_THROWS_AS(config_from_json(doc, "clt-run"), config_error);
}

TEST_CASE("config fields round-trip from a full document") {
  Json doc = base_doc("cssa-scan");
  doc["d"] = 23;
  doc["n"] = 1;
  doc["trials"] = 3;
  doc["rank"] = 4;
  doc["seed"] = 99;
  doc["n_max"] = 2;
  doc["alpha"] = 2.0;
  doc["stabilizer_triples"] = 7;
  doc["diagonal_trials"] = 5;
  doc["scan_triples"] = 2;
  doc["channels"] = 1;
  doc["tolerances"] = Json{{"bound_slack", 1e-7}, {"margin_floor", -1e-7}};

  const ExperimentConfig cfg = config_from_json(doc, "cssa-scan");
  CHECK(cfg.experiment == "cssa-scan");
  CHECK(cfg.d == 23);
  CHECK(cfg.trials == 3);
  CHECK(cfg.rank == 4);
  CHECK(cfg.seed == 99);
  CHECK(cfg.n_max == 2);
  CHECK(cfg.alpha == 2.0);
  CHECK(cfg.stabilizer_triples == 7);
  CHECK(cfg.diagonal_trials == 5);
  CHECK(cfg.scan_triples == 2);
  CHECK(cfg.channels == 1);
  CHECK(cfg.bound_slack == 1e-7);
  CHECK(cfg.margin_floor == -1e-7);
  CHECK(cfg.raw["experiment"] == "cssa-scan");
}

TEST_CASE("default configs and file loading") {
  const ExperimentConfig cfg = default_config("doubling");
  CHECK(cfg.experiment == "doubling");
  CHECK(cfg.d == 7);
  CHECK(cfg.trials >= 1);

  CHECK_THROWS_AS(load_config("/nonexistent/qconv.json", "clt-run"), config_error);

  const auto path = std::filesystem::temp_directory_path() / "qconv_cfg_test.json";
  {
    std::ofstream out(path);
    out << R"({"schema_version": 1, "experiment": "params", "d": 11})" << "\n";
  }
  const ExperimentConfig loaded = load_config(path.string(), "params");
  CHECK(loaded.d == 11);
  std::filesystem::remove(path);

  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_config(path.string(), "params"), config_error);
  std::filesystem::remove(path);
}

TEST_CASE("clt-run on the qubit fixture emits a well-formed record and trace") {
  Json doc = base_doc("clt-run");
  doc["d"] = 2;
  doc["n"] = 1;
  doc["n_max"] = 3;
  doc["fixture"] = "tstate";
  doc["trials"] = 5;  // collapsed to 1 for the deterministic fixture
  const ExperimentConfig cfg = config_from_json(doc, "clt-run");

  const ExperimentResult result = run_experiment(cfg, 1);
  CHECK(result.all_passed);
  CHECK(result.record["all_passed"] == true);
  CHECK(result.record["schema_version"] == kSchemaVersion);
  CHECK(result.record["artifact_version"] == kArtifactVersion);
  CHECK(result.record["experiment"] == "clt-run");
  CHECK(result.record["config"]["fixture"] == "tstate");
  CHECK(result.record["trials"].size() == 1);
  CHECK(result.record.contains("wall_clock_ms"));
  REQUIRE(result.record["assertions"].size() >= 3);
  for (const auto& a : result.record["assertions"]) {
    CHECK(a.contains("claim"));
    CHECK(a.contains("margin"));
    CHECK(a["pass"] == true);
  }

  const auto lines = split_lines(result.trace_csv);
  REQUIRE(lines.size() == 3);  // header plus the N = 1 and N = 3 steps
  CHECK(lines[0] == "trial,N,entropy,relative_entropy,bound,trace_distance,pinsker_bound");
  for (size_t i = 1; i < lines.size(); ++i) CHECK(count_fields(lines[i]) == 7);
  CHECK(lines[1].rfind("0,1,", 0) == 0);
  CHECK(lines[2].rfind("0,3,", 0) == 0);

  const std::string canonical = canonical_record(result.record);
  CHECK(canonical.find("wall_clock_ms") == std::string::npos);
  CHECK(canonical.back() == '\n');
}

TEST_CASE("identical config and seed reproduce the canonical record") {
  Json doc = base_doc("clt-run");
  doc["d"] = 7;
  doc["n_max"] = 2;
  doc["trials"] = 2;
  doc["rank"] = 3;
  doc["seed"] = 11;
  const ExperimentConfig cfg = config_from_json(doc, "clt-run");

  const std::string first = canonical_record(run_experiment(cfg, 1).record);
  const std::string second = canonical_record(run_experiment(cfg, 1).record);
  CHECK(first == second);

  doc["seed"] = 12;
  const ExperimentConfig reseeded = config_from_json(doc, "clt-run");
  CHECK(canonical_record(run_experiment(reseeded, 1).record) != first);
}

TEST_CASE("worker count does not change the canonical record") {
  Json doc = base_doc("doubling");
  doc["d"] = 7;
  doc["trials"] = 3;
  doc["seed"] = 5;
  const ExperimentConfig cfg = config_from_json(doc, "doubling");
  const std::string serial = canonical_record(run_experiment(cfg, 1).record);
  const std::string threaded = canonical_record(run_experiment(cfg, 3).record);
  CHECK(serial == threaded);
}

TEST_CASE("parameter feasibility certificates") {
  const ExperimentResult d7 = cmd_params(7);
  CHECK(d7.all_passed);
  const Json& f7 = d7.record["aggregate"]["feasibility"];
  CHECK(f7["pairs_searched"] == 36);
  CHECK(f7["pair"]["feasible"] == true);
  CHECK(f7["pair"]["s"] == 2);
  CHECK(f7["pair"]["t"] == 2);
  CHECK(f7["balanced"]["feasible"] == true);
  CHECK(f7["triple"]["feasible"] == false);

  const ExperimentResult d23 = cmd_params(23);
  const Json& f23 = d23.record["aggregate"]["feasibility"];
  CHECK(f23["pair"]["feasible"] == true);
  CHECK(f23["balanced"]["s"] == 9);
  CHECK(f23["balanced"]["t"] == 9);
  CHECK(f23["triple"]["feasible"] == true);
  CHECK(f23["triple"]["s"] == 9);
  CHECK(f23["triple"]["t"] == 9);
  CHECK(f23["triple"]["l"] == 4);
  CHECK(f23["triple"]["m"] == 13);

  // infeasibility is itself a certificate, not a failure
  for (long long d : {2LL, 3LL, 5LL}) {
    const ExperimentResult r = cmd_params(d);
    CHECK(r.all_passed);
    const Json& f = r.record["aggregate"]["feasibility"];
    CHECK(f["pair"]["feasible"] == false);
    CHECK(f["balanced"]["feasible"] == false);
    CHECK(f["triple"]["feasible"] == false);
  }

  CHECK_THROWS_AS(cmd_params(4), config_error);
  CHECK_THROWS_AS(cmd_params(1), config_error);
}

TEST_CASE("command-level config rejections") {
  ExperimentConfig cfg = default_config("ruzsa");
  cfg.d = 2;
  CHECK_THROWS_AS(cmd_ruzsa(cfg, 1), config_error);
  cfg.d = 7;
  cfg.n = 2;
  CHECK_THROWS_AS(cmd_ruzsa(cfg, 1), config_error);

  cfg = default_config("cssa-scan");
  cfg.n = 2;
  CHECK_THROWS_AS(cmd_cssa_scan(cfg, 1), config_error);

  cfg = default_config("triangle-scan");
  cfg.n = 2;
  CHECK_THROWS_AS(cmd_triangle_scan(cfg, 1), config_error);

  // d = 7 admits no triple parameters, so the scan cannot be configured
  cfg = default_config("cssa-scan");
  cfg.d = 7;
  CHECK_THROWS_AS(cmd_cssa_scan(cfg, 1), no_valid_params);

  ExperimentConfig unknown = default_config("qist");
  unknown.experiment = "warp";
  CHECK_THROWS_AS(run_experiment(unknown, 1), config_error);
}

TEST_CASE("small runs of every remaining subcommand pass their assertions") {
  Json doc = base_doc("doubling");
  doc["d"] = 2;
  doc["trials"] = 2;
  const ExperimentResult doubling = run_experiment(config_from_json(doc, "doubling"), 1);
  CHECK(doubling.all_passed);
  CHECK(doubling.record["trials"].size() == 2);

  doc = base_doc("qist");
  doc["d"] = 7;
  doc["trials"] = 2;
  const ExperimentResult qist = run_experiment(config_from_json(doc, "qist"), 1);
  CHECK(qist.all_passed);

  doc = base_doc("magic-measure");
  doc["d"] = 2;
  doc["trials"] = 2;
  doc["channels"] = 1;
  const ExperimentResult magic = run_experiment(config_from_json(doc, "magic-measure"), 1);
  CHECK(magic.all_passed);
  CHECK(magic.record["trials"].size() == 2);

  doc = base_doc("cssa-scan");
  doc["d"] = 23;
  doc["stabilizer_triples"] = 2;
  doc["diagonal_trials"] = 1;
  doc["scan_triples"] = 1;
  const ExperimentResult cssa = run_experiment(config_from_json(doc, "cssa-scan"), 1);
  CHECK(cssa.all_passed);
  CHECK(cssa.record["aggregate"].contains("stabilizer_min_margin"));
  CHECK(cssa.record["aggregate"].contains("random_min_margin"));
  CHECK(cssa.record["aggregate"].contains("random_findings"));

  doc = base_doc("triangle-scan");
  doc["d"] = 7;
  doc["trials"] = 1;
  doc["stabilizer_triples"] = 1;
  doc["scan_triples"] = 1;
  const ExperimentResult triangle = run_experiment(config_from_json(doc, "triangle-scan"), 1);
  CHECK(triangle.all_passed);
}

TEST_CASE("write_results materializes the artifact files") {
  const auto dir = std::filesystem::temp_directory_path() / "qconv_results_test";
  std::filesystem::remove_all(dir);

  const ExperimentResult params = cmd_params(7);
  write_results(params, dir.string());
  {
    std::ifstream in(dir / "results.json");
    REQUIRE(in.good());
    const Json readback = Json::parse(in);
    CHECK(readback["experiment"] == "params");
    CHECK(readback["aggregate"]["feasibility"]["pair"]["s"] == 2);
  }
  CHECK_FALSE(std::filesystem::exists(dir / "trace.csv"));  // params has no trace

  Json doc = base_doc("clt-run");
  doc["d"] = 2;
  doc["n"] = 1;
  doc["n_max"] = 3;
  doc["fixture"] = "tstate";
  write_results(run_experiment(config_from_json(doc, "clt-run"), 1), dir.string());
  CHECK(std::filesystem::exists(dir / "trace.csv"));
  std::ifstream trace(dir / "trace.csv");
  std::string header;
  std::getline(trace, header);
  CHECK(header == "trial,N,entropy,relative_entropy,bound,trace_distance,pinsker_bound");

  std::filesystem::remove_all(dir);
}
