// command line front end: parse a config, run one experiment, write artifacts
//
// exit codes: 0 success, 2 at least one recorded claim failed, 3 unusable
// configuration (bad file, infeasible parameters, budget exceeded)

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "qconv/experiments.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::string out;
  long long seed = -1;
  long long workers = 1;
};

void attach_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config, "path to a JSON experiment config");
  sub->add_option("--out", opts.out, "output directory for results.json / trace.csv");
  sub->add_option("--seed", opts.seed, "override the config seed");
  sub->add_option("--workers", opts.workers, "worker threads for independent trials")
      ->check(CLI::PositiveNumber);
}

int run(const std::string& subcommand, const CommonOpts& opts, long long params_d) {
  qconv::ExperimentConfig cfg = opts.config.empty()
                                    ? qconv::default_config(subcommand)
                                    : qconv::load_config(opts.config, subcommand);
  if (opts.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(opts.seed);
    cfg.raw["seed"] = opts.seed;
  }
  if (subcommand == "params" && params_d > 0) {
    cfg.d = params_d;
    cfg.raw["d"] = params_d;
  }
  const qconv::ExperimentResult result = qconv::run_experiment(cfg, opts.workers);

  for (const auto& a : result.record["assertions"]) {
    const bool pass = a["pass"].get<bool>();
    std::string margin = "n/a";
    if (!a["margin"].is_null()) margin = a["margin"].dump();
    std::printf("[%s] %s (margin=%s)\n", pass ? "PASS" : "FAIL",
                a["claim"].get<std::string>().c_str(), margin.c_str());
  }

  const std::string out_dir = opts.out.empty() ? "results/" + subcommand : opts.out;
  qconv::write_results(result, out_dir);
  std::printf("wrote %s/results.json\n", out_dir.c_str());
  if (!result.trace_csv.empty()) std::printf("wrote %s/trace.csv\n", out_dir.c_str());
  return result.all_passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-space convolution experiments"};
  app.require_subcommand(1);

  const std::vector<std::string> names = {"clt-run",  "doubling",      "qist",
                                          "ruzsa",    "cssa-scan",     "triangle-scan",
                                          "magic-measure"};
  std::vector<CommonOpts> opts(names.size() + 1);
  std::vector<CLI::App*> subs;
  for (size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], "run the " + names[i] + " experiment");
    attach_common(sub, opts[i]);
    subs.push_back(sub);
  }
  long long params_d = 0;
  CLI::App* params_sub = app.add_subcommand("params", "report convolution parameter feasibility");
  attach_common(params_sub, opts[names.size()]);
  params_sub->add_option("--d", params_d, "dimension to probe")->check(CLI::PositiveNumber);
  subs.push_back(params_sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  std::string chosen;
  const CommonOpts* chosen_opts = nullptr;
  for (size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) {
      chosen = i < names.size() ? names[i] : "params";
      chosen_opts = &opts[i];
      break;
    }
  }

  try {
    return run(chosen, *chosen_opts, params_d);
  } catch (const qconv::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}
