// qhit: configuration-driven runner for the hitting-time experiments.
//
//   qhit list-experiments
//   qhit validate --config FILE
//   qhit run --config FILE [--out DIR] [--threads N] [--seed S]
//
// Exit codes: 0 ok, 1 validation, 2 budget, 3 internal.

#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qhit/experiment.hpp"

namespace {

void print_errors(const char* key, const std::vector<std::string>& errors) {
  std::cerr << nlohmann::json{{key, errors}}.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quenched and annealed hitting-time experiments", "qhit"};
  app.set_version_flag("--version", qhit::code_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  std::uint64_t seed = 0;

  auto* list = app.add_subcommand("list-experiments", "Print the experiment kinds");
  auto* validate = app.add_subcommand("validate", "Check a config and print violations");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto* run = app.add_subcommand("run", "Run an experiment and write its artifacts");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto* out_opt = run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads, 0 = all cores");
  auto* seed_opt = run->add_option("--seed", seed, "Single seed replacing the config's seed list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? qhit::kExitOk : qhit::kExitValidation;
  }

  try {
    if (*list) {
      for (const char* kind : qhit::kExperimentKinds) std::cout << kind << '\n';
      return qhit::kExitOk;
    }
    const nlohmann::json config = qhit::load_config_file(config_path);
    if (*validate) {
      const auto violations = qhit::validate(config);
      std::cout << nlohmann::json{{"violations", violations}}.dump(2) << '\n';
      return violations.empty() ? qhit::kExitOk : qhit::kExitValidation;
    }
    qhit::RunOptions options;
    if (*out_opt) options.out_dir = out_dir;
    if (*threads_opt) options.threads = threads;
    if (*seed_opt) options.seed = seed;
    const qhit::RunOutcome outcome = qhit::run_experiment(config, options);
    if (outcome.exit_code == qhit::kExitValidation) {
      print_errors("violations", outcome.errors);
    } else if (!outcome.errors.empty()) {
      print_errors("errors", outcome.errors);
    }
    for (const auto& f : outcome.files) std::cout << (outcome.out_dir / f).string() << '\n';
    return outcome.exit_code;
  } catch (const nlohmann::json::exception& e) {
    print_errors("violations", {std::string("config is not valid JSON: ") + e.what()});
    return qhit::kExitValidation;
  } catch (const std::exception& e) {
    print_errors("errors", {e.what()});
    return qhit::kExitInternal;
  }
}
