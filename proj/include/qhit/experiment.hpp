#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace qhit {

inline constexpr std::array<const char*, 6> kExperimentKinds = {
    "quenched_shift", "annealed_shift", "ledger", "entropy", "circle_law", "singularity"};

/// Typed view of a JSON experiment file. See configs/ for one example per kind.
struct ExperimentConfig {
  std::string kind;
  nlohmann::json raw;

  std::string base_kind = "bernoulli";
  Eigen::VectorXd base_weights = Eigen::Vector2d(0.5, 0.5);
  Eigen::MatrixXd base_transition;
  Eigen::MatrixXd fiber_w;

  std::array<unsigned, 2> multipliers{2, 3};
  std::optional<unsigned> precision_bits;

  std::vector<int> n_values;
  std::vector<double> t_grid;
  std::vector<double> r_values;
  std::vector<std::uint64_t> seeds;

  std::size_t trials = 10000;
  std::size_t windows = 200;
  std::size_t samples = 200;
  std::size_t draws = 1000;
  double threshold = 10.0;
  std::optional<std::int64_t> gap;  // empty: gap_schedule(n, h0)
  std::int64_t jmax = 0;
  double budget = 1e10;
  unsigned threads = 0;
  std::string output_dir = "out";
};

struct ParsedConfig {
  ExperimentConfig config;
  std::vector<std::string> violations;
};

ParsedConfig parse_config(const nlohmann::json& j);
std::vector<std::string> validate(const nlohmann::json& j);
nlohmann::json load_config_file(const std::filesystem::path& path);

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitBudget = 2, kExitInternal = 3 };

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> files;   // relative to the output directory, sorted
  std::vector<std::string> errors;  // validation violations or truncation notes
  std::filesystem::path out_dir;
};

/// Validates, runs, and writes CSV/JSON artifacts plus manifest.json (config
/// hash, code version, per-file SHA-256). Outputs depend only on the config
/// and seeds, never on the worker count.
RunOutcome run_experiment(const nlohmann::json& j, const RunOptions& options = {});

std::string code_version();

}  // namespace qhit
