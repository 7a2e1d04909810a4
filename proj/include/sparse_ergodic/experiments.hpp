#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparse_ergodic/fit.hpp"

namespace sparse_ergodic::experiments {

inline constexpr int kSummarySchemaVersion = 1;

/// Parameters of one experiment run. Unset grids take the experiment's defaults.
struct ExperimentConfig {
  std::string name;
  double c = 1.1;
  double alpha = 0.3;
  double delta = 0.01;
  std::optional<std::vector<std::int64_t>> N;  ///< dyadic
  std::optional<std::vector<std::int64_t>> H;
  std::optional<std::vector<std::int64_t>> K;
  std::optional<std::vector<double>> u;
  std::uint64_t seed = 1;
  std::int64_t seed_count = 100;
  std::int64_t trials = 10000;  ///< corpus size / instances / n range, per experiment
  double tau = 0.1;
  int R = 16;
  double epsilon = 1.0;
  double level = 0.125;
  int oversample = 8;
  std::int64_t modulus = 10007;
  int window_log2 = 18;
  double c0 = 0.01;
  std::filesystem::path out = ".";
  std::optional<double> slope_tolerance;
  std::optional<double> residual_tolerance;
  unsigned threads = 0;  ///< 0 keeps the current setting
};

/// Parses and validates; throws ConfigError on unknown keys, bad types,
/// empty or non-dyadic N grids.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig config_from_file(const std::filesystem::path& path);
/// Fully resolved config (defaults filled in).
nlohmann::json to_json(const ExperimentConfig& cfg);

const std::vector<std::string>& experiment_names();
/// Fills the experiment's default grids; throws ConfigError for unknown names.
ExperimentConfig resolve(const ExperimentConfig& cfg);

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  std::string relation;  ///< "<=", "<", ">=", "=="
  bool pass = false;
};

Check make_check(std::string name, double value, std::string relation, double limit);

struct Report {
  std::string experiment;
  std::string csv_header;
  std::vector<std::string> rows;
  std::vector<std::pair<std::string, fit::AsymptoticFit>> fits;
  std::vector<Check> checks;
  nlohmann::json extra = nlohmann::json::object();

  bool pass() const;
  std::string csv() const;
  const fit::AsymptoticFit& fit(const std::string& name) const;
  const Check& check(const std::string& name) const;
  nlohmann::json summary(const ExperimentConfig& resolved) const;
};

/// Runs without touching the filesystem.
Report compute(const ExperimentConfig& cfg);

struct Written {
  Report report;
  std::filesystem::path csv;
  std::filesystem::path json;
};

/// Runs and writes <out>/<name>.csv and <out>/<name>.json.
Written run_experiment(const ExperimentConfig& cfg);

}  // namespace sparse_ergodic::experiments
