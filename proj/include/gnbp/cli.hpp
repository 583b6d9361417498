#pragma once

// Config-driven experiment runner behind the `gnbp` command-line tool.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gnbp/data.hpp"
#include "gnbp/network.hpp"
#include "gnbp/trainers.hpp"

namespace gnbp {

struct RunConfig {
  std::filesystem::path dataset_path;
  LabelColumn label_column;
  /// Units per layer, hidden layers first, output layer last. The input
  /// width comes from the dataset.
  std::vector<std::size_t> layers;
  std::vector<Transfer> transfers;
  TrainConfig train;
  double test_fraction = 0.3;
  bool stratified = true;
  double init_half_range = 0.5;
  std::optional<std::filesystem::path> output_path;
};

/// Parses `key=value` lines; `#` starts a comment. Relative dataset and
/// output paths are resolved against `base_dir`. Throws ConfigError.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Built-in experiment presets "iris" and "wine" for a given algorithm.
/// Dataset files are looked up in `data_dir` (iris.data, wine.data).
RunConfig preset(std::string_view name, Algorithm algorithm,
                 const std::filesystem::path& data_dir);

struct RunOutcome {
  TrainReport report;
  std::vector<std::string> class_names;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double final_test_pct = 0.0;
  std::size_t test_iterations_to_stable = 1;
};

/// load -> encode -> split -> normalize (train min/max) -> init -> train.
/// Module errors propagate.
RunOutcome execute(const RunConfig& config);

/// Header `iter,M,mse,correct_pct,ridge,accepted,workspace_scalars`, one row per record.
void write_trace(std::ostream& out, const TrainReport& report);

std::string summary_line(const RunOutcome& outcome);

/// Runs one experiment, writes the trace (to output_path, else `out`) and a
/// summary line. Returns 0, 2 when training stalled, 1 on any error.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Throws MismatchedExperiment unless both configs share dataset, split,
/// seed and topology.
void check_same_experiment(const RunConfig& a, const RunConfig& b);

/// Runs both configs and prints the four-row convergence table.
int compare(const RunConfig& a, const RunConfig& b, std::ostream& out, std::ostream& err);

}  // namespace gnbp
