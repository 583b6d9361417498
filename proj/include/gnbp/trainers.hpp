#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gnbp/linalg.hpp"
#include "gnbp/network.hpp"

namespace gnbp {

enum class Algorithm { sdbp, improved_gn, lm };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view name);

/// Maps a network output to a class index.
using Classifier = std::function<std::size_t(std::span<const double>)>;

struct TrainConfig {
  Algorithm algorithm = Algorithm::improved_gn;
  double alpha = 0.1;
  std::size_t max_iterations = 100;
  double mse_threshold = 2.47e-5;
  double classification_threshold = 97.78;
  double ridge_initial = 0.0;
  double ridge_growth = 10.0;
  double ridge_max = 1e10;
  /// First nonzero ridge tried after a rejection at ridge 0.
  double ridge_floor = 1e-3;
  bool pre_adjust_enabled = true;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct IterationRecord {
  std::size_t index = 0;
  double performance_index = 0.0;
  double mse = 0.0;
  std::optional<double> correct_pct;          // training set; absent when unlabelled
  std::optional<double> holdout_correct_pct;  // held-out set, when one is supplied
  double ridge_used = 0.0;
  bool step_accepted = false;
  /// improved_gn only: the accepted candidate included the half-gradient adjustment.
  bool pre_adjusted = false;
  /// Ridges tried and rejected during this iteration, in order.
  std::vector<double> rejected_ridges;
  std::size_t workspace_scalars = 0;
};

enum class StopReason { mse_reached, classification_reached, max_iterations, stalled };

std::string_view to_string(StopReason r);

struct TrainReport {
  std::vector<IterationRecord> records;
  StopReason stop_reason = StopReason::max_iterations;
  Mlp final_mlp;
  /// First record index from which the training correct_pct stays at its final value.
  std::size_t iterations_to_stable = 1;
  /// Same, over the held-out set.
  std::optional<std::size_t> holdout_iterations_to_stable;

  std::size_t peak_workspace_scalars() const;
};

/// One batch steepest-descent step, x - alpha * grad M(x).
Mlp sdbp_epoch(const Mlp& mlp, const Dataset& data, double alpha);

/// -(J^T J + ridge I)^{-1} J^T q. Throws SingularNormalEquations when the
/// damped normal matrix cannot be factored.
Vector gn_step(const Matrix& jac, std::span<const double> q, double ridge);

/// x - grad / 2 over the whole flattened parameter vector.
Vector pre_adjust(std::span<const double> x, std::span<const double> grad);

/// Percentage of patterns whose classified output matches the label.
/// Throws MissingLabels on unlabelled data.
double correct_pct(const Mlp& mlp, const Dataset& data, const Classifier& classify);

enum class WorkspaceStage { sdbp_iteration, gn_iteration };

struct ProblemSizes {
  std::size_t patterns = 0;
  std::size_t outputs = 0;
  std::size_t params = 0;
};

/// Live double-precision scalars at the peak of one iteration.
///   sdbp: parameters + gradient = 2n
///   gn:   J (mk x n) + J^T J (n^2) + q (mk) + gradient, step, parameters (3n)
std::size_t workspace_scalars(WorkspaceStage stage, const ProblemSizes& sizes);

WorkspaceStage workspace_stage(Algorithm a);

/// Runs the configured trainer from `mlp` on `data`. When `holdout` is given
/// its classification rate is recorded per iteration; it never influences
/// the update or the stopping decision.
TrainReport train(const Mlp& mlp, const Dataset& data, const TrainConfig& config,
                  const Classifier& classify, const Dataset* holdout = nullptr);

/// First 1-based position from which every value equals the last one.
std::size_t plateau_start(std::span<const double> values);

}  // namespace gnbp
