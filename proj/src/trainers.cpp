#include "gnbp/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gnbp/backprop.hpp"
#include "gnbp/errors.hpp"

namespace gnbp {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::sdbp:
      return "sdbp";
    case Algorithm::improved_gn:
      return "improved_gn";
    case Algorithm::lm:
      return "lm";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "sdbp") return Algorithm::sdbp;
  if (name == "improved_gn") return Algorithm::improved_gn;
  if (name == "lm") return Algorithm::lm;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::mse_reached:
      return "mse_reached";
    case StopReason::classification_reached:
      return "classification_reached";
    case StopReason::max_iterations:
      return "max_iterations";
    case StopReason::stalled:
      return "stalled";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
  if (!(mse_threshold >= 0.0)) throw std::invalid_argument("mse_threshold must be nonnegative");
  if (!(classification_threshold >= 0.0 && classification_threshold <= 100.0))
    throw std::invalid_argument("classification_threshold must lie in [0, 100]");
  if (!(ridge_initial >= 0.0)) throw std::invalid_argument("ridge_initial must be nonnegative");
  if (!(ridge_growth > 1.0)) throw std::invalid_argument("ridge_growth must exceed 1");
  if (!(ridge_initial <= ridge_max)) throw std::invalid_argument("ridge_initial exceeds ridge_max");
  if (!(ridge_floor > 0.0)) throw std::invalid_argument("ridge_floor must be positive");
}

std::size_t TrainReport::peak_workspace_scalars() const {
  std::size_t peak = 0;
  for (const auto& r : records) peak = std::max(peak, r.workspace_scalars);
  return peak;
}

Mlp sdbp_epoch(const Mlp& mlp, const Dataset& data, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  Vector x = flatten(mlp);
  const Vector grad = gradient_sd(mlp, data);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= alpha * grad[i];
  return unflatten(mlp, x);
}

Vector gn_step(const Matrix& jac, std::span<const double> q, double ridge) {
  const Vector jtq = matvec_transposed(jac, q);
  Vector dx;
  try {
    dx = solve_spd(gram(jac), jtq, ridge);
  } catch (const NotPositiveDefinite& e) {
    throw SingularNormalEquations(std::string("normal equations: ") + e.what());
  }
  for (double& v : dx) v = -v;
  return dx;
}

Vector pre_adjust(std::span<const double> x, std::span<const double> grad) {
  if (x.size() != grad.size()) throw DimensionMismatch("pre_adjust length mismatch");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - 0.5 * grad[i];
  return out;
}

double correct_pct(const Mlp& mlp, const Dataset& data, const Classifier& classify) {
  if (!data.has_labels()) throw MissingLabels("dataset carries no class labels");
  data.validate();
  std::size_t hits = 0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    const ForwardTrace trace = forward(mlp, data.patterns[j]);
    if (classify(trace.output()) == data.labels[j]) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(data.size());
}

std::size_t workspace_scalars(WorkspaceStage stage, const ProblemSizes& s) {
  const std::size_t n = s.params;
  const std::size_t rows = s.patterns * s.outputs;
  switch (stage) {
    case WorkspaceStage::sdbp_iteration:
      return 2 * n;
    case WorkspaceStage::gn_iteration:
      return rows * n + n * n + rows + 3 * n;
  }
  return 0;
}

WorkspaceStage workspace_stage(Algorithm a) {
  return a == Algorithm::sdbp ? WorkspaceStage::sdbp_iteration : WorkspaceStage::gn_iteration;
}

std::size_t plateau_start(std::span<const double> values) {
  if (values.empty()) return 1;
  std::size_t i = values.size();
  while (i > 1 && values[i - 2] == values.back()) --i;
  return i;
}

namespace {

class Run {
 public:
  Run(const Mlp& mlp, const Dataset& data, const TrainConfig& config, const Classifier& classify,
      const Dataset* holdout)
      : data_(data), config_(config), classify_(classify), holdout_(holdout), current_(mlp) {
    data_.validate();
    if (holdout_) holdout_->validate();
    workspace_ = workspace_scalars(workspace_stage(config.algorithm),
                                   {data.size(), mlp.output_size(), mlp.param_count()});
    residual_count_ = static_cast<double>(data.size() * mlp.output_size());
  }

  TrainReport execute() {
    performance_ = performance_index(current_, data_);
    double ridge = config_.ridge_initial;

    // A network that already meets a criterion is reported without stepping.
    IterationRecord initial = record(1, ridge, false);
    if (auto reason = converged(initial)) {
      records_.push_back(std::move(initial));
      return finish(*reason);
    }

    for (std::size_t it = 1; it <= config_.max_iterations; ++it) {
      IterationRecord rec;
      if (config_.algorithm == Algorithm::sdbp) {
        current_ = sdbp_epoch(current_, data_, config_.alpha);
        performance_ = performance_index(current_, data_);
        rec = record(it, 0.0, true);
        if (!std::isfinite(performance_)) {
          records_.push_back(std::move(rec));
          return finish(StopReason::stalled);
        }
      } else {
        // improved_gn damps only within an iteration; lm carries its ridge over.
        if (config_.algorithm == Algorithm::improved_gn) ridge = config_.ridge_initial;
        std::vector<double> rejected;
        bool used_adjust = false;
        const bool ok = damped_step(ridge, rejected, used_adjust);
        rec = record(it, ridge, ok);
        rec.rejected_ridges = std::move(rejected);
        rec.pre_adjusted = ok && used_adjust;
        if (!ok) {
          records_.push_back(std::move(rec));
          return finish(StopReason::stalled);
        }
        if (config_.algorithm == Algorithm::lm) ridge /= config_.ridge_growth;
      }
      const auto reason = converged(rec);
      records_.push_back(std::move(rec));
      if (reason) return finish(*reason);
    }
    return finish(StopReason::max_iterations);
  }

 private:
  double next_ridge(double ridge) const {
    return ridge > 0.0 ? ridge * config_.ridge_growth : config_.ridge_floor;
  }

  // Steps 2-4 of one Gauss-Newton iteration. On success updates current_ and
  // performance_ and leaves `ridge` at the accepted value. On failure `ridge`
  // is the first value beyond ridge_max.
  //
  // With the pre-adjustment enabled, each ridge yields two candidates from
  // the same Jacobian: x + dx - J^T q and x + dx. The one with the smaller
  // performance index goes to the acceptance test. The adjusted candidate
  // alone ignores the ridge, so a rejection could never be cured by damping.
  bool damped_step(double& ridge, std::vector<double>& rejected, bool& used_adjust) {
    const Vector x = flatten(current_);
    const Vector q = residuals(current_, data_);
    const Matrix jac = jacobian(current_, data_);
    const bool adjust = config_.algorithm == Algorithm::improved_gn && config_.pre_adjust_enabled;
    const Vector grad = adjust ? gradient_gn(jac, q) : Vector{};

    for (;;) {
      try {
        const Vector dx = gn_step(jac, q, ridge);
        Vector plain(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) plain[i] = x[i] + dx[i];

        Mlp best = unflatten(current_, plain);
        double m_best = performance_index(best, data_);
        used_adjust = false;
        if (adjust) {
          Mlp adjusted = unflatten(current_, pre_adjust(plain, grad));
          const double m_adj = performance_index(adjusted, data_);
          if (std::isfinite(m_adj) && !(m_best <= m_adj)) {
            best = std::move(adjusted);
            m_best = m_adj;
            used_adjust = true;
          }
        }
        if (std::isfinite(m_best) && m_best < performance_) {
          current_ = std::move(best);
          performance_ = m_best;
          return true;
        }
      } catch (const SingularNormalEquations&) {
        // Handled like a rejected step.
      }
      rejected.push_back(ridge);
      ridge = next_ridge(ridge);
      if (ridge > config_.ridge_max) return false;
    }
  }

  IterationRecord record(std::size_t index, double ridge, bool accepted) const {
    IterationRecord rec;
    rec.index = index;
    rec.performance_index = performance_;
    rec.mse = performance_ / residual_count_;
    if (data_.has_labels()) rec.correct_pct = correct_pct(current_, data_, classify_);
    if (holdout_ && holdout_->has_labels())
      rec.holdout_correct_pct = correct_pct(current_, *holdout_, classify_);
    rec.ridge_used = ridge;
    rec.step_accepted = accepted;
    rec.workspace_scalars = workspace_;
    return rec;
  }

  std::optional<StopReason> converged(const IterationRecord& rec) const {
    if (rec.mse <= config_.mse_threshold) return StopReason::mse_reached;
    if (rec.correct_pct && *rec.correct_pct >= config_.classification_threshold)
      return StopReason::classification_reached;
    return std::nullopt;
  }

  TrainReport finish(StopReason reason) {
    TrainReport report{std::move(records_), reason, current_, 1, std::nullopt};
    std::vector<double> train_pct;
    std::vector<double> holdout_pct;
    for (const auto& r : report.records) {
      if (r.correct_pct) train_pct.push_back(*r.correct_pct);
      if (r.holdout_correct_pct) holdout_pct.push_back(*r.holdout_correct_pct);
    }
    if (!train_pct.empty()) report.iterations_to_stable = plateau_start(train_pct);
    if (!holdout_pct.empty()) report.holdout_iterations_to_stable = plateau_start(holdout_pct);
    return report;
  }

  const Dataset& data_;
  const TrainConfig& config_;
  const Classifier& classify_;
  const Dataset* holdout_;
  Mlp current_;
  double performance_ = 0.0;
  double residual_count_ = 1.0;
  std::size_t workspace_ = 0;
  std::vector<IterationRecord> records_;
};

}  // namespace

TrainReport train(const Mlp& mlp, const Dataset& data, const TrainConfig& config,
                  const Classifier& classify, const Dataset* holdout) {
  config.validate();
  return Run(mlp, data, config, classify, holdout).execute();
}

}  // namespace gnbp
