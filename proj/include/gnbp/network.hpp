#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gnbp/linalg.hpp"

namespace gnbp {

enum class Transfer { logsig, tansig, purelin };

double apply(Transfer f, double n);
/// d f(n) / dn
double derivative(Transfer f, double n);

std::string_view to_string(Transfer f);
/// Throws std::invalid_argument for an unknown name.
Transfer transfer_from_string(std::string_view name);

struct LayerSpec {
  std::size_t units;
  Transfer transfer;
};

struct Layer {
  Matrix weights;  // units x fan_in
  Vector biases;   // units
  Transfer transfer;

  std::size_t units() const noexcept { return weights.rows(); }
  std::size_t fan_in() const noexcept { return weights.cols(); }

  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Multilayer perceptron. Layer 1 consumes the input pattern, the last layer
/// produces the network output.
class Mlp {
 public:
  /// Throws DimensionMismatch unless the layers chain from input_size.
  Mlp(std::size_t input_size, std::vector<Layer> layers);

  std::size_t input_size() const noexcept { return input_size_; }
  std::size_t output_size() const noexcept { return layers_.back().units(); }
  std::size_t param_count() const noexcept;

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::size_t input_size_;
  std::vector<Layer> layers_;
};

/// Every weight and bias uniform in [-half_range, half_range], drawn in
/// flatten order from a generator seeded with `seed`.
Mlp init_mlp(std::size_t input_size, std::span<const LayerSpec> specs, std::uint64_t seed,
             double half_range = 0.5);

struct ForwardTrace {
  Vector input;                     // a^0
  std::vector<Vector> net_inputs;   // N^n, one per layer
  std::vector<Vector> activations;  // a^n = f(N^n)

  const Vector& output() const { return activations.back(); }
};

ForwardTrace forward(const Mlp& mlp, std::span<const double> pattern);

struct Dataset {
  std::vector<Vector> patterns;
  std::vector<Vector> targets;
  std::vector<std::size_t> labels;  // empty when the data is unlabelled

  std::size_t size() const noexcept { return patterns.size(); }
  std::size_t input_size() const { return patterns.at(0).size(); }
  std::size_t target_size() const { return targets.at(0).size(); }
  bool has_labels() const noexcept { return !labels.empty(); }

  /// Throws DimensionMismatch on an empty, ragged or unbalanced dataset.
  void validate() const;
};

/// t_j - a_j for every pattern j, concatenated pattern-major then by output unit.
Vector residuals(const Mlp& mlp, const Dataset& data);

/// Sum over patterns of (t_j - a_j)^T (t_j - a_j).
double performance_index(const Mlp& mlp, const Dataset& data);

/// Performance index divided by the residual count (patterns x outputs).
double mse(const Mlp& mlp, const Dataset& data);

/// Layer 1 weights row-major, layer 1 biases, layer 2 weights, ...
Vector flatten(const Mlp& mlp);
Mlp unflatten(const Mlp& shape, std::span<const double> x);

}  // namespace gnbp
