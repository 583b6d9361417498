#include "gnbp/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gnbp/errors.hpp"
#include "gnbp/rng.hpp"

namespace gnbp {

double apply(Transfer f, double n) {
  switch (f) {
    case Transfer::logsig:
      return 1.0 / (1.0 + std::exp(-n));
    case Transfer::tansig:
      return std::tanh(n);
    case Transfer::purelin:
      return n;
  }
  return n;
}

double derivative(Transfer f, double n) {
  switch (f) {
    case Transfer::logsig: {
      const double a = 1.0 / (1.0 + std::exp(-n));
      return a * (1.0 - a);
    }
    case Transfer::tansig: {
      const double a = std::tanh(n);
      return 1.0 - a * a;
    }
    case Transfer::purelin:
      return 1.0;
  }
  return 1.0;
}

std::string_view to_string(Transfer f) {
  switch (f) {
    case Transfer::logsig:
      return "logsig";
    case Transfer::tansig:
      return "tansig";
    case Transfer::purelin:
      return "purelin";
  }
  return "?";
}

Transfer transfer_from_string(std::string_view name) {
  if (name == "logsig") return Transfer::logsig;
  if (name == "tansig") return Transfer::tansig;
  if (name == "purelin") return Transfer::purelin;
  throw std::invalid_argument("unknown transfer function '" + std::string(name) + "'");
}

Mlp::Mlp(std::size_t input_size, std::vector<Layer> layers)
    : input_size_(input_size), layers_(std::move(layers)) {
  if (input_size_ == 0) throw DimensionMismatch("network input size must be positive");
  if (layers_.empty()) throw DimensionMismatch("network needs at least one layer");
  std::size_t fan_in = input_size_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    if (l.fan_in() != fan_in) {
      throw DimensionMismatch("layer " + std::to_string(i + 1) + " expects fan-in " +
                              std::to_string(fan_in) + ", has " + std::to_string(l.fan_in()));
    }
    if (l.biases.size() != l.units()) {
      throw DimensionMismatch("layer " + std::to_string(i + 1) + " bias length");
    }
    fan_in = l.units();
  }
}

std::size_t Mlp::param_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.units() * l.fan_in() + l.units();
  return n;
}

Mlp init_mlp(std::size_t input_size, std::span<const LayerSpec> specs, std::uint64_t seed,
             double half_range) {
  if (!(half_range > 0.0)) throw std::invalid_argument("init half_range must be positive");
  Rng rng(seed);
  std::vector<Layer> layers;
  layers.reserve(specs.size());
  std::size_t fan_in = input_size;
  for (const auto& spec : specs) {
    if (spec.units == 0) throw DimensionMismatch("layer with zero units");
    if (fan_in == 0) throw DimensionMismatch("network input size must be positive");
    Layer l{Matrix(spec.units, fan_in), Vector(spec.units), spec.transfer};
    for (double& w : l.weights.values()) w = rng.uniform(-half_range, half_range);
    for (double& b : l.biases) b = rng.uniform(-half_range, half_range);
    fan_in = spec.units;
    layers.push_back(std::move(l));
  }
  return Mlp(input_size, std::move(layers));
}

ForwardTrace forward(const Mlp& mlp, std::span<const double> pattern) {
  if (pattern.size() != mlp.input_size()) {
    throw DimensionMismatch("pattern length " + std::to_string(pattern.size()) +
                            ", network input " + std::to_string(mlp.input_size()));
  }
  ForwardTrace trace;
  trace.input.assign(pattern.begin(), pattern.end());
  trace.net_inputs.reserve(mlp.layers().size());
  trace.activations.reserve(mlp.layers().size());
  const Vector* a = &trace.input;
  for (const Layer& l : mlp.layers()) {
    Vector n = matvec(l.weights, *a);
    Vector out(n.size());
    for (std::size_t u = 0; u < n.size(); ++u) {
      n[u] += l.biases[u];
      out[u] = apply(l.transfer, n[u]);
    }
    trace.net_inputs.push_back(std::move(n));
    trace.activations.push_back(std::move(out));
    a = &trace.activations.back();
  }
  return trace;
}

void Dataset::validate() const {
  if (patterns.empty()) throw DimensionMismatch("dataset is empty");
  if (patterns.size() != targets.size()) {
    throw DimensionMismatch("dataset has " + std::to_string(patterns.size()) +
                            " patterns but " + std::to_string(targets.size()) + " targets");
  }
  if (!labels.empty() && labels.size() != patterns.size())
    throw DimensionMismatch("dataset label count differs from pattern count");
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    if (patterns[j].size() != patterns[0].size() || patterns[j].empty())
      throw DimensionMismatch("pattern " + std::to_string(j) + " has inconsistent length");
    if (targets[j].size() != targets[0].size() || targets[j].empty())
      throw DimensionMismatch("target " + std::to_string(j) + " has inconsistent length");
  }
}

namespace {

void check_conforms(const Mlp& mlp, const Dataset& data) {
  data.validate();
  if (data.input_size() != mlp.input_size())
    throw DimensionMismatch("dataset patterns do not match network input size");
  if (data.target_size() != mlp.output_size())
    throw DimensionMismatch("dataset targets do not match network output size");
}

}  // namespace

Vector residuals(const Mlp& mlp, const Dataset& data) {
  check_conforms(mlp, data);
  const std::size_t k = mlp.output_size();
  Vector q;
  q.reserve(data.size() * k);
  for (std::size_t j = 0; j < data.size(); ++j) {
    const ForwardTrace trace = forward(mlp, data.patterns[j]);
    for (std::size_t u = 0; u < k; ++u) q.push_back(data.targets[j][u] - trace.output()[u]);
  }
  return q;
}

double performance_index(const Mlp& mlp, const Dataset& data) {
  const Vector q = residuals(mlp, data);
  return dot(q, q);
}

double mse(const Mlp& mlp, const Dataset& data) {
  return performance_index(mlp, data) /
         static_cast<double>(data.size() * mlp.output_size());
}

Vector flatten(const Mlp& mlp) {
  Vector x;
  x.reserve(mlp.param_count());
  for (const Layer& l : mlp.layers()) {
    x.insert(x.end(), l.weights.values().begin(), l.weights.values().end());
    x.insert(x.end(), l.biases.begin(), l.biases.end());
  }
  return x;
}

Mlp unflatten(const Mlp& shape, std::span<const double> x) {
  if (x.size() != shape.param_count()) {
    throw DimensionMismatch("parameter vector length " + std::to_string(x.size()) +
                            ", network has " + std::to_string(shape.param_count()));
  }
  std::vector<Layer> layers = shape.layers();
  std::size_t at = 0;
  for (Layer& l : layers) {
    for (double& w : l.weights.values()) w = x[at++];
    for (double& b : l.biases) b = x[at++];
  }
  return Mlp(shape.input_size(), std::move(layers));
}

}  // namespace gnbp
