#include "gnbp/backprop.hpp"

#include <stdexcept>
#include <string>

#include "gnbp/errors.hpp"

namespace gnbp {

namespace {

// Adds the per-layer blocks s^n (a^{n-1})^T and s^n to `out` in flatten order.
void scatter_blocks(const Mlp& mlp, const ForwardTrace& trace, const SensitivityStack& sens,
                    std::span<double> out) {
  std::size_t at = 0;
  for (std::size_t n = 0; n < mlp.layers().size(); ++n) {
    const Vector& prev = n == 0 ? trace.input : trace.activations[n - 1];
    const Vector& s = sens[n];
    for (std::size_t u = 0; u < s.size(); ++u)
      for (std::size_t i = 0; i < prev.size(); ++i) out[at++] += s[u] * prev[i];
    for (std::size_t u = 0; u < s.size(); ++u) out[at++] += s[u];
  }
}

}  // namespace

Vector output_sensitivity(const ForwardTrace& trace, const Mlp& mlp,
                          std::span<const double> target) {
  const Vector& net = trace.net_inputs.back();
  const Vector& a = trace.output();
  if (target.size() != a.size()) {
    throw DimensionMismatch("target length " + std::to_string(target.size()) +
                            ", output layer " + std::to_string(a.size()));
  }
  const Transfer f = mlp.layers().back().transfer;
  Vector s(a.size());
  for (std::size_t u = 0; u < a.size(); ++u)
    s[u] = -2.0 * derivative(f, net[u]) * (target[u] - a[u]);
  return s;
}

Vector backpropagate(std::span<const double> sens_next, const Matrix& weights_next,
                     std::span<const double> net_input, Transfer transfer) {
  if (weights_next.cols() != net_input.size())
    throw DimensionMismatch("backpropagate: weight columns differ from layer width");
  Vector s = matvec_transposed(weights_next, sens_next);
  for (std::size_t u = 0; u < s.size(); ++u) s[u] *= derivative(transfer, net_input[u]);
  return s;
}

SensitivityStack sensitivities(const Mlp& mlp, const ForwardTrace& trace, Vector output_seed) {
  const auto& layers = mlp.layers();
  if (output_seed.size() != mlp.output_size())
    throw DimensionMismatch("sensitivity seed length differs from output layer");
  SensitivityStack sens(layers.size());
  sens.back() = std::move(output_seed);
  for (std::size_t n = layers.size() - 1; n-- > 0;) {
    sens[n] = backpropagate(sens[n + 1], layers[n + 1].weights, trace.net_inputs[n],
                            layers[n].transfer);
  }
  return sens;
}

Vector gradient_sd(const Mlp& mlp, const Dataset& data) {
  data.validate();
  if (data.target_size() != mlp.output_size())
    throw DimensionMismatch("dataset targets do not match network output size");
  Vector grad(mlp.param_count(), 0.0);
  for (std::size_t j = 0; j < data.size(); ++j) {
    const ForwardTrace trace = forward(mlp, data.patterns[j]);
    auto sens = sensitivities(mlp, trace, output_sensitivity(trace, mlp, data.targets[j]));
    scatter_blocks(mlp, trace, sens, grad);
  }
  return grad;
}

Matrix jacobian(const Mlp& mlp, const Dataset& data) {
  data.validate();
  if (data.target_size() != mlp.output_size())
    throw DimensionMismatch("dataset targets do not match network output size");
  const std::size_t k = mlp.output_size();
  const Transfer f = mlp.layers().back().transfer;
  Matrix jac(data.size() * k, mlp.param_count());
  for (std::size_t j = 0; j < data.size(); ++j) {
    const ForwardTrace trace = forward(mlp, data.patterns[j]);
    const Vector& net = trace.net_inputs.back();
    for (std::size_t out = 0; out < k; ++out) {
      // q = t - a, so dq_k/dN^L is -f'(N^L_k) on unit k and zero elsewhere.
      Vector seed(k, 0.0);
      seed[out] = -derivative(f, net[out]);
      auto sens = sensitivities(mlp, trace, std::move(seed));
      scatter_blocks(mlp, trace, sens, jac.row(j * k + out));
    }
  }
  return jac;
}

Vector gradient_gn(const Matrix& jac, std::span<const double> q) {
  Vector g = matvec_transposed(jac, q);
  for (double& v : g) v *= 2.0;
  return g;
}

Matrix gn_hessian(const Matrix& jac) {
  Matrix h = gram(jac);
  for (double& v : h.values()) v *= 2.0;
  return h;
}

Vector fd_gradient(const Mlp& mlp, const Dataset& data, double h) {
  if (!(h >= 1e-8 && h <= 1e-3)) throw std::invalid_argument("fd_gradient step outside [1e-8, 1e-3]");
  Vector x = flatten(mlp);
  Vector grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = performance_index(unflatten(mlp, x), data);
    x[i] = saved - h;
    const double down = performance_index(unflatten(mlp, x), data);
    x[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace gnbp
