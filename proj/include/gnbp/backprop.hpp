#pragma once

// Sensitivity recursion and the first-order quantities built from it: the
// batch gradient of the performance index, the residual Jacobian, and the
// Gauss-Newton products 2 J^T q and 2 J^T J.

#include <span>
#include <vector>

#include "gnbp/linalg.hpp"
#include "gnbp/network.hpp"

namespace gnbp {

/// Sensitivities of one quantity with respect to each layer's net input,
/// indexed like Mlp::layers().
using SensitivityStack = std::vector<Vector>;

/// Output-layer sensitivity of the squared error of one pattern:
/// -2 f'(N^L) (t - a^L), elementwise.
Vector output_sensitivity(const ForwardTrace& trace, const Mlp& mlp,
                          std::span<const double> target);

/// diag(f'(N^n)) W^{n+1 T} s^{n+1}
Vector backpropagate(std::span<const double> sens_next, const Matrix& weights_next,
                     std::span<const double> net_input, Transfer transfer);

/// Runs backpropagate from an output-layer seed down to layer 1.
SensitivityStack sensitivities(const Mlp& mlp, const ForwardTrace& trace, Vector output_seed);

/// Gradient of the performance index in flatten order, summed over all patterns.
Vector gradient_sd(const Mlp& mlp, const Dataset& data);

/// Row (j, k) holds d q_{j,k} / dx for pattern j, output k; columns follow
/// flatten order.
Matrix jacobian(const Mlp& mlp, const Dataset& data);

/// 2 J^T q
Vector gradient_gn(const Matrix& jac, std::span<const double> q);

/// 2 J^T J. Exactly symmetric.
Matrix gn_hessian(const Matrix& jac);

/// Central differences of the performance index, one per flattened parameter.
/// h must lie in [1e-8, 1e-3].
Vector fd_gradient(const Mlp& mlp, const Dataset& data, double h = 1e-6);

}  // namespace gnbp
