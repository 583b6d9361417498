#include <gtest/gtest.h>

#include <cmath>

#include "gnbp/backprop.hpp"
#include "gnbp/errors.hpp"
#include "gnbp/rng.hpp"
#include "oracles.hpp"

namespace gnbp {
namespace {

using testing::max_rel_err;
using testing::random_instance;

Mlp single(double w, double b, Transfer f = Transfer::purelin) {
  return Mlp(1, {Layer{Matrix{{w}}, Vector{b}, f}});
}

// dM/dN^n for one pattern, by shifting layer n's biases.
Vector fd_layer_net_gradient(const Mlp& mlp, std::size_t layer, const Vector& p, const Vector& t,
                             double h = 1e-6) {
  Dataset one{{p}, {t}, {}};
  std::vector<Layer> layers = mlp.layers();
  Vector g(layers[layer].units());
  for (std::size_t u = 0; u < g.size(); ++u) {
    const double saved = layers[layer].biases[u];
    layers[layer].biases[u] = saved + h;
    const double up = performance_index(Mlp(mlp.input_size(), layers), one);
    layers[layer].biases[u] = saved - h;
    const double down = performance_index(Mlp(mlp.input_size(), layers), one);
    layers[layer].biases[u] = saved;
    g[u] = (up - down) / (2.0 * h);
  }
  return g;
}

TEST(OutputSensitivity, Examples) {
  // purelin, t - a = 0.5
  const Mlp lin = single(0.0, 0.5);
  const ForwardTrace t1 = forward(lin, Vector{1.0});
  EXPECT_EQ(output_sensitivity(t1, lin, Vector{1.0}), (Vector{-1.0}));

  // logsig at N = 0: a = 0.5, f' = 0.25; t - a = 1
  const Mlp sig = single(0.0, 0.0, Transfer::logsig);
  const ForwardTrace t2 = forward(sig, Vector{1.0});
  EXPECT_EQ(output_sensitivity(t2, sig, Vector{1.5}), (Vector{-0.5}));

  EXPECT_THROW(output_sensitivity(t2, sig, Vector{1.0, 2.0}), DimensionMismatch);
}

TEST(OutputSensitivity, MatchesFiniteDifferenceOfPerformanceIndex) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = random_instance(seed);
    const Vector& p = inst.data.patterns[0];
    const Vector& t = inst.data.targets[0];
    const Vector s = output_sensitivity(forward(inst.mlp, p), inst.mlp, t);
    EXPECT_LE(max_rel_err(s, testing::fd_output_net_gradient(inst.mlp, p, t), 1e-6), 1e-5)
        << "seed " << seed;
  }
}

TEST(Backpropagate, Examples) {
  EXPECT_EQ(backpropagate(Vector{0.0, 0.0}, Matrix{{1, 2}, {3, 4}}, Vector{0.3, -0.2},
                          Transfer::logsig),
            (Vector{0.0, 0.0}));
  EXPECT_EQ(backpropagate(Vector{3.0}, Matrix{{2.0}}, Vector{0.7}, Transfer::purelin),
            (Vector{6.0}));
  EXPECT_THROW(backpropagate(Vector{1.0}, Matrix{{1.0, 2.0}}, Vector{0.1}, Transfer::purelin),
               DimensionMismatch);
  EXPECT_THROW(backpropagate(Vector{1.0, 1.0}, Matrix{{1.0}}, Vector{0.1}, Transfer::purelin),
               DimensionMismatch);
}

TEST(Backpropagate, HiddenSensitivitiesMatchFiniteDifferences) {
  const std::vector<LayerSpec> specs{
      {3, Transfer::tansig}, {2, Transfer::logsig}, {2, Transfer::purelin}};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Mlp mlp = init_mlp(2, specs, seed, 1.0);
    Rng rng(seed + 100);
    const Vector p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Vector t{rng.uniform(0, 1), rng.uniform(0, 1)};
    const ForwardTrace trace = forward(mlp, p);
    const auto sens = sensitivities(mlp, trace, output_sensitivity(trace, mlp, t));
    for (std::size_t n = 0; n < specs.size(); ++n)
      EXPECT_LE(max_rel_err(sens[n], fd_layer_net_gradient(mlp, n, p, t), 1e-6), 1e-5)
          << "seed " << seed << " layer " << n;
  }
}

TEST(GradientSd, Examples) {
  // Perfect fit: zero gradient.
  const Mlp lin = single(2.0, 1.0);
  Dataset fit{{Vector{1.0}, Vector{3.0}}, {Vector{3.0}, Vector{7.0}}, {}};
  EXPECT_EQ(gradient_sd(lin, fit), (Vector{0.0, 0.0}));

  // p = 2, w = b = 0, t = 1: dM/dw = -2 (t - a) p, dM/db = -2 (t - a).
  Dataset one{{Vector{2.0}}, {Vector{1.0}}, {}};
  EXPECT_EQ(gradient_sd(single(0.0, 0.0), one), (Vector{-4.0, -2.0}));
}

TEST(GradientSd, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto inst = random_instance(seed);
    const Vector g = gradient_sd(inst.mlp, inst.data);
    const Vector fd = fd_gradient(inst.mlp, inst.data);
    EXPECT_LE(max_rel_err(g, fd, 1e-6), 1e-5) << "seed " << seed;
  }
}

TEST(Jacobian, Examples) {
  // q = t - (w p + b) at p = 2: dq/dw = -2, dq/db = -1.
  Dataset one{{Vector{2.0}}, {Vector{0.0}}, {}};
  const Matrix j = jacobian(single(0.3, -0.1), one);
  EXPECT_EQ(j, (Matrix{{-2.0, -1.0}}));

  const std::vector<LayerSpec> specs{{1, Transfer::logsig}, {2, Transfer::logsig}};
  const Mlp mlp = init_mlp(2, specs, 3, 0.5);
  ASSERT_EQ(mlp.param_count(), 7u);
  Dataset two{{Vector{0.1, 0.2}, Vector{0.3, 0.4}}, {Vector{1, 0}, Vector{0, 1}}, {}};
  const Matrix jj = jacobian(mlp, two);
  EXPECT_EQ(jj.rows(), 4u);
  EXPECT_EQ(jj.cols(), 7u);
}

TEST(Jacobian, MatchesFiniteDifferencesOfResiduals) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto inst = random_instance(seed);
    const Matrix j = jacobian(inst.mlp, inst.data);
    const Matrix fd = testing::fd_jacobian(inst.mlp, inst.data);
    EXPECT_LE(max_rel_err(j.values(), fd.values(), 1e-6), 1e-5) << "seed " << seed;
  }
}

TEST(GradientGn, Examples) {
  EXPECT_EQ(gradient_gn(Matrix{{1, 2}, {3, 4}}, Vector{0, 0}), (Vector{0, 0}));
  EXPECT_EQ(gradient_gn(Matrix{{-2, -1}}, Vector{1}), (Vector{-4, -2}));
  EXPECT_THROW(gradient_gn(Matrix{{-2, -1}}, Vector{1, 2}), DimensionMismatch);
}

TEST(GradientGn, EqualsGradientSd) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto inst = random_instance(seed);
    const Vector via_j =
        gradient_gn(jacobian(inst.mlp, inst.data), residuals(inst.mlp, inst.data));
    EXPECT_LE(max_rel_err(via_j, gradient_sd(inst.mlp, inst.data), 1e-12), 1e-8)
        << "seed " << seed;
  }
}

TEST(Sensitivities, PerformanceSeedIsResidualWeightedSumOfRowSeeds) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = random_instance(seed);
    const Mlp& mlp = inst.mlp;
    const Transfer f = mlp.layers().back().transfer;
    for (std::size_t j = 0; j < inst.data.size(); ++j) {
      const ForwardTrace tr = forward(mlp, inst.data.patterns[j]);
      const Vector perf = output_sensitivity(tr, mlp, inst.data.targets[j]);
      Vector combined(perf.size(), 0.0);
      for (std::size_t k = 0; k < perf.size(); ++k) {
        const double q = inst.data.targets[j][k] - tr.output()[k];
        combined[k] += 2.0 * q * -derivative(f, tr.net_inputs.back()[k]);
      }
      for (std::size_t k = 0; k < perf.size(); ++k) EXPECT_NEAR(perf[k], combined[k], 1e-10);
    }
  }
}

TEST(GnHessian, ExampleAndStructure) {
  EXPECT_EQ(gn_hessian(Matrix{{1, 0}}), (Matrix{{2, 0}, {0, 0}}));

  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix j(1 + rng.below(8), 1 + rng.below(6));
    for (double& v : j.values()) v = rng.uniform(-2, 2);
    const Matrix h = gn_hessian(j);
    EXPECT_EQ(h, transpose(h));
    for (int s = 0; s < 10; ++s) {
      Vector x(h.cols());
      for (double& v : x) v = rng.uniform(-1, 1);
      EXPECT_GE(dot(x, matvec(h, x)), -1e-10 * dot(x, x));
    }
  }
}

TEST(FdGradient, Examples) {
  // Zero weights, bias equal to the target: constant exact output.
  Dataset d{{Vector{1.0}, Vector{-1.0}}, {Vector{0.3}, Vector{0.3}}, {}};
  const Vector z = fd_gradient(single(0.0, 0.3), d);
  EXPECT_NEAR(z[0], 0.0, 1e-10);
  EXPECT_NEAR(z[1], 0.0, 1e-10);

  Dataset one{{Vector{2.0}}, {Vector{1.0}}, {}};
  const Vector g = fd_gradient(single(0.0, 0.0), one);
  EXPECT_NEAR(g[0], -4.0, 1e-8);
  EXPECT_NEAR(g[1], -2.0, 1e-8);

  EXPECT_THROW(fd_gradient(single(0, 0), one, 1e-2), std::invalid_argument);
  EXPECT_THROW(fd_gradient(single(0, 0), one, 1e-9), std::invalid_argument);
}

}  // namespace
}  // namespace gnbp
