#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qcpinn/errors.hpp"
#include "qcpinn/nn/adam.hpp"
#include "qcpinn/nn/gradient.hpp"
#include "qcpinn/nn/hard_constraint.hpp"
#include "qcpinn/nn/network.hpp"

using namespace qcpinn;
using namespace qcpinn::nn;

namespace {

NetworkParams tiny(double w1, double w2) {
  NetworkParams p = init_params(std::vector<int>{1, 1, 1}, 0);
  p.weights[0](0, 0) = w1;
  p.weights[1](0, 0) = w2;
  p.biases[0](0) = 0.0;
  p.biases[1](0) = 0.0;
  return p;
}

// Second forward pass written with plain loops, no Eigen products.
std::vector<double> reference_forward(const NetworkParams& p, double t) {
  std::vector<double> h{t};
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    std::vector<double> z(static_cast<std::size_t>(p.weights[l].rows()));
    for (std::size_t r = 0; r < z.size(); ++r) {
      double s = p.biases[l](static_cast<Eigen::Index>(r));
      for (std::size_t c = 0; c < h.size(); ++c)
        s += p.weights[l](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * h[c];
      z[r] = (l + 1 < p.layer_count()) ? std::sin(s) : s;
    }
    h = std::move(z);
  }
  return h;
}

NetworkParams random_net(std::uint64_t seed) {
  NetworkParams p = init_params(std::vector<int>{1, 8, 8, 3}, seed);
  std::mt19937_64 rng(seed + 100);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& b : p.biases)
    for (double& v : b) v = u(rng);
  return p;
}

}  // namespace

TEST(InitParams, DeterministicForSeed) {
  const std::vector<int> sizes{1, 3, 2};
  EXPECT_EQ(init_params(sizes, 7), init_params(sizes, 7));
  EXPECT_FALSE(init_params(sizes, 7) == init_params(sizes, 8));
}

TEST(InitParams, TlsArchitectureShapes) {
  const std::vector<int> sizes{1, 200, 200, 200, 200, 5};
  const NetworkParams p = init_params(sizes, 3);
  ASSERT_EQ(p.layer_count(), 5u);
  EXPECT_EQ(p.weights[0].rows(), 200);
  EXPECT_EQ(p.weights[0].cols(), 1);
  EXPECT_EQ(p.weights[4].rows(), 5);
  EXPECT_EQ(p.weights[4].cols(), 200);
  const double bound = std::sqrt(6.0 / 400.0);
  for (const auto& w : p.weights) EXPECT_LE(w.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 201.0));
  EXPECT_LE(p.weights[1].cwiseAbs().maxCoeff(), bound);
  for (const auto& b : p.biases) EXPECT_EQ(b.squaredNorm(), 0.0);
}

TEST(InitParams, RejectsBadSizes) {
  EXPECT_THROW(init_params(std::vector<int>{2, 3}, 1), ConfigError);
  EXPECT_THROW(init_params(std::vector<int>{}, 1), ConfigError);
  EXPECT_THROW(init_params(std::vector<int>{1, 0, 2}, 1), ConfigError);
}

TEST(Forward, ZeroNetwork) {
  NetworkParams p = zeros_like(init_params(std::vector<int>{1, 4, 3}, 1));
  EXPECT_EQ(forward(p, 1.7).squaredNorm(), 0.0);
  EXPECT_EQ(forward_with_time_derivative(p, 1.7).rate.squaredNorm(), 0.0);
}

TEST(Forward, SingleNeuron) {
  EXPECT_NEAR(forward(tiny(1.0, 1.0), std::numbers::pi / 2)(0), 1.0, 1e-15);
  const auto r = forward_with_time_derivative(tiny(2.0, 3.0), 0.0);
  EXPECT_NEAR(r.rate(0), 6.0, 1e-15);
  const auto r2 = forward_with_time_derivative(tiny(2.0, 3.0), 0.4);
  EXPECT_NEAR(r2.rate(0), 6.0 * std::cos(0.8), 1e-14);
}

TEST(Forward, MatchesLoopImplementation) {
  const NetworkParams p = random_net(11);
  const auto ref = reference_forward(p, 0.3);
  const Eigen::VectorXd y = forward(p, 0.3);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y(static_cast<Eigen::Index>(i)), ref[i], 1e-14);
  EXPECT_THROW(forward(p, std::nan("")), DomainError);
}

TEST(Forward, TimeDerivativeMatchesCentralDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ut(0.0, 10.0);
  const NetworkParams p = random_net(2);
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const double t = ut(rng);
    const auto r = forward_with_time_derivative(p, t);
    const Eigen::VectorXd fd = (forward(p, t + h) - forward(p, t - h)) / (2 * h);
    EXPECT_TRUE(r.value.isApprox(forward(p, t), 1e-15));
    for (Eigen::Index i = 0; i < fd.size(); ++i) EXPECT_LT(std::abs(r.rate(i) - fd(i)) / (1 + std::abs(fd(i))), 1e-6);
  }
}

TEST(Batch, AgreesWithPointwise) {
  const NetworkParams p = random_net(9);
  const std::vector<double> ts{0.0, 0.3, 1.1, 2.5};
  const BatchEvaluation b(p, ts);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const auto r = forward_with_time_derivative(p, ts[j]);
    EXPECT_TRUE(b.outputs().col(static_cast<Eigen::Index>(j)).isApprox(r.value, 1e-13));
    EXPECT_TRUE(b.rates().col(static_cast<Eigen::Index>(j)).isApprox(r.rate, 1e-13));
  }
}

TEST(HardConstraint, ExactAtZero) {
  const NetworkParams p = random_net(4);
  Eigen::VectorXd x0(2), u0(1);
  x0 << 0.3, -1.2;
  u0 << 0.7;
  const auto s = wrap_hard_constraint(x0, u0, p, 0.0);
  EXPECT_EQ(s.x, x0);
  EXPECT_EQ(s.u, u0);
  EXPECT_TRUE(s.x_rate.isApprox(forward(p, 0.0).head(2), 1e-15));
  EXPECT_THROW(wrap_hard_constraint(x0, Eigen::VectorXd::Zero(3), p, 0.0), ConfigError);
}

TEST(HardConstraint, LargeTimeLimitAndRate) {
  const NetworkParams p = random_net(4);
  Eigen::VectorXd x0(2), u0(1);
  x0 << 0.3, -1.2;
  u0 << 0.7;
  const auto far = wrap_hard_constraint(x0, u0, p, 60.0);
  EXPECT_TRUE(far.x.isApprox(x0 + forward(p, 60.0).head(2), 1e-14));
  const double t = 1.3, h = 1e-5;
  const auto s = wrap_hard_constraint(x0, u0, p, t);
  const Eigen::VectorXd fd = (wrap_hard_constraint(x0, u0, p, t + h).x - wrap_hard_constraint(x0, u0, p, t - h).x) / (2 * h);
  for (Eigen::Index i = 0; i < 2; ++i) EXPECT_LT(std::abs(s.x_rate(i) - fd(i)) / (1 + std::abs(fd(i))), 1e-6);
}

TEST(LossGradient, ConstantLossHasZeroGradient) {
  const NetworkParams p = random_net(1);
  ScalarLoss loss{{0.1, 0.2}, [](const OutputVars&) { return ad::Var(3.0); }, 0.0};
  const auto g = loss_gradient(p, loss);
  EXPECT_EQ(g.value, 3.0);
  for (double v : flatten(g.gradient)) EXPECT_EQ(v, 0.0);
}

TEST(LossGradient, SingleNeuronHandChainRule) {
  NetworkParams p = tiny(0.8, -1.3);
  p.biases[0](0) = 0.2;
  p.biases[1](0) = 0.1;
  const double t = 0.5;
  ScalarLoss loss{{t}, [](const OutputVars& o) { return ad::square(o.value(0)[0]); }, 0.0};
  const auto g = loss_gradient(p, loss);
  const double z = 0.8 * t + 0.2, h = std::sin(z), y = -1.3 * h + 0.1;
  EXPECT_NEAR(g.value, y * y, 1e-15);
  EXPECT_NEAR(g.gradient.weights[1](0, 0), 2 * y * h, 1e-14);
  EXPECT_NEAR(g.gradient.biases[1](0), 2 * y, 1e-14);
  EXPECT_NEAR(g.gradient.weights[0](0, 0), 2 * y * -1.3 * std::cos(z) * t, 1e-14);
  EXPECT_NEAR(g.gradient.biases[0](0), 2 * y * -1.3 * std::cos(z), 1e-14);
}

TEST(LossGradient, RateDependentLossMatchesFiniteDifferences) {
  NetworkParams p = random_net(21);
  ScalarLoss loss;
  loss.times = {0.0, 0.4, 0.9, 1.7, 2.2};
  loss.l2_weight = 1e-2;
  loss.on_outputs = [](const OutputVars& o) {
    ad::Var s = 0.0;
    for (std::size_t j = 0; j < o.points(); ++j) {
      const auto x = o.value(j);
      const auto r = o.rate(j);
      s += ad::square(r[0] - x[1] * x[2] + ad::sin(x[0])) + ad::square(r[1] * r[2] - 0.3);
    }
    return s;
  };
  const auto g = loss_gradient(p, loss);
  std::vector<double> flat = flatten(p);
  const std::vector<double> grad = flatten(g.gradient);
  const double h = 1e-5;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    NetworkParams q = p;
    std::vector<double> f = flat;
    f[k] += h;
    unflatten(f, q);
    const double up = loss_value(q, loss);
    f[k] -= 2 * h;
    unflatten(f, q);
    const double down = loss_value(q, loss);
    const double fd = (up - down) / (2 * h);
    EXPECT_LT(std::abs(grad[k] - fd) / std::max(1.0, std::abs(fd)), 1e-5) << "parameter " << k;
  }
}

TEST(LossGradient, NonFiniteLossReportsEpoch) {
  const NetworkParams p = random_net(1);
  ScalarLoss loss{{0.5}, [](const OutputVars& o) { return o.value(0)[0] / ad::Var(0.0); }, 0.0};
  try {
    loss_gradient(p, loss, 17);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_EQ(e.epoch(), 17u);
  }
}

TEST(Adam, ZeroGradientLeavesParams) {
  NetworkParams p = random_net(3);
  const NetworkParams before = p;
  AdamState s = make_adam_state(p);
  adam_step(p, zeros_like(p), s, 1e-3);
  EXPECT_EQ(p, before);
  EXPECT_EQ(s.step_count, 1u);
}

TEST(Adam, FirstStepIsLearningRate) {
  NetworkParams p = zeros_like(init_params(std::vector<int>{1, 1}, 0));
  NetworkParams g = p;
  g.weights[0](0, 0) = 1.0;
  AdamState s = make_adam_state(p);
  adam_step(p, g, s, 1e-3);
  EXPECT_NEAR(p.weights[0](0, 0), -1e-3, 1e-10);
  const double first = p.weights[0](0, 0);
  adam_step(p, g, s, 1e-3);
  EXPECT_LT(p.weights[0](0, 0), first);
}

TEST(Adam, Errors) {
  NetworkParams p = random_net(3);
  AdamState s = make_adam_state(p);
  NetworkParams g = zeros_like(p);
  g.biases[0](0) = std::nan("");
  EXPECT_THROW(adam_step(p, g, s, 1e-3), NumericError);
  EXPECT_THROW(adam_step(p, zeros_like(p), s, 0.0), ConfigError);
}
