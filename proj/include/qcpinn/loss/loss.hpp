#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qcpinn/ad/tape.hpp"
#include "qcpinn/nn/gradient.hpp"
#include "qcpinn/nn/hard_constraint.hpp"
#include "qcpinn/systems/system.hpp"
#include "qcpinn/systems/trajectory.hpp"

namespace qcpinn::loss {

/// Which grid points carry the control and constraint terms.
struct ControlMask {
  enum class Kind { All, LastK, RandomK };
  Kind kind = Kind::All;
  std::size_t k = 0;

  static ControlMask all() { return {}; }
  static ControlMask last(std::size_t k) { return {Kind::LastK, k}; }
  static ControlMask random(std::size_t k) { return {Kind::RandomK, k}; }

  /// Sorted grid indices for a grid of `points`. RandomK draws from `rng`.
  std::vector<std::size_t> indices(std::size_t points, std::mt19937_64& rng) const;
  bool operator==(const ControlMask&) const = default;
};

struct LossWeights {
  /// What chi multiplies: squared network weights, or squared control
  /// values summed over the grid.
  enum class Regularizer { Weights, Fields };

  double eta = 1.0;
  double eta_c = 0.0;
  double chi = 0.0;
  double lambda_ic = 0.0;
  ControlMask mask;
  Regularizer regularizer = Regularizer::Weights;

  /// Throws ConfigError for eta outside [0, 1] or negative / non-finite weights.
  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

struct LossBreakdown {
  double model = 0.0;
  double control = 0.0;
  double constraint = 0.0;
  double regularization = 0.0;
  double ic = 0.0;
  double total = 0.0;

  void sum_total() { total = model + control + constraint + regularization + ic; }
};

std::string breakdown_csv_header();
std::string breakdown_csv_row(std::size_t epoch, const LossBreakdown& b);

// Per-point building blocks, shared by the plain and the taped losses.

template <typename T>
T model_residual(const systems::SystemSpec& s, std::span<const T> x, std::span<const T> u, std::span<const T> x_rate,
                 std::span<T> scratch) {
  s.rhs<T>(x, u, scratch);
  T sum(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T r = x_rate[i] - scratch[i];
    sum = sum + r * r;
  }
  return sum;
}

template <typename T>
T control_residual(const systems::TargetSpec& target, std::span<const T> x) {
  using Kind = systems::TargetSpec::Kind;
  switch (target.kind) {
    case Kind::StateVector: {
      T sum(0.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const T r = x[i] - T(target.state(static_cast<Eigen::Index>(i)));
        sum = sum + r * r;
      }
      return sum;
    }
    case Kind::PopulationIndex: {
      const T r = x[static_cast<std::size_t>(target.index)] - T(1.0);
      return r * r;
    }
    case Kind::ExpectationMin:
      return target.expectation_value<T>(x);
  }
  return T(0.0);
}

template <typename T>
T constraint_residual(const systems::SystemSpec& s, std::span<const T> x, std::span<const T> u) {
  T sum(0.0);
  for (const auto& c : s.constraints) {
    const T r = c.residual<T>(x, u);
    sum = sum + r * r;
  }
  return sum;
}

/// sum_i ||x'(t_i) - f(x(t_i), u(t_i))||^2
double loss_model(const systems::Trajectory& traj, const systems::SystemSpec& system);

/// eta * sum over `mask` of the target residual.
double loss_control(const systems::Trajectory& traj, const systems::TargetSpec& target, double eta,
                    std::span<const std::size_t> mask);

/// eta_c * sum over `mask` of the system's squared constraint terms.
double loss_const(const systems::Trajectory& traj, const systems::SystemSpec& system, double eta_c,
                  std::span<const std::size_t> mask);

/// chi * sum of squared weights (biases excluded).
double loss_reg(const nn::NetworkParams& params, double chi);

/// chi * sum_i ||u(t_i)||^2 over every grid point.
double loss_reg_fields(const systems::Trajectory& traj, double chi);

/// lambda_ic (||x(t_1) - x0||^2 + ||u(t_1) - u0||^2). ConfigError in hard mode.
double loss_ic_soft(const systems::Trajectory& traj, const Eigen::VectorXd& x0, const Eigen::VectorXd& u0,
                    const nn::ConstraintMode& mode);

/// Every component evaluated on a plain trajectory.
LossBreakdown evaluate_breakdown(const systems::Trajectory& traj, const systems::SystemSpec& system,
                                 const nn::NetworkParams& params, const nn::ConstraintMode& mode,
                                 const LossWeights& weights, std::span<const std::size_t> mask);

/// Wrapped trajectory of the network on `times`.
systems::Trajectory network_trajectory(const nn::NetworkParams& params, const systems::SystemSpec& system,
                                       const nn::ConstraintMode& mode, std::span<const double> times);

/// The full physics-informed loss as a differentiable scalar of the network
/// outputs. Components of the most recent evaluation are written to
/// `breakdown` when it is non-null (it must outlive the returned object).
nn::ScalarLoss physics_loss(const systems::SystemSpec& system, const nn::ConstraintMode& mode,
                            const LossWeights& weights, std::vector<double> times, std::vector<std::size_t> mask,
                            LossBreakdown* breakdown = nullptr);

}  // namespace qcpinn::loss
