#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>

#include "qcpinn/nn/network.hpp"

namespace qcpinn::nn {

/// How initial conditions enter: exactly through the output parametrisation
/// (Hard) or as a weighted penalty in the loss (Soft).
struct ConstraintMode {
  enum class Kind { Hard, Soft };
  Kind kind = Kind::Hard;
  double ic_weight = 0.0;

  static ConstraintMode hard() { return {Kind::Hard, 0.0}; }
  static ConstraintMode soft(double weight);

  bool is_hard() const { return kind == Kind::Hard; }
  bool operator==(const ConstraintMode&) const = default;
};

/// f(t) = 1 - e^{-t}; f(0) == 0 exactly.
inline double anchor(double t) { return -std::expm1(-t); }
inline double anchor_rate(double t) { return std::exp(-t); }

/// Maps raw network outputs (N_x, N_u) and their time derivatives at t to the
/// state, control and state derivative. Works for any scalar type so the
/// trainer can record it on a tape.
template <typename T>
void wrap_outputs(const ConstraintMode& mode, std::span<const double> x0, std::span<const double> u0, double t,
                  std::span<const T> out, std::span<const T> out_rate, std::span<T> x, std::span<T> u,
                  std::span<T> x_rate) {
  const std::size_t n = x0.size();
  const std::size_t m = u0.size();
  if (mode.is_hard()) {
    const double f = anchor(t);
    const double df = anchor_rate(t);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = T(x0[i]) + T(f) * out[i];
      x_rate[i] = T(df) * out[i] + T(f) * out_rate[i];
    }
    for (std::size_t j = 0; j < m; ++j) u[j] = T(u0[j]) + T(f) * out[n + j];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = out[i];
      x_rate[i] = out_rate[i];
    }
    for (std::size_t j = 0; j < m; ++j) u[j] = out[n + j];
  }
}

struct WrappedState {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  Eigen::VectorXd x_rate;
};

/// x(t) = x0 + f(t) N_x(t), u(t) = u0 + f(t) N_u(t), x'(t) = f'(t) N_x + f(t) N_x'.
WrappedState wrap_hard_constraint(const Eigen::VectorXd& x0, const Eigen::VectorXd& u0, const NetworkParams& params,
                                  double t);

/// Same mapping for either constraint mode.
WrappedState evaluate_state(const ConstraintMode& mode, const Eigen::VectorXd& x0, const Eigen::VectorXd& u0,
                            const NetworkParams& params, double t);

/// Control part only, plus its exact time derivative.
struct ControlWithRate {
  Eigen::VectorXd u;
  Eigen::VectorXd u_rate;
};
ControlWithRate evaluate_control(const ConstraintMode& mode, std::size_t state_dim, const Eigen::VectorXd& u0,
                                 const NetworkParams& params, double t);

}  // namespace qcpinn::nn
