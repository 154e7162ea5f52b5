#include "qcpinn/nn/hard_constraint.hpp"

#include "qcpinn/errors.hpp"

namespace qcpinn::nn {

ConstraintMode ConstraintMode::soft(double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw ConfigError("soft-constraint weight must be finite and >= 0");
  return {Kind::Soft, weight};
}

namespace {

void check_widths(std::size_t n, std::size_t m, const NetworkParams& params) {
  if (static_cast<std::size_t>(params.output_width()) != n + m) {
    throw ConfigError("network output width " + std::to_string(params.output_width()) +
                      " does not match state + control dimension " + std::to_string(n + m));
  }
}

}  // namespace

WrappedState evaluate_state(const ConstraintMode& mode, const Eigen::VectorXd& x0, const Eigen::VectorXd& u0,
                            const NetworkParams& params, double t) {
  const auto n = static_cast<std::size_t>(x0.size());
  const auto m = static_cast<std::size_t>(u0.size());
  check_widths(n, m, params);
  const OutputWithRate out = forward_with_time_derivative(params, t);
  WrappedState s{Eigen::VectorXd(x0.size()), Eigen::VectorXd(u0.size()), Eigen::VectorXd(x0.size())};
  wrap_outputs<double>(mode, {x0.data(), n}, {u0.data(), m}, t, {out.value.data(), n + m},
                       {out.rate.data(), n + m}, {s.x.data(), n}, {s.u.data(), m}, {s.x_rate.data(), n});
  return s;
}

WrappedState wrap_hard_constraint(const Eigen::VectorXd& x0, const Eigen::VectorXd& u0, const NetworkParams& params,
                                  double t) {
  return evaluate_state(ConstraintMode::hard(), x0, u0, params, t);
}

ControlWithRate evaluate_control(const ConstraintMode& mode, std::size_t state_dim, const Eigen::VectorXd& u0,
                                 const NetworkParams& params, double t) {
  const auto m = static_cast<std::size_t>(u0.size());
  check_widths(state_dim, m, params);
  const OutputWithRate out = forward_with_time_derivative(params, t);
  const auto n = static_cast<Eigen::Index>(state_dim);
  const auto mm = static_cast<Eigen::Index>(m);
  ControlWithRate c;
  if (mode.is_hard()) {
    const double f = anchor(t);
    const double df = anchor_rate(t);
    c.u = u0 + f * out.value.segment(n, mm);
    c.u_rate = df * out.value.segment(n, mm) + f * out.rate.segment(n, mm);
  } else {
    c.u = out.value.segment(n, mm);
    c.u_rate = out.rate.segment(n, mm);
  }
  return c;
}

}  // namespace qcpinn::nn
