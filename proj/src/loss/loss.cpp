#include "qcpinn/loss/loss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "qcpinn/errors.hpp"

namespace qcpinn::loss {

using systems::SystemSpec;
using systems::Trajectory;

std::vector<std::size_t> ControlMask::indices(std::size_t points, std::mt19937_64& rng) const {
  std::vector<std::size_t> idx(points);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  switch (kind) {
    case Kind::All:
      return idx;
    case Kind::LastK:
      if (k > points) throw ConfigError("control mask selects more points than the grid has");
      return {idx.end() - static_cast<std::ptrdiff_t>(k), idx.end()};
    case Kind::RandomK: {
      if (k > points) throw ConfigError("control mask selects more points than the grid has");
      // partial Fisher-Yates with an explicit 53-bit draw for portability
      for (std::size_t i = 0; i < k; ++i) {
        const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const std::size_t j = i + static_cast<std::size_t>(r * static_cast<double>(points - i));
        std::swap(idx[i], idx[j]);
      }
      idx.resize(k);
      std::sort(idx.begin(), idx.end());
      return idx;
    }
  }
  return idx;
}

void LossWeights::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
  for (double w : {eta_c, chi, lambda_ic}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("loss weights must be finite and >= 0");
  }
}

std::string breakdown_csv_header() { return "epoch,model,control,const,reg,ic,total"; }

std::string breakdown_csv_row(std::size_t epoch, const LossBreakdown& b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", epoch, b.model, b.control, b.constraint,
                b.regularization, b.ic, b.total);
  return buf;
}

namespace {

std::span<const double> column(const Eigen::MatrixXd& m, std::size_t j) {
  return {m.data() + static_cast<std::ptrdiff_t>(j) * m.rows(), static_cast<std::size_t>(m.rows())};
}

void check_mask(std::span<const std::size_t> mask, std::size_t points) {
  for (std::size_t i : mask) {
    if (i >= points) throw ConfigError("mask index " + std::to_string(i) + " is outside the grid");
  }
}

}  // namespace

double loss_model(const Trajectory& traj, const SystemSpec& system) {
  std::vector<double> scratch(static_cast<std::size_t>(system.n()));
  double sum = 0.0;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    sum += model_residual<double>(system, column(traj.x, j), column(traj.u, j), column(traj.x_rate, j), scratch);
  }
  return sum;
}

double loss_control(const Trajectory& traj, const systems::TargetSpec& target, double eta,
                    std::span<const std::size_t> mask) {
  check_mask(mask, traj.size());
  double sum = 0.0;
  for (std::size_t j : mask) sum += control_residual<double>(target, column(traj.x, j));
  return eta * sum;
}

double loss_const(const Trajectory& traj, const SystemSpec& system, double eta_c, std::span<const std::size_t> mask) {
  check_mask(mask, traj.size());
  double sum = 0.0;
  for (std::size_t j : mask) sum += constraint_residual<double>(system, column(traj.x, j), column(traj.u, j));
  return eta_c * sum;
}

double loss_reg(const nn::NetworkParams& params, double chi) { return chi * nn::weight_square_sum(params); }

double loss_reg_fields(const Trajectory& traj, double chi) { return chi * traj.u.squaredNorm(); }

double loss_ic_soft(const Trajectory& traj, const Eigen::VectorXd& x0, const Eigen::VectorXd& u0,
                    const nn::ConstraintMode& mode) {
  if (mode.is_hard()) throw ConfigError("soft initial-condition loss requested in hard-constraint mode");
  if (traj.size() == 0) return 0.0;
  return mode.ic_weight * ((traj.x.col(0) - x0).squaredNorm() + (traj.u.col(0) - u0).squaredNorm());
}

LossBreakdown evaluate_breakdown(const Trajectory& traj, const SystemSpec& system, const nn::NetworkParams& params,
                                 const nn::ConstraintMode& mode, const LossWeights& weights,
                                 std::span<const std::size_t> mask) {
  LossBreakdown b;
  b.model = loss_model(traj, system);
  b.control = loss_control(traj, system.target, weights.eta, mask);
  b.constraint = loss_const(traj, system, weights.eta_c, mask);
  b.regularization = weights.regularizer == LossWeights::Regularizer::Weights ? loss_reg(params, weights.chi)
                                                                            : loss_reg_fields(traj, weights.chi);
  b.ic = mode.is_hard() ? 0.0 : loss_ic_soft(traj, system.x0, system.u0, mode);
  b.sum_total();
  return b;
}

Trajectory network_trajectory(const nn::NetworkParams& params, const SystemSpec& system,
                              const nn::ConstraintMode& mode, std::span<const double> times) {
  const auto n = static_cast<std::size_t>(system.n());
  const auto m = static_cast<std::size_t>(system.m());
  if (static_cast<std::size_t>(params.output_width()) != n + m) {
    throw ConfigError("network output width does not match the system");
  }
  const nn::BatchEvaluation batch(params, times);
  Trajectory tr;
  tr.t.assign(times.begin(), times.end());
  const auto cols = static_cast<Eigen::Index>(times.size());
  tr.x.resize(system.n(), cols);
  tr.u.resize(system.m(), cols);
  tr.x_rate.resize(system.n(), cols);
  const std::span<const double> x0(system.x0.data(), n);
  const std::span<const double> u0(system.u0.data(), m);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    nn::wrap_outputs<double>(mode, x0, u0, times[jj], column(batch.outputs(), jj), column(batch.rates(), jj),
                             {tr.x.col(j).data(), n}, {tr.u.col(j).data(), m}, {tr.x_rate.col(j).data(), n});
  }
  return tr;
}

nn::ScalarLoss physics_loss(const SystemSpec& system, const nn::ConstraintMode& mode, const LossWeights& weights,
                            std::vector<double> times, std::vector<std::size_t> mask, LossBreakdown* breakdown) {
  weights.validate();
  check_mask(mask, times.size());
  nn::ScalarLoss loss;
  const bool on_fields = weights.regularizer == LossWeights::Regularizer::Fields;
  loss.l2_weight = on_fields ? 0.0 : weights.chi;
  loss.times = std::move(times);
  loss.on_outputs = [&system, mode, weights, on_fields, mask = std::move(mask), breakdown](const nn::OutputVars& out) {
    using ad::Var;
    const auto n = static_cast<std::size_t>(system.n());
    const auto m = static_cast<std::size_t>(system.m());
    std::vector<Var> x(n), u(m), xr(n), scratch(n);
    std::vector<char> in_mask(out.points(), 0);
    for (std::size_t j : mask) in_mask[j] = 1;
    const std::span<const double> x0(system.x0.data(), n);
    const std::span<const double> u0(system.u0.data(), m);

    Var model(0.0), control(0.0), constraint(0.0), ic(0.0), fields(0.0);
    for (std::size_t j = 0; j < out.points(); ++j) {
      nn::wrap_outputs<Var>(mode, x0, u0, out.time(j), out.value(j), out.rate(j), x, u, xr);
      model = model + model_residual<Var>(system, x, u, xr, scratch);
      if (on_fields) {
        for (const Var& uk : u) fields = fields + ad::square(uk);
      }
      if (in_mask[j]) {
        control = control + control_residual<Var>(system.target, x);
        if (!system.constraints.empty()) constraint = constraint + constraint_residual<Var>(system, x, u);
      }
      if (j == 0 && !mode.is_hard()) {
        Var s(0.0);
        for (std::size_t i = 0; i < n; ++i) s = s + ad::square(x[i] - Var(x0[i]));
        for (std::size_t k = 0; k < m; ++k) s = s + ad::square(u[k] - Var(u0[k]));
        ic = Var(mode.ic_weight) * s;
      }
    }
    control = Var(weights.eta) * control;
    constraint = Var(weights.eta_c) * constraint;
    fields = Var(weights.chi) * fields;
    if (breakdown != nullptr) {
      breakdown->model = model.value();
      breakdown->control = control.value();
      breakdown->constraint = constraint.value();
      breakdown->ic = ic.value();
      if (on_fields) breakdown->regularization = fields.value();
    }
    return on_fields ? model + control + constraint + ic + fields : model + control + constraint + ic;
  };
  return loss;
}

}  // namespace qcpinn::loss
