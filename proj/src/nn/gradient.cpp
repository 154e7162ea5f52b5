#include "qcpinn/nn/gradient.hpp"

#include <cmath>

#include "qcpinn/errors.hpp"

namespace qcpinn::nn {

OutputVars::OutputVars(ad::Tape& tape, const BatchEvaluation& batch)
    : width_(static_cast<std::size_t>(batch.outputs().rows())),
      points_(static_cast<std::size_t>(batch.outputs().cols())),
      times_(&batch.times()) {
  values_.reserve(width_ * points_);
  rates_.reserve(width_ * points_);
  const Eigen::MatrixXd& out = batch.outputs();
  const Eigen::MatrixXd& rate = batch.rates();
  for (std::size_t j = 0; j < points_; ++j) {
    for (std::size_t i = 0; i < width_; ++i) {
      values_.push_back(tape.variable(out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
  }
  for (std::size_t j = 0; j < points_; ++j) {
    for (std::size_t i = 0; i < width_; ++i) {
      rates_.push_back(tape.variable(rate(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
  }
}

void OutputVars::collect_adjoints(const ad::Tape& tape, Eigen::MatrixXd& value_adjoint,
                                  Eigen::MatrixXd& rate_adjoint) const {
  const auto w = static_cast<Eigen::Index>(width_);
  const auto m = static_cast<Eigen::Index>(points_);
  value_adjoint.resize(w, m);
  rate_adjoint.resize(w, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < w; ++i) {
      const auto k = static_cast<std::size_t>(j * w + i);
      value_adjoint(i, j) = tape.adjoint(values_[k]);
      rate_adjoint(i, j) = tape.adjoint(rates_[k]);
    }
  }
}

double weight_square_sum(const NetworkParams& params) {
  double s = 0.0;
  for (const auto& w : params.weights) s += w.squaredNorm();
  return s;
}

LossAndGradient loss_gradient(const NetworkParams& params, const ScalarLoss& loss, std::size_t epoch,
                              ad::Tape* tape) {
  ad::Tape local;
  ad::Tape& t = tape != nullptr ? *tape : local;
  t.clear();

  const BatchEvaluation batch(params, loss.times);
  const OutputVars vars(t, batch);
  const ad::Var head = loss.on_outputs(vars);
  const double penalty = loss.l2_weight * weight_square_sum(params);

  LossAndGradient result;
  result.value = head.value() + penalty;
  if (!std::isfinite(result.value)) throw NumericError("non-finite loss", epoch);

  t.backward(head);
  Eigen::MatrixXd value_adjoint;
  Eigen::MatrixXd rate_adjoint;
  vars.collect_adjoints(t, value_adjoint, rate_adjoint);
  result.gradient = batch.backward(value_adjoint, rate_adjoint);
  if (loss.l2_weight != 0.0) {
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
      result.gradient.weights[l] += (2.0 * loss.l2_weight) * params.weights[l];
    }
  }
  return result;
}

double loss_value(const NetworkParams& params, const ScalarLoss& loss) {
  ad::Tape t;
  const BatchEvaluation batch(params, loss.times);
  const OutputVars vars(t, batch);
  return loss.on_outputs(vars).value() + loss.l2_weight * weight_square_sum(params);
}

}  // namespace qcpinn::nn
