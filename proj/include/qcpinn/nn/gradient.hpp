#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qcpinn/ad/tape.hpp"
#include "qcpinn/nn/network.hpp"

namespace qcpinn::nn {

/// Network outputs and their time derivatives on a grid, as tape variables.
/// Column j holds the output vector at times[j].
class OutputVars {
 public:
  OutputVars(ad::Tape& tape, const BatchEvaluation& batch);

  std::size_t width() const { return width_; }
  std::size_t points() const { return points_; }
  double time(std::size_t j) const { return (*times_)[j]; }

  std::span<const ad::Var> value(std::size_t j) const { return {values_.data() + j * width_, width_}; }
  std::span<const ad::Var> rate(std::size_t j) const { return {rates_.data() + j * width_, width_}; }

  /// Adjoints of every leaf after Tape::backward, shaped width x M.
  void collect_adjoints(const ad::Tape& tape, Eigen::MatrixXd& value_adjoint, Eigen::MatrixXd& rate_adjoint) const;

 private:
  std::size_t width_;
  std::size_t points_;
  const std::vector<double>* times_;
  std::vector<ad::Var> values_;
  std::vector<ad::Var> rates_;
};

/// A scalar loss that depends on the parameters through the network outputs
/// (and their time derivatives) on `times`, plus an optional l2 penalty
/// weight * sum(w^2) over weights only.
struct ScalarLoss {
  std::vector<double> times;
  std::function<ad::Var(const OutputVars&)> on_outputs;
  double l2_weight = 0.0;
};

struct LossAndGradient {
  double value = 0.0;
  NetworkParams gradient;
};

/// Reverse-mode gradient of `loss` with respect to every weight and bias.
/// The dependence on output time derivatives is carried by the forward
/// tangent stream of BatchEvaluation. Throws NumericError(epoch) for a
/// non-finite loss. `tape` may be passed in to reuse its storage.
LossAndGradient loss_gradient(const NetworkParams& params, const ScalarLoss& loss, std::size_t epoch = 0,
                              ad::Tape* tape = nullptr);

/// Value only (no tape), for finite-difference checks and reporting.
double loss_value(const NetworkParams& params, const ScalarLoss& loss);

/// sum of squared weights (biases excluded).
double weight_square_sum(const NetworkParams& params);

}  // namespace qcpinn::nn
