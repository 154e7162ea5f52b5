#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace qcpinn::nn {

/// Weights and biases of a fully connected network t -> R^{n+m} with sine
/// activations on every hidden layer and an affine output layer.
///
/// weights[l] maps layer l to layer l+1 and has shape
/// layer_sizes[l+1] x layer_sizes[l]; biases[l] has length layer_sizes[l+1].
struct NetworkParams {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::uint64_t seed = 0;

  std::size_t layer_count() const { return weights.size(); }
  int output_width() const { return layer_sizes.empty() ? 0 : layer_sizes.back(); }
  std::size_t parameter_count() const;

  bool operator==(const NetworkParams&) const = default;
};

/// Throws ConfigError unless sizes are positive, at least two long and start at 1.
void validate_layer_sizes(std::span<const int> layer_sizes);

/// Glorot-uniform weights on +-sqrt(6/(fan_in+fan_out)), zero biases.
/// Uses its own 53-bit mapping of mt19937_64 so values are reproducible
/// across standard libraries.
NetworkParams init_params(std::span<const int> layer_sizes, std::uint64_t seed);

NetworkParams zeros_like(const NetworkParams& params);

/// Flat view in layer order: W_0 (row-major), b_0, W_1, b_1, ...
std::vector<double> flatten(const NetworkParams& params);
void unflatten(std::span<const double> flat, NetworkParams& params);

/// Throws NumericError(epoch) when any entry is NaN or infinite.
void require_finite(const NetworkParams& params, std::size_t epoch);

Eigen::VectorXd forward(const NetworkParams& params, double t);

struct OutputWithRate {
  Eigen::VectorXd value;
  Eigen::VectorXd rate;  // d value / dt
};

/// Output and its exact time derivative by dual-number propagation.
OutputWithRate forward_with_time_derivative(const NetworkParams& params, double t);

/// Network evaluated on a whole time grid at once, keeping the hidden
/// activations and their time tangents so parameter gradients of any scalar
/// built from (outputs, rates) can be pulled back in one sweep.
class BatchEvaluation {
 public:
  BatchEvaluation(const NetworkParams& params, std::span<const double> times);

  /// width x M
  const Eigen::MatrixXd& outputs() const { return outputs_; }
  const Eigen::MatrixXd& rates() const { return rates_; }
  const std::vector<double>& times() const { return times_; }

  /// Gradient with respect to every weight and bias given dL/d outputs and
  /// dL/d rates (both width x M).
  NetworkParams backward(const Eigen::MatrixXd& output_adjoint,
                         const Eigen::MatrixXd& rate_adjoint) const;

 private:
  const NetworkParams* params_;
  std::vector<double> times_;
  // Per hidden layer: cos(z), tangent of z, sin(z) and tangent of sin(z).
  std::vector<Eigen::MatrixXd> cos_;
  std::vector<Eigen::MatrixXd> pre_rate_;
  std::vector<Eigen::MatrixXd> act_;
  std::vector<Eigen::MatrixXd> act_rate_;
  Eigen::MatrixXd outputs_;
  Eigen::MatrixXd rates_;
};

}  // namespace qcpinn::nn
