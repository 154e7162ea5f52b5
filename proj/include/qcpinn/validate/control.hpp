#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qcpinn/nn/hard_constraint.hpp"
#include "qcpinn/nn/network.hpp"

namespace qcpinn::validate {

/// A control u(t) in R^m that can be sampled on a batch of times. The rate
/// is exact when the source provides it and a central difference otherwise.
class ControlFunction {
 public:
  /// Returns an m x K matrix of samples for K times.
  using Sampler = std::function<Eigen::MatrixXd(std::span<const double>)>;

  ControlFunction(int dim, Sampler values, Sampler rates, std::string source);

  static ControlFunction network(const nn::NetworkParams& params, const nn::ConstraintMode& mode, int state_dim,
                                 const Eigen::VectorXd& u0);
  static ControlFunction constant(const Eigen::VectorXd& u);
  static ControlFunction zero(int dim);
  /// One scalar function per control channel.
  static ControlFunction from_functions(std::vector<std::function<double(double)>> channels, std::string source);

  int dim() const { return dim_; }
  const std::string& source() const { return source_; }
  bool has_exact_rate() const { return static_cast<bool>(rates_); }

  Eigen::VectorXd operator()(double t) const;
  Eigen::MatrixXd sample(std::span<const double> times) const;
  /// du/dt; central difference with step `h` when no exact rate exists.
  Eigen::MatrixXd sample_rate(std::span<const double> times, double h) const;

 private:
  int dim_;
  Sampler values_;
  Sampler rates_;
  std::string source_;
};

}  // namespace qcpinn::validate
