#include "qcpinn/nn/network.hpp"

#include <cmath>
#include <random>
#include <string>

#include "qcpinn/ad/dual.hpp"
#include "qcpinn/errors.hpp"

namespace qcpinn::nn {

namespace {

double uniform_unit(std::mt19937_64& rng) {
  // 53 random bits -> [0, 1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void require_finite_time(double t) {
  if (!std::isfinite(t)) throw DomainError("network input time must be finite");
}

}  // namespace

std::size_t NetworkParams::parameter_count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    count += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  }
  return count;
}

void validate_layer_sizes(std::span<const int> layer_sizes) {
  if (layer_sizes.size() < 2) throw ConfigError("layer_sizes needs at least an input and an output layer");
  if (layer_sizes.front() != 1) {
    throw ConfigError("layer_sizes[0] must be 1 (time is the only input), got " +
                      std::to_string(layer_sizes.front()));
  }
  for (int s : layer_sizes) {
    if (s <= 0) throw ConfigError("layer sizes must be positive");
  }
}

NetworkParams init_params(std::span<const int> layer_sizes, std::uint64_t seed) {
  validate_layer_sizes(layer_sizes);
  NetworkParams p;
  p.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  p.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = limit * (2.0 * uniform_unit(rng) - 1.0);
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return p;
}

NetworkParams zeros_like(const NetworkParams& params) {
  NetworkParams z = params;
  for (auto& w : z.weights) w.setZero();
  for (auto& b : z.biases) b.setZero();
  return z;
}

std::vector<double> flatten(const NetworkParams& params) {
  std::vector<double> flat;
  flat.reserve(params.parameter_count());
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const auto& w = params.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    }
    const auto& b = params.biases[l];
    flat.insert(flat.end(), b.data(), b.data() + b.size());
  }
  return flat;
}

void unflatten(std::span<const double> flat, NetworkParams& params) {
  if (flat.size() != params.parameter_count()) throw ConfigError("flat parameter vector has the wrong length");
  std::size_t k = 0;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    auto& w = params.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[k++];
    }
    auto& b = params.biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = flat[k++];
  }
}

void require_finite(const NetworkParams& params, std::size_t epoch) {
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    if (!params.weights[l].allFinite() || !params.biases[l].allFinite()) {
      throw NumericError("non-finite network parameter in layer " + std::to_string(l), epoch);
    }
  }
}

Eigen::VectorXd forward(const NetworkParams& params, double t) {
  require_finite_time(t);
  Eigen::VectorXd h = Eigen::VectorXd::Constant(1, t);
  const std::size_t last = params.layer_count() - 1;
  for (std::size_t l = 0; l < last; ++l) {
    h = (params.weights[l] * h + params.biases[l]).array().sin().matrix();
  }
  return params.weights[last] * h + params.biases[last];
}

OutputWithRate forward_with_time_derivative(const NetworkParams& params, double t) {
  require_finite_time(t);
  using D = ad::Dual<double>;
  std::vector<D> h{D::variable(t)};
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const auto& w = params.weights[l];
    const auto& b = params.biases[l];
    const bool hidden = l + 1 < params.layer_count();
    std::vector<D> next(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      D z(b(r));
      for (Eigen::Index c = 0; c < w.cols(); ++c) z += D(w(r, c)) * h[static_cast<std::size_t>(c)];
      next[static_cast<std::size_t>(r)] = hidden ? ad::sin(z) : z;
    }
    h = std::move(next);
  }
  OutputWithRate out{Eigen::VectorXd(static_cast<Eigen::Index>(h.size())),
                     Eigen::VectorXd(static_cast<Eigen::Index>(h.size()))};
  for (std::size_t i = 0; i < h.size(); ++i) {
    out.value(static_cast<Eigen::Index>(i)) = h[i].value;
    out.rate(static_cast<Eigen::Index>(i)) = h[i].deriv;
  }
  return out;
}

BatchEvaluation::BatchEvaluation(const NetworkParams& params, std::span<const double> times)
    : params_(&params), times_(times.begin(), times.end()) {
  for (double t : times_) require_finite_time(t);
  const auto m = static_cast<Eigen::Index>(times_.size());
  Eigen::MatrixXd h = Eigen::Map<const Eigen::RowVectorXd>(times_.data(), m);
  Eigen::MatrixXd h_rate = Eigen::MatrixXd::Ones(1, m);

  const std::size_t last = params.layer_count() - 1;
  for (std::size_t l = 0; l < last; ++l) {
    Eigen::MatrixXd z = params.weights[l] * h;
    z.colwise() += params.biases[l];
    Eigen::MatrixXd z_rate = params.weights[l] * h_rate;
    Eigen::MatrixXd c = z.array().cos().matrix();
    h = z.array().sin().matrix();
    h_rate = (c.array() * z_rate.array()).matrix();
    cos_.push_back(std::move(c));
    pre_rate_.push_back(std::move(z_rate));
    act_.push_back(h);
    act_rate_.push_back(h_rate);
  }
  outputs_ = params.weights[last] * h;
  outputs_.colwise() += params.biases[last];
  rates_ = params.weights[last] * h_rate;
}

NetworkParams BatchEvaluation::backward(const Eigen::MatrixXd& output_adjoint,
                                        const Eigen::MatrixXd& rate_adjoint) const {
  const NetworkParams& p = *params_;
  NetworkParams grad = zeros_like(p);
  const auto m = static_cast<Eigen::Index>(times_.size());
  const Eigen::MatrixXd input = Eigen::Map<const Eigen::RowVectorXd>(times_.data(), m);
  const Eigen::MatrixXd input_rate = Eigen::MatrixXd::Ones(1, m);

  const std::size_t last = p.layer_count() - 1;
  auto layer_input = [&](std::size_t l) -> const Eigen::MatrixXd& { return l == 0 ? input : act_[l - 1]; };
  auto layer_input_rate = [&](std::size_t l) -> const Eigen::MatrixXd& {
    return l == 0 ? input_rate : act_rate_[l - 1];
  };

  grad.weights[last].noalias() = output_adjoint * layer_input(last).transpose();
  grad.weights[last].noalias() += rate_adjoint * layer_input_rate(last).transpose();
  grad.biases[last] = output_adjoint.rowwise().sum();
  if (last == 0) return grad;

  Eigen::MatrixXd h_bar = p.weights[last].transpose() * output_adjoint;
  Eigen::MatrixXd h_rate_bar = p.weights[last].transpose() * rate_adjoint;
  for (std::size_t l = last; l-- > 0;) {
    // h = sin z, h' = cos z * z'
    Eigen::MatrixXd z_bar =
        (h_bar.array() * cos_[l].array() - h_rate_bar.array() * act_[l].array() * pre_rate_[l].array()).matrix();
    Eigen::MatrixXd z_rate_bar = (h_rate_bar.array() * cos_[l].array()).matrix();
    grad.weights[l].noalias() = z_bar * layer_input(l).transpose();
    grad.weights[l].noalias() += z_rate_bar * layer_input_rate(l).transpose();
    grad.biases[l] = z_bar.rowwise().sum();
    if (l > 0) {
      h_bar.noalias() = p.weights[l].transpose() * z_bar;
      h_rate_bar.noalias() = p.weights[l].transpose() * z_rate_bar;
    }
  }
  return grad;
}

}  // namespace qcpinn::nn
