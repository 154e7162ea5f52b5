#include "qcpinn/nn/adam.hpp"

#include <cmath>

#include "qcpinn/errors.hpp"

namespace qcpinn::nn {

AdamState make_adam_state(const NetworkParams& params, double beta1, double beta2, double epsilon) {
  AdamState s;
  s.first_moment = zeros_like(params);
  s.second_moment = zeros_like(params);
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  return s;
}

namespace {

template <typename Block>
void update(Block& p, const Block& g, Block& m, Block& v, double b1, double b2, double step, double c2, double eps) {
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
  // p -= lr * m_hat / (sqrt(v_hat) + eps), with m_hat = m / c1 folded into `step`
  p.array() -= step * m.array() / ((v.array() / c2).sqrt() + eps);
}

}  // namespace

void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state, double learning_rate) {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (grads.layer_count() != params.layer_count() || state.first_moment.layer_count() != params.layer_count()) {
    throw ConfigError("Adam: gradient / state shapes do not match parameters");
  }
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    if (grads.weights[l].rows() != params.weights[l].rows() || grads.weights[l].cols() != params.weights[l].cols() ||
        grads.biases[l].size() != params.biases[l].size()) {
      throw ConfigError("Adam: gradient shape mismatch in layer " + std::to_string(l));
    }
    if (grads.weights[l].hasNaN() || grads.biases[l].hasNaN()) {
      throw NumericError("NaN gradient in layer " + std::to_string(l), static_cast<std::size_t>(state.step_count));
    }
  }

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const double step = learning_rate / c1;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    update(params.weights[l], grads.weights[l], state.first_moment.weights[l], state.second_moment.weights[l],
           state.beta1, state.beta2, step, c2, state.epsilon);
    update(params.biases[l], grads.biases[l], state.first_moment.biases[l], state.second_moment.biases[l],
           state.beta1, state.beta2, step, c2, state.epsilon);
  }
}

}  // namespace qcpinn::nn
