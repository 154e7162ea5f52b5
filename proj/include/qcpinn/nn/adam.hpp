#pragma once

#include <cstdint>

#include "qcpinn/nn/network.hpp"

namespace qcpinn::nn {

struct AdamState {
  NetworkParams first_moment;
  NetworkParams second_moment;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamState&) const = default;
};

/// Fresh state with zero moments shaped like `params`.
AdamState make_adam_state(const NetworkParams& params, double beta1 = 0.9, double beta2 = 0.999,
                          double epsilon = 1e-8);

/// One bias-corrected Adam update in place. Throws NumericError on a NaN
/// gradient and ConfigError on a shape mismatch or non-positive rate.
void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state, double learning_rate);

}  // namespace qcpinn::nn
