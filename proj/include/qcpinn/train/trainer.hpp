#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qcpinn/loss/loss.hpp"
#include "qcpinn/nn/adam.hpp"
#include "qcpinn/nn/hard_constraint.hpp"
#include "qcpinn/nn/network.hpp"
#include "qcpinn/systems/system.hpp"

namespace qcpinn::train {

struct Grid {
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t points = 200;

  std::vector<double> uniform() const;
  bool operator==(const Grid&) const = default;
};

struct TrainConfig {
  std::size_t epochs = 1000;
  double learning_rate = 1e-3;
  Grid grid;
  double jitter_amplitude = 0.5;  // fraction of the grid spacing
  std::uint64_t seed = 0;
  nn::ConstraintMode constraint_mode = nn::ConstraintMode::hard();
  loss::LossWeights loss_weights;
  std::size_t checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::vector<int> hidden_layers{64, 64};
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Also track the parameters with the lowest epoch loss seen so far.
  bool keep_best = false;

  /// Throws ConfigError for inconsistent values.
  void validate() const;
  std::vector<int> layer_sizes(const systems::SystemSpec& system) const;
  bool operator==(const TrainConfig&) const = default;
};

/// Perturbs the interior points of `base` by uniform offsets of at most
/// amplitude * spacing, keeps the two end points fixed and returns the
/// sorted result.
std::vector<double> resample_grid(std::span<const double> base, double amplitude, std::mt19937_64& rng);

/// Random stream used for epoch `epoch`, so training can resume mid-run.
std::mt19937_64 epoch_rng(std::uint64_t seed, std::size_t epoch);

struct TrainHistory {
  std::vector<loss::LossBreakdown> losses;
  std::vector<double> wall_seconds;

  std::size_t size() const { return losses.size(); }
  /// History CSV (header plus one row per epoch), offset by `first_epoch`.
  std::string to_csv(std::size_t first_epoch = 0) const;
};

/// Parameters at which an epoch's loss was evaluated, with that loss.
struct Snapshot {
  nn::NetworkParams params;
  double loss = 0.0;
  std::size_t epoch = 0;
};

struct TrainState {
  nn::NetworkParams params;
  nn::AdamState adam;
  std::size_t epoch = 0;  // epochs completed
  std::optional<Snapshot> best;  // keep_best only

  /// The lowest-loss snapshot when one is kept, else the current parameters.
  const nn::NetworkParams& result() const { return best ? best->params : params; }
};

struct TrainOptions {
  /// Directory for periodic checkpoints (checkpoint.json + sidecar.json).
  std::optional<std::filesystem::path> checkpoint_dir;
  /// Called after every epoch with the epoch index and its loss.
  std::function<void(std::size_t, const loss::LossBreakdown&)> on_epoch;
  /// Copied into the sidecar when non-empty.
  std::string config_hash;
};

struct TrainResult {
  TrainState state;
  TrainHistory history;
};

TrainState initial_state(const systems::SystemSpec& system, const TrainConfig& config);

/// Runs config.epochs - start.epoch further epochs from `start`. On a
/// non-finite loss throws NumericError; the last periodic checkpoint on
/// disk is left untouched.
TrainResult train_from(const systems::SystemSpec& system, const TrainConfig& config, TrainState start,
                       const TrainOptions& options = {});

TrainResult train(const systems::SystemSpec& system, const TrainConfig& config, const TrainOptions& options = {});

/// Reads checkpoint.json and sidecar.json written by a periodic checkpoint,
/// plus best.json when the sidecar records a best snapshot.
TrainState load_train_state(const std::filesystem::path& dir);

/// Warm start from existing parameters on a system that differs only in its
/// physical parameters. Fresh optimiser state, config.epochs epochs.
TrainResult retrain_with_detuning(const nn::NetworkParams& params, const systems::SystemSpec& system,
                                  const TrainConfig& config, const TrainOptions& options = {});

}  // namespace qcpinn::train
