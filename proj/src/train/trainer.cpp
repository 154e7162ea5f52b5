#include "qcpinn/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qcpinn/errors.hpp"
#include "qcpinn/io/checkpoint.hpp"

namespace qcpinn::train {

std::vector<double> Grid::uniform() const {
  std::vector<double> t(points);
  const double h = (t_end - t_start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) t[i] = t_start + h * static_cast<double>(i);
  t.back() = t_end;
  return t;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
  if (!(grid.t_end > grid.t_start) || !(grid.t_start >= 0.0)) throw ConfigError("grid needs t_end > t_start >= 0");
  if (grid.points < 2) throw ConfigError("grid needs at least two points");
  if (!(jitter_amplitude >= 0.0 && jitter_amplitude < 1.0)) throw ConfigError("jitter_amplitude must lie in [0, 1)");
  if (hidden_layers.empty()) throw ConfigError("at least one hidden layer is required");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  for (int h : hidden_layers) {
    if (h <= 0) throw ConfigError("hidden layer widths must be positive");
  }
  loss_weights.validate();
  if (!constraint_mode.is_hard() && !(constraint_mode.ic_weight >= 0.0)) throw ConfigError("lambda_ic must be >= 0");
}

std::vector<int> TrainConfig::layer_sizes(const systems::SystemSpec& system) const {
  std::vector<int> sizes{1};
  sizes.insert(sizes.end(), hidden_layers.begin(), hidden_layers.end());
  sizes.push_back(system.n() + system.m());
  return sizes;
}

std::vector<double> resample_grid(std::span<const double> base, double amplitude, std::mt19937_64& rng) {
  std::vector<double> t(base.begin(), base.end());
  if (t.size() < 3 || amplitude == 0.0) return t;
  const double lo = t.front();
  const double hi = t.back();
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double spacing = 0.5 * (base[i + 1] - base[i - 1]);
    const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    t[i] = std::clamp(base[i] + amplitude * spacing * (2.0 * r - 1.0), lo, hi);
  }
  std::sort(t.begin(), t.end());
  return t;
}

std::mt19937_64 epoch_rng(std::uint64_t seed, std::size_t epoch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(epoch >> 32)};
  return std::mt19937_64(seq);
}

std::string TrainHistory::to_csv(std::size_t first_epoch) const {
  std::string out = loss::breakdown_csv_header() + "\n";
  for (std::size_t i = 0; i < losses.size(); ++i) out += loss::breakdown_csv_row(first_epoch + i, losses[i]) + "\n";
  return out;
}

TrainState initial_state(const systems::SystemSpec& system, const TrainConfig& config) {
  config.validate();
  TrainState s;
  s.params = nn::init_params(config.layer_sizes(system), config.seed);
  s.adam = nn::make_adam_state(s.params, config.adam_beta1, config.adam_beta2, config.adam_epsilon);
  return s;
}

namespace {

void write_checkpoint(const std::filesystem::path& dir, const TrainState& state, const TrainHistory& history,
                      std::size_t first_epoch, const std::string& config_hash) {
  std::filesystem::create_directories(dir);
  io::save_checkpoint(dir / "checkpoint.json", state.params, &state.adam);
  nlohmann::json side;
  if (!config_hash.empty()) side["config_hash"] = config_hash;
  side["epoch"] = state.epoch;
  if (state.best) {
    io::save_checkpoint(dir / "best.json", state.best->params);
    side["best"] = {{"epoch", state.best->epoch}, {"loss", state.best->loss}};
  }
  nlohmann::json tail = nlohmann::json::array();
  const std::size_t keep = std::min<std::size_t>(history.size(), 10);
  for (std::size_t i = history.size() - keep; i < history.size(); ++i) {
    tail.push_back({{"epoch", first_epoch + i}, {"total", history.losses[i].total}, {"wall_seconds", history.wall_seconds[i]}});
  }
  side["history_tail"] = tail;
  io::write_atomic(dir / "sidecar.json", side.dump(2) + "\n");
}

}  // namespace

TrainResult train_from(const systems::SystemSpec& system, const TrainConfig& config, TrainState start,
                       const TrainOptions& options) {
  config.validate();
  if (start.params.layer_sizes != config.layer_sizes(system)) {
    throw ConfigError("network architecture does not match the system and config");
  }
  TrainResult result;
  result.state = std::move(start);
  const std::size_t first_epoch = result.state.epoch;
  const std::vector<double> base = config.grid.uniform();
  ad::Tape tape;
  loss::LossBreakdown last;

  for (std::size_t epoch = first_epoch; epoch < config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng = epoch_rng(config.seed, epoch);
    std::vector<double> times = resample_grid(base, config.jitter_amplitude, rng);
    std::vector<std::size_t> mask = config.loss_weights.mask.indices(times.size(), rng);
    const nn::ScalarLoss objective =
        loss::physics_loss(system, config.constraint_mode, config.loss_weights, std::move(times), std::move(mask), &last);

    const nn::LossAndGradient lg = nn::loss_gradient(result.state.params, objective, epoch, &tape);
    if (config.loss_weights.regularizer == loss::LossWeights::Regularizer::Weights) {
      last.regularization = config.loss_weights.chi * nn::weight_square_sum(result.state.params);
    }
    last.sum_total();
    if (config.keep_best && (!result.state.best || last.total < result.state.best->loss)) {
      result.state.best = Snapshot{result.state.params, last.total, epoch};
    }
    nn::adam_step(result.state.params, lg.gradient, result.state.adam, config.learning_rate);
    nn::require_finite(result.state.params, epoch);
    result.state.epoch = epoch + 1;

    result.history.losses.push_back(last);
    result.history.wall_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (options.on_epoch) options.on_epoch(epoch, last);
    if (options.checkpoint_dir && config.checkpoint_every > 0 && result.state.epoch % config.checkpoint_every == 0) {
      write_checkpoint(*options.checkpoint_dir, result.state, result.history, first_epoch, options.config_hash);
    }
  }
  return result;
}

TrainState load_train_state(const std::filesystem::path& dir) {
  io::Checkpoint cp = io::load_checkpoint(dir / "checkpoint.json");
  if (!cp.adam) throw ConfigError("checkpoint in " + dir.string() + " has no optimiser state");
  std::ifstream in(dir / "sidecar.json");
  if (!in) throw ConfigError("missing " + (dir / "sidecar.json").string());
  TrainState s;
  try {
    const nlohmann::json side = nlohmann::json::parse(in);
    s.epoch = side.at("epoch").get<std::size_t>();
    if (side.contains("best")) {
      Snapshot b;
      b.epoch = side["best"].at("epoch").get<std::size_t>();
      b.loss = side["best"].at("loss").get<double>();
      b.params = io::load_checkpoint(dir / "best.json").params;
      s.best = std::move(b);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad sidecar: ") + e.what());
  }
  s.params = std::move(cp.params);
  s.adam = std::move(*cp.adam);
  return s;
}

TrainResult train(const systems::SystemSpec& system, const TrainConfig& config, const TrainOptions& options) {
  return train_from(system, config, initial_state(system, config), options);
}

TrainResult retrain_with_detuning(const nn::NetworkParams& params, const systems::SystemSpec& system,
                                  const TrainConfig& config, const TrainOptions& options) {
  if (params.output_width() != system.n() + system.m()) {
    throw ConfigError("retraining cannot change the state or control dimension");
  }
  TrainConfig warm = config;
  warm.hidden_layers.assign(params.layer_sizes.begin() + 1, params.layer_sizes.end() - 1);
  TrainState start;
  start.params = params;
  start.adam = nn::make_adam_state(params, config.adam_beta1, config.adam_beta2, config.adam_epsilon);
  return train_from(system, warm, std::move(start), options);
}

}  // namespace qcpinn::train
