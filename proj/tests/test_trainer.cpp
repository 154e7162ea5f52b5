#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcpinn/errors.hpp"
#include "qcpinn/systems/system.hpp"
#include "qcpinn/train/trainer.hpp"

using namespace qcpinn;

namespace {

train::TrainConfig small_config() {
  train::TrainConfig c;
  c.epochs = 40;
  c.learning_rate = 5e-3;
  c.grid = {0.0, 4.0, 24};
  c.seed = 9;
  c.hidden_layers = {12, 12};
  c.loss_weights.eta = 0.2;
  c.loss_weights.eta_c = 0.1;
  c.loss_weights.chi = 1e-3;
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(ResampleGrid, ZeroJitterIsIdentity) {
  const train::Grid g{0.0, 3.0, 31};
  const auto base = g.uniform();
  std::mt19937_64 rng(1);
  EXPECT_EQ(train::resample_grid(base, 0.0, rng), base);
}

TEST(ResampleGrid, BoundedIncreasingDeterministic) {
  const train::Grid g{0.0, 10.0, 100};
  const auto base = g.uniform();
  const double dt = base[1] - base[0];
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 a(seed);
    std::mt19937_64 b(seed);
    const auto p = train::resample_grid(base, 0.3, a);
    EXPECT_EQ(p, train::resample_grid(base, 0.3, b));
    EXPECT_EQ(p.front(), 0.0);
    EXPECT_EQ(p.back(), 10.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_LE(std::abs(p[i] - base[i]), 0.3 * dt + 1e-15);
      if (i > 0) EXPECT_LT(p[i - 1], p[i]);
    }
  }
}

TEST(Train, ZeroEpochsKeepsInit) {
  const auto sys = systems::make_lambda3(systems::LambdaParams{});
  auto c = small_config();
  c.epochs = 0;
  const auto r = train::train(sys, c);
  EXPECT_EQ(r.history.size(), 0u);
  EXPECT_EQ(r.state.params, nn::init_params(c.layer_sizes(sys), c.seed));

  const auto again = train::retrain_with_detuning(r.state.params, sys, c);
  EXPECT_EQ(again.state.params, r.state.params);
}

TEST(Train, DeterministicHistory) {
  const auto sys = systems::make_lambda3(systems::LambdaParams{});
  const auto c = small_config();
  const auto a = train::train(sys, c);
  const auto b = train::train(sys, c);
  EXPECT_EQ(a.history.to_csv(), b.history.to_csv());
  EXPECT_EQ(a.state.params, b.state.params);
  EXPECT_EQ(a.history.size(), c.epochs);
}

TEST(Train, LossTrendsDown) {
  const auto sys = systems::make_lambda3(systems::LambdaParams{});
  auto c = small_config();
  c.epochs = 300;
  const auto r = train::train(sys, c);
  const std::size_t k = c.epochs / 10;
  std::vector<double> first;
  std::vector<double> last;
  for (std::size_t i = 0; i < k; ++i) {
    first.push_back(r.history.losses[i].total);
    last.push_back(r.history.losses[c.epochs - 1 - i].total);
  }
  EXPECT_LT(median(last), median(first));
}

TEST(Train, CheckpointResumeMatchesUninterrupted) {
  const auto sys = systems::make_tls(systems::TlsParams{});
  auto c = small_config();
  c.grid = {0.0, 10.0, 24};
  c.checkpoint_every = 15;
  const auto dir = std::filesystem::temp_directory_path() / "qcpinn_resume_test";
  std::filesystem::remove_all(dir);

  const auto full = train::train(sys, c);
  auto partial = c;
  partial.epochs = 15;
  train::TrainOptions opts;
  opts.checkpoint_dir = dir;
  opts.config_hash = "abc";
  train::train(sys, partial, opts);
  const auto state = train::load_train_state(dir);
  EXPECT_EQ(state.epoch, 15u);
  const auto rest = train::train_from(sys, c, state);

  EXPECT_EQ(rest.state.params, full.state.params);
  ASSERT_EQ(rest.history.size(), 25u);
  for (std::size_t i = 0; i < 25; ++i) EXPECT_EQ(rest.history.losses[i].total, full.history.losses[15 + i].total);
  std::ifstream side(dir / "sidecar.json");
  std::stringstream ss;
  ss << side.rdbuf();
  EXPECT_NE(ss.str().find("\"config_hash\": \"abc\""), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Train, KeepBestTracksLowestLoss) {
  const auto sys = systems::make_tls(systems::TlsParams{});
  auto c = small_config();
  c.epochs = 60;
  c.learning_rate = 5e-2;
  c.keep_best = true;
  const auto r = train::train(sys, c);
  ASSERT_TRUE(r.state.best.has_value());
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    if (r.history.losses[i].total < r.history.losses[argmin].total) argmin = i;
  }
  EXPECT_EQ(r.state.best->epoch, argmin);
  EXPECT_EQ(r.state.best->loss, r.history.losses[argmin].total);
  EXPECT_EQ(&r.state.result(), &r.state.best->params);

  // the snapshot holds the parameters the best epoch started from
  auto upto = c;
  upto.keep_best = false;
  upto.epochs = argmin;
  EXPECT_EQ(train::train(sys, upto).state.params, r.state.best->params);
  EXPECT_FALSE(train::train(sys, upto).state.best.has_value());
}

TEST(Train, KeepBestSurvivesResume) {
  const auto sys = systems::make_tls(systems::TlsParams{});
  auto c = small_config();
  c.epochs = 40;
  c.learning_rate = 5e-2;
  c.keep_best = true;
  c.checkpoint_every = 20;
  const auto dir = std::filesystem::temp_directory_path() / "qcpinn_best_resume_test";
  std::filesystem::remove_all(dir);
  const auto full = train::train(sys, c);
  auto partial = c;
  partial.epochs = 20;
  train::TrainOptions opts;
  opts.checkpoint_dir = dir;
  train::train(sys, partial, opts);
  ASSERT_TRUE(std::filesystem::exists(dir / "best.json"));
  const auto rest = train::train_from(sys, c, train::load_train_state(dir));
  ASSERT_TRUE(rest.state.best.has_value());
  EXPECT_EQ(rest.state.best->params, full.state.best->params);
  EXPECT_EQ(rest.state.best->epoch, full.state.best->epoch);
  EXPECT_EQ(rest.state.best->loss, full.state.best->loss);
  std::filesystem::remove_all(dir);
}

TEST(Train, HardModeAnchorsInitialState) {
  const auto sys = systems::make_lambda3(systems::LambdaParams{});
  const auto r = train::train(sys, small_config());
  const std::vector<double> t0{0.0};
  const auto tr = loss::network_trajectory(r.state.params, sys, nn::ConstraintMode::hard(), t0);
  EXPECT_EQ(Eigen::VectorXd(tr.x.col(0)), sys.x0);
  EXPECT_EQ(Eigen::VectorXd(tr.u.col(0)), sys.u0);
}

TEST(Train, Errors) {
  const auto sys = systems::make_lambda3(systems::LambdaParams{});
  auto c = small_config();
  c.grid.points = 1;
  EXPECT_THROW(train::train(sys, c), ConfigError);
  c = small_config();
  c.grid.t_end = c.grid.t_start;
  EXPECT_THROW(train::train(sys, c), ConfigError);
  c = small_config();
  c.jitter_amplitude = 1.0;
  EXPECT_THROW(train::train(sys, c), ConfigError);

  const auto tls = systems::make_tls(systems::TlsParams{});
  const auto lam_params = nn::init_params(small_config().layer_sizes(sys), 1);
  EXPECT_THROW(train::retrain_with_detuning(lam_params, tls, small_config()), ConfigError);
}

TEST(Train, NonFiniteLossAborts) {
  const auto sys = systems::make_lambda3(systems::LambdaParams{});
  auto c = small_config();
  c.learning_rate = 1e300;
  EXPECT_THROW(train::train(sys, c), NumericError);
}
