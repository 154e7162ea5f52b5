// Acceptance runner: one PASS/FAIL line per criterion.
//
// Trained networks are cached under $QCPINN_ACCEPT_CACHE (default: a
// directory next to the binary), keyed by preset name and config hash, so a
// rerun only validates. Interrupted trainings resume from their last
// periodic checkpoint. QCPINN_ACCEPT_SEEDS caps the seeds per preset (1..3)
// and QCPINN_ACCEPT_ONLY selects criteria, e.g. "1,2,10".

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qcpinn/cli/commands.hpp"
#include "qcpinn/cli/config.hpp"
#include "qcpinn/errors.hpp"
#include "qcpinn/io/checkpoint.hpp"
#include "qcpinn/loss/loss.hpp"
#include "qcpinn/nn/gradient.hpp"
#include "qcpinn/nn/network.hpp"
#include "qcpinn/pulses/baselines.hpp"
#include "qcpinn/systems/density.hpp"
#include "qcpinn/systems/system.hpp"
#include "qcpinn/systems/tls.hpp"
#include "qcpinn/train/trainer.hpp"
#include "qcpinn/validate/validator.hpp"

namespace fs = std::filesystem;
using namespace qcpinn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

fs::path config_dir() { return env_or("QCPINN_CONFIG_DIR", QCPINN_CONFIG_DIR); }

std::size_t seed_count() {
  const int n = std::stoi(env_or("QCPINN_ACCEPT_SEEDS", "3"));
  return static_cast<std::size_t>(std::clamp(n, 1, 3));
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// Trained-network cache -----------------------------------------------------

class RunCache {
 public:
  explicit RunCache(fs::path root) : root_(std::move(root)) {}

  cli::ExperimentConfig config(const std::string& preset, std::uint64_t seed) const {
    cli::ExperimentConfig c = cli::load_config(config_dir() / (preset + ".json"));
    c.train.seed = seed;
    return c;
  }

  train::TrainState state(const std::string& preset, std::uint64_t seed) {
    cli::ExperimentConfig c = config(preset, seed);
    const std::string hash = cli::config_hash(c);
    const fs::path dir = root_ / (preset + "-" + hash);
    const systems::SystemSpec system = cli::build_system(c.system);

    train::TrainState start = train::initial_state(system, c.train);
    if (fs::exists(dir / "sidecar.json")) {
      start = train::load_train_state(dir);
      if (start.epoch >= c.train.epochs) return start;
    }
    const std::size_t every = c.train.epochs % 500 == 0 ? 500 : c.train.epochs;
    c.train.checkpoint_every = every;
    std::cout << "  training " << preset << " seed " << seed << " from epoch " << start.epoch << " of "
              << c.train.epochs << std::endl;
    train::TrainOptions opts;
    opts.checkpoint_dir = dir;
    opts.config_hash = hash;
    const std::size_t report = std::max<std::size_t>(1, c.train.epochs / 10);
    opts.on_epoch = [&](std::size_t e, const loss::LossBreakdown& b) {
      if ((e + 1) % report == 0) std::cout << "    epoch " << e + 1 << " loss " << fmt(b.total) << std::endl;
    };
    const auto t0 = std::chrono::steady_clock::now();
    train::TrainResult r = train::train_from(system, c.train, std::move(start), opts);
    std::cout << "    done in "
              << fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3) << " s"
              << std::endl;
    return std::move(r.state);
  }

  nn::NetworkParams params(const std::string& preset, std::uint64_t seed) { return state(preset, seed).result(); }

  /// Validates the trained network; `final_params` skips the best snapshot.
  validate::Validation validate(const std::string& preset, std::uint64_t seed, bool final_params = false) {
    const train::TrainState s = state(preset, seed);
    const nn::NetworkParams& p = final_params ? s.params : s.result();
    const cli::ExperimentConfig c = config(preset, seed);
    const systems::SystemSpec system = cli::build_system(c.system);
    validate::ValidationOptions v;
    v.t_start = c.validate.t_start;
    v.t_end = c.validate.t_end;
    v.dt = c.validate.dt;
    v.energy = system.name == "tls";
    return validate::validate_control(
        system, validate::ControlFunction::network(p, c.train.constraint_mode, system.n(), system.u0), v);
  }

  std::string snapshot_note(const std::string& preset, std::uint64_t seed) {
    const train::TrainState s = state(preset, seed);
    if (!s.best) return "final params";
    return "best epoch " + std::to_string(s.best->epoch) + " of " + std::to_string(s.epoch);
  }

 private:
  fs::path root_;
};

// 1 -------------------------------------------------------------------------

double relative_norm_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

struct GradientPair {
  std::vector<double> analytic;
  std::vector<double> numeric;
};

GradientPair gradients(const nn::NetworkParams& params, const nn::ScalarLoss& loss, double h) {
  GradientPair g;
  g.analytic = nn::flatten(nn::loss_gradient(params, loss).gradient);
  const std::vector<double> flat = nn::flatten(params);
  g.numeric.resize(flat.size());
  nn::NetworkParams q = params;
  std::vector<double> v = flat;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    v[k] = flat[k] + h;
    nn::unflatten(v, q);
    const double up = nn::loss_value(q, loss);
    v[k] = flat[k] - h;
    nn::unflatten(v, q);
    const double down = nn::loss_value(q, loss);
    v[k] = flat[k];
    g.numeric[k] = (up - down) / (2.0 * h);
  }
  return g;
}

std::vector<double> minus(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Outcome gradient_oracle() {
  const double h = 1e-5;
  const std::vector<double> times{0.0, 0.37, 1.1, 1.9, 2.6, 3.3, 4.2, 5.0};
  const std::vector<std::size_t> mask = all_indices(times.size());

  const auto tls = systems::make_tls(systems::TlsParams{});
  const auto tls_params = nn::init_params(std::vector<int>{1, 12, 12, tls.n() + tls.m()}, 21);
  const auto lam = systems::make_lambda3(systems::LambdaParams{});
  const auto lam_params = nn::init_params(std::vector<int>{1, 10, 10, lam.n() + lam.m()}, 22);
  if (tls_params.parameter_count() > 500 || lam_params.parameter_count() > 500) return {false, "network too large"};

  auto scalar = [&](const systems::SystemSpec& s, nn::ConstraintMode mode, double eta, double eta_c, double lic,
                    double chi, bool fields = false) {
    loss::LossWeights w;
    w.eta = eta;
    w.eta_c = eta_c;
    w.lambda_ic = lic;
    w.chi = chi;
    if (fields) w.regularizer = loss::LossWeights::Regularizer::Fields;
    return loss::physics_loss(s, mode, w, times, mask);
  };

  // Each component's gradient is its combination with L_model minus L_model alone.
  const auto model = gradients(tls_params, scalar(tls, nn::ConstraintMode::hard(), 0, 0, 0, 0), h);
  const auto model_soft = gradients(tls_params, scalar(tls, nn::ConstraintMode::soft(0.0), 0, 0, 0, 0), h);
  const auto lam_model = gradients(lam_params, scalar(lam, nn::ConstraintMode::hard(), 0, 0, 0, 0), h);
  const auto control = gradients(tls_params, scalar(tls, nn::ConstraintMode::hard(), 0.5, 0, 0, 0), h);
  const auto reg = gradients(tls_params, scalar(tls, nn::ConstraintMode::hard(), 0, 0, 0, 1e-2), h);
  const auto reg_fields = gradients(tls_params, scalar(tls, nn::ConstraintMode::hard(), 0, 0, 0, 1e-2, true), h);
  const auto ic = gradients(tls_params, scalar(tls, nn::ConstraintMode::soft(1.0), 0, 0, 1.0, 0), h);
  const auto cons = gradients(lam_params, scalar(lam, nn::ConstraintMode::hard(), 0, 0.5, 0, 0), h);

  std::map<std::string, double> err;
  err["model"] = relative_norm_error(model.analytic, model.numeric);
  err["model(soft)"] = relative_norm_error(model_soft.analytic, model_soft.numeric);
  err["control"] = relative_norm_error(minus(control.analytic, model.analytic), minus(control.numeric, model.numeric));
  err["reg"] = relative_norm_error(minus(reg.analytic, model.analytic), minus(reg.numeric, model.numeric));
  err["reg(fields)"] =
      relative_norm_error(minus(reg_fields.analytic, model.analytic), minus(reg_fields.numeric, model.numeric));
  err["ic"] = relative_norm_error(minus(ic.analytic, model_soft.analytic), minus(ic.numeric, model_soft.numeric));
  err["const(lambda3)"] =
      relative_norm_error(minus(cons.analytic, lam_model.analytic), minus(cons.numeric, lam_model.numeric));

  double worst_rate = 0.0;
  for (double t : times) {
    const auto out = nn::forward_with_time_derivative(tls_params, t);
    const double ht = 1e-5;
    const Eigen::VectorXd fd = (nn::forward(tls_params, t + ht) - nn::forward(tls_params, t - ht)) / (2.0 * ht);
    worst_rate = std::max(worst_rate, (out.rate - fd).norm() / std::max(fd.norm(), 1e-300));
  }

  bool ok = worst_rate < 1e-6;
  std::string detail;
  for (const auto& [name, e] : err) {
    ok = ok && e < 1e-5;
    detail += name + " " + fmt(e, 2) + ", ";
  }
  detail += "d/dt " + fmt(worst_rate, 2);
  return {ok, detail};
}

// 2, 3 ----------------------------------------------------------------------

Outcome tls_steady_state() {
  const auto tls = systems::make_tls(systems::TlsParams{});
  validate::ValidationOptions v;
  v.t_end = 200.0;
  v.dt = 1e-2;
  const auto r = validate::validate_control(tls, validate::ControlFunction::zero(1), v);
  const Eigen::VectorXd x = r.trajectory.x.col(static_cast<Eigen::Index>(r.trajectory.size() - 1));
  const Eigen::Vector4d ref(0.7225, 0.2775, -0.1106, 0.0083);
  const double err = (x - ref).cwiseAbs().maxCoeff();
  return {err <= 5e-3, "x(200) = (" + fmt(x(0)) + ", " + fmt(x(1)) + ", " + fmt(x(2)) + ", " + fmt(x(3)) +
                           "), max deviation " + fmt(err, 2)};
}

Outcome tls_constant_optimum() {
  const systems::TlsParams p;
  const auto opt = systems::tls_optimal_constant_control(p, systems::CMatrix::Identity(2, 2) * 0.5);
  const double x1 = systems::tls_steady_state(p, -4.0)(0);
  const bool ok = std::abs(opt.xi + 4.0) <= 0.05 && std::abs(opt.fidelity - 0.9988) <= 2e-3 &&
                  std::abs(x1 - 0.5049) <= 1e-3;
  return {ok, "xi* " + fmt(opt.xi, 6) + ", F* " + fmt(opt.fidelity, 6) + ", x1(-4) " + fmt(x1, 6) +
                  " (printed 0.549 is a known discrepancy)"};
}

// 4, 5 ----------------------------------------------------------------------

validate::MetricsRecord run_preset(pulses::Protocol p) {
  const auto seq = pulses::benchmark_preset(p);
  const auto lam = systems::make_lambda3(systems::LambdaParams{});
  validate::ValidationOptions v;
  v.t_start = seq.t_start;
  v.t_end = seq.t_end;
  v.dt = 1e-3;
  return validate::validate_control(lam, seq.control(), v).metrics;
}

Outcome inverse_engineering() {
  const auto m = run_preset(pulses::Protocol::InverseEngineering);
  const bool ok = std::abs(m.p2 - 0.97) <= 0.02 && std::abs(m.area - 19.8) <= 1.0 && std::abs(m.t_f - 3.0) <= 0.1;
  return {ok, "p2 " + fmt(m.p2) + ", area " + fmt(m.area) + ", t_f " + fmt(m.t_f)};
}

Outcome modsatd_stirep() {
  const auto mod = run_preset(pulses::Protocol::ModSatd);
  const auto stirep = run_preset(pulses::Protocol::Stirep);
  const bool p2_ok = std::abs(mod.p2 - 0.98) <= 0.03 && std::abs(stirep.p2 - 0.98) <= 0.03;
  const bool area_ok = std::abs(stirep.area - 53.3) <= 0.1 * 53.3;
  std::string detail = "MOD-SATD p2 " + fmt(mod.p2) + ", STIREP p2 " + fmt(stirep.p2) + ", STIREP area " +
                       fmt(stirep.area) + " vs 53.3";
  if (!area_ok) detail += " [open question: STIREP area outside +-10%, clock and field map unresolved]";
  return {p2_ok && area_ok, detail};
}

// 6 -------------------------------------------------------------------------

Outcome lambda_training(RunCache& cache) {
  std::string detail;
  for (std::uint64_t seed = 1; seed <= seed_count(); ++seed) {
    const auto m = cache.validate("lambda3", seed).metrics;
    const auto f = cache.validate("lambda3", seed, true).metrics;
    detail += "seed " + std::to_string(seed) + " (" + cache.snapshot_note("lambda3", seed) + "): p2 " + fmt(m.p2) +
              " area " + fmt(m.area) + " t_f " + fmt(m.t_f) + ", final params p2 " + fmt(f.p2) + "; ";
    if (m.p2 >= 0.90 && m.t_f <= 5.0 && m.area <= 20.0) return {true, detail};
  }
  return {false, detail};
}

// 7, 8, 11 ------------------------------------------------------------------

struct TlsRun {
  std::uint64_t seed = 0;
  std::string note;
  double min_fidelity = 0.0;  // t >= 20
  double xi_deviation = 0.0;  // max |xi + 4| over the last 20% of the horizon
  validate::MetricsRecord metrics;
  bool pass() const { return min_fidelity >= 0.98 && xi_deviation <= 0.5; }
};

TlsRun tls_run(RunCache& cache, const std::string& preset, std::uint64_t seed) {
  TlsRun r;
  r.seed = seed;
  r.note = cache.snapshot_note(preset, seed);
  const auto v = cache.validate(preset, seed);
  r.metrics = v.metrics;
  r.min_fidelity = 1.0;
  for (std::size_t i = 0; i < v.metrics.fidelity_t.size(); ++i) {
    if (v.metrics.fidelity_t[i] >= 20.0) r.min_fidelity = std::min(r.min_fidelity, v.metrics.fidelity[i]);
  }
  const double t_end = v.trajectory.t.back();
  const double t_tail = v.trajectory.t.front() + 0.8 * (t_end - v.trajectory.t.front());
  for (std::size_t j = 0; j < v.trajectory.size(); ++j) {
    if (v.trajectory.t[j] >= t_tail) {
      r.xi_deviation = std::max(r.xi_deviation, std::abs(v.trajectory.u(0, static_cast<Eigen::Index>(j)) + 4.0));
    }
  }
  return r;
}

std::string describe(const TlsRun& r) {
  return "seed " + std::to_string(r.seed) + " (" + r.note + "): min F(t>=20) " + fmt(r.min_fidelity) + ", max|xi+4| tail " +
         fmt(r.xi_deviation, 3) + "; ";
}

struct TlsSweep {
  std::vector<TlsRun> runs;
  std::optional<std::size_t> passing;
};

TlsSweep tls_sweep(RunCache& cache, const std::string& preset) {
  TlsSweep s;
  for (std::uint64_t seed = 1; seed <= seed_count(); ++seed) {
    s.runs.push_back(tls_run(cache, preset, seed));
    if (s.runs.back().pass()) {
      s.passing = s.runs.size() - 1;
      break;
    }
  }
  return s;
}

Outcome tls_training(const TlsSweep& s) {
  std::string detail;
  for (const auto& r : s.runs) detail += describe(r);
  return {s.passing.has_value(), detail};
}

Outcome energy_suite(const TlsSweep& s) {
  // Eff stays in [0, 1] on random ratio series as well as trained runs.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ratio(0.0, 3.0);
  bool bounded = true;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> t(50);
    std::vector<std::optional<double>> eta(50);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = 0.1 * static_cast<double>(i);
      if (i > 3) eta[i] = ratio(rng);
    }
    const double e = validate::efficiency(eta, t);
    bounded = bounded && e >= 0.0 && e <= 1.0;
  }
  for (const auto& r : s.runs) {
    if (r.metrics.eff) bounded = bounded && *r.metrics.eff >= 0.0 && *r.metrics.eff <= 1.0;
  }

  const TlsRun& run = s.passing ? s.runs[*s.passing] : s.runs.front();
  if (!run.metrics.energy || !run.metrics.eff) return {false, "no energy series"};
  const auto& e = *run.metrics.energy;
  const double t_tail = e.t.front() + 0.9 * (e.t.back() - e.t.front());
  double ratio_dev = 0.0;
  std::size_t defined = 0;
  for (std::size_t i = 0; i < e.t.size(); ++i) {
    if (e.t[i] >= t_tail && e.ratio[i]) {
      ratio_dev = std::max(ratio_dev, std::abs(*e.ratio[i] - 1.0));
      ++defined;
    }
  }
  const double eff = *run.metrics.eff;
  const bool ok = bounded && defined > 0 && ratio_dev <= 0.05 && std::abs(eff - 0.5249) <= 0.05;
  return {ok, "seed " + std::to_string(run.seed) + ": max|eta-1| tail " + fmt(ratio_dev, 3) + ", Eff " + fmt(eff) +
                  " vs 0.5249, Eff in [0,1] " + (bounded ? "yes" : "no")};
}

Outcome hard_vs_soft(RunCache& cache, const TlsSweep& hard, const TlsSweep& soft) {
  std::string detail = "soft: ";
  for (const auto& r : soft.runs) detail += describe(r);

  const cli::ExperimentConfig c = cache.config("tls", hard.runs.front().seed);
  const auto system = cli::build_system(c.system);
  const auto params = cache.params("tls", hard.runs.front().seed);
  const std::vector<double> t0{0.0, 1.0};
  const auto tr = loss::network_trajectory(params, system, nn::ConstraintMode::hard(), t0);
  const double x_err = (tr.x.col(0) - system.x0).cwiseAbs().maxCoeff();
  const double u_err = (tr.u.col(0) - system.u0).cwiseAbs().maxCoeff();
  detail += "hard |x(0)-x0| " + fmt(x_err, 2) + ", |u(0)-u0| " + fmt(u_err, 2);
  return {soft.passing.has_value() && hard.passing.has_value() && x_err == 0.0 && u_err == 0.0, detail};
}

// 9 -------------------------------------------------------------------------

Outcome nqubit_training(RunCache& cache) {
  auto sweep = [&](const std::string& preset, double min_fid, double max_exp, std::string& detail) {
    for (std::uint64_t seed = 1; seed <= seed_count(); ++seed) {
      const auto m = cache.validate(preset, seed).metrics;
      detail += preset + " seed " + std::to_string(seed) + " (" + cache.snapshot_note(preset, seed) + "): F " + fmt(m.final_fidelity) + " <Hp> " +
                fmt(m.final_expectation) + "; ";
      if (m.final_fidelity >= min_fid && m.final_expectation <= max_exp) return true;
    }
    return false;
  };
  std::string detail;
  const bool five = sweep("nqubit5", 0.99, 0.05, detail);
  const bool ising = sweep("ising3", 0.98, -0.44, detail);
  return {five && ising, detail};
}

// 10 ------------------------------------------------------------------------

struct ConservationStats {
  double trace = 0.0;
  double hermiticity = 0.0;
  double min_eigenvalue = 1.0;
  double norm = 0.0;
  std::size_t samples = 0;

  void add_density(const systems::Trajectory& tr, int dim) {
    for (std::size_t j = 0; j < tr.size(); ++j) {
      const Eigen::VectorXd x = tr.x.col(static_cast<Eigen::Index>(j));
      const systems::CMatrix rho = systems::unpack_density(x, dim);
      const auto c = systems::inspect_density(rho);
      trace = std::max(trace, std::abs(x.head(dim).sum() - 1.0));
      hermiticity = std::max(hermiticity, c.hermiticity_error);
      min_eigenvalue = std::min(min_eigenvalue, c.min_eigenvalue);
      ++samples;
    }
  }
  void add_state_vector(const systems::Trajectory& tr) {
    for (std::size_t j = 0; j < tr.size(); ++j) {
      norm = std::max(norm, std::abs(tr.x.col(static_cast<Eigen::Index>(j)).norm() - 1.0));
      ++samples;
    }
  }
};

Outcome conservation() {
  ConservationStats stats;
  auto integrate = [](const systems::SystemSpec& s, const validate::ControlFunction& u, double t_end, double dt) {
    return validate::rk4_integrate(s, u, s.x0, 0.0, t_end, dt);
  };

  const auto tls = systems::make_tls(systems::TlsParams{});
  const auto wiggle = validate::ControlFunction::from_functions(
      {[](double t) { return -4.0 + 2.0 * std::sin(t); }}, "wiggle");
  stats.add_density(integrate(tls, wiggle, 30.0, 1e-3), 2);
  stats.add_density(integrate(tls, validate::ControlFunction::zero(1), 30.0, 1e-3), 2);
  Eigen::Vector4d mixed(0.3, 0.7, 0.0, 0.0);
  stats.add_density(validate::rk4_integrate(tls, wiggle, mixed, 0.0, 30.0, 1e-3), 2);

  const auto lam = systems::make_lambda3(systems::LambdaParams{});
  for (auto p : {pulses::Protocol::Stirap, pulses::Protocol::InverseEngineering, pulses::Protocol::Stirep,
                 pulses::Protocol::ModSatd}) {
    const auto seq = pulses::benchmark_preset(p);
    stats.add_density(validate::rk4_integrate(lam, seq.control(), lam.x0, seq.t_start, seq.t_end, 1e-3), 3);
  }
  const auto four = systems::make_lambda4(systems::FourLevelParams{});
  const auto stirap = pulses::benchmark_preset(pulses::Protocol::Stirap);
  stats.add_density(validate::rk4_integrate(four, stirap.control(), four.x0, stirap.t_start, stirap.t_end, 1e-3), 4);

  const auto ramp = validate::ControlFunction::from_functions(
      {[](double t) { return 1.0 - t / 10.0; }, [](double t) { return t / 10.0; }}, "ramp");
  systems::NQubitParams five;
  stats.add_state_vector(integrate(systems::make_nqubit(five, false), ramp, 10.0, 1e-3));
  systems::NQubitParams ising;
  ising.qubits = 3;
  ising.interacting = true;
  stats.add_state_vector(integrate(systems::make_nqubit(ising, true), ramp, 10.0, 1e-3));

  // Self-convergence of RK4 against a 16x finer reference.
  auto final_state = [&](double dt) {
    const auto tr = integrate(tls, wiggle, 5.0, dt);
    return Eigen::VectorXd(tr.x.col(static_cast<Eigen::Index>(tr.size() - 1)));
  };
  const Eigen::VectorXd ref = final_state(0.025 / 16.0);
  const double e1 = (final_state(0.1) - ref).norm();
  const double e2 = (final_state(0.05) - ref).norm();
  const double e3 = (final_state(0.025) - ref).norm();
  const double order1 = std::log2(e1 / e2);
  const double order2 = std::log2(e2 / e3);

  const bool ok = stats.trace <= 1e-8 && stats.norm <= 1e-8 && stats.hermiticity <= 1e-12 &&
                  stats.min_eigenvalue >= -1e-9 && std::abs(order1 - 4.0) <= 0.3 && std::abs(order2 - 4.0) <= 0.3;
  return {ok, std::to_string(stats.samples) + " samples: trace " + fmt(stats.trace, 2) + ", norm " +
                  fmt(stats.norm, 2) + ", hermiticity " + fmt(stats.hermiticity, 2) + ", min eigenvalue " +
                  fmt(stats.min_eigenvalue, 2) + ", observed order " + fmt(order1, 3) + " / " + fmt(order2, 3)};
}

// 12 ------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const fs::path& scratch) {
  cli::ExperimentConfig c = cli::load_config(config_dir() / "tls.json");
  c.train.epochs = 60;
  c.train.hidden_layers = {16, 16};
  c.train.grid.points = 40;
  c.train.checkpoint_every = 0;
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  const fs::path cfg = scratch / "config.json";
  io::write_atomic(cfg, cli::dump_config(c));

  std::ostringstream log;
  std::ostringstream err;
  for (const char* run : {"a", "b"}) {
    cli::RunOptions o;
    o.config = cfg;
    o.out = (scratch / run).string();
    if (cli::run("train", o, log, err) != cli::kOk) return {false, "train failed: " + err.str()};
  }
  std::string detail;
  bool ok = true;
  for (const char* name : {"history.csv", "checkpoint.json"}) {
    const std::string a = slurp(scratch / "a" / name);
    const std::string b = slurp(scratch / "b" / name);
    const bool same = !a.empty() && a == b;
    ok = ok && same;
    detail += std::string(name) + (same ? " identical (" + std::to_string(a.size()) + " bytes); " : " differs; ");
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const fs::path cache_root = env_or("QCPINN_ACCEPT_CACHE", (fs::current_path() / "acceptance_cache").string());
  fs::create_directories(cache_root);
  RunCache cache(cache_root);

  std::set<int> only;
  {
    std::istringstream s(env_or("QCPINN_ACCEPT_ONLY", ""));
    for (std::string item; std::getline(s, item, ',');) {
      if (!item.empty()) only.insert(std::stoi(item));
    }
  }
  auto wanted = [&](int n) { return only.empty() || only.count(n) > 0; };

  std::optional<TlsSweep> hard;
  std::optional<TlsSweep> soft;
  auto hard_sweep = [&]() -> const TlsSweep& {
    if (!hard) hard = tls_sweep(cache, "tls");
    return *hard;
  };
  auto soft_sweep = [&]() -> const TlsSweep& {
    if (!soft) soft = tls_sweep(cache, "tls_soft");
    return *soft;
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient oracle", gradient_oracle},
      {"TLS uncontrolled steady state", tls_steady_state},
      {"TLS constant-control optimum", tls_constant_optimum},
      {"inverse engineering ansatz 2", inverse_engineering},
      {"MOD-SATD and STIREP", modsatd_stirep},
      {"PINN lambda training", [&] { return lambda_training(cache); }},
      {"PINN TLS training", [&] { return tls_training(hard_sweep()); }},
      {"energy suite", [&] { return energy_suite(hard_sweep()); }},
      {"N-qubit systems", [&] { return nqubit_training(cache); }},
      {"conservation suite", conservation},
      {"hard vs soft constraints", [&] { return hard_vs_soft(cache, hard_sweep(), soft_sweep()); }},
      {"determinism", [&] { return determinism(cache_root / "determinism"); }},
  };

  std::vector<std::string> lines;
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!wanted(n)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " [" << n << "] " << criteria[i].first << ": " << o.detail << " ("
         << fmt(secs, 3) << " s)";
    std::cout << line.str() << std::endl;
    lines.push_back(line.str());
    if (!o.pass) ++failures;
  }

  std::ofstream report(cache_root / "acceptance_report.txt");
  for (const auto& l : lines) report << l << "\n";
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
