#include "qcpinn/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <thread>

#include "qcpinn/errors.hpp"
#include "qcpinn/io/checkpoint.hpp"
#include "qcpinn/pulses/baselines.hpp"
#include "qcpinn/systems/tls.hpp"

namespace qcpinn::cli {

namespace fs = std::filesystem;

ExperimentConfig resolve_config(const RunOptions& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.train.seed = *o.seed;
  if (o.out) c.output_dir = *o.out;
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw ConfigError("--dt must be positive");
    c.validate.dt = *o.dt;
  }
  return c;
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QCPINN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("QCPINN_THREADS must be a positive integer");
    n = std::min(n, static_cast<unsigned>(v));
  }
  return n;
}

namespace {

// Runs jobs on at most worker_count() threads; results land by index.
void run_parallel(std::vector<std::function<void()>>& jobs) {
  const unsigned n = std::min<unsigned>(worker_count(), static_cast<unsigned>(jobs.size()));
  if (n <= 1) {
    for (auto& j : jobs) j();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        try {
          jobs[i]();
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

fs::path out_dir(const ExperimentConfig& c) {
  fs::create_directories(c.output_dir);
  return c.output_dir;
}

// The trained network: best.json when the run keeps its lowest-loss snapshot.
fs::path checkpoint_path(const RunOptions& o, const ExperimentConfig& c) {
  if (o.checkpoint) return *o.checkpoint;
  return fs::path(c.output_dir) / (c.train.keep_best ? "best.json" : "checkpoint.json");
}

nn::NetworkParams load_params(const fs::path& path, const systems::SystemSpec& system) {
  if (!fs::exists(path)) throw ConfigError("checkpoint '" + path.string() + "' does not exist");
  nn::NetworkParams p = io::load_checkpoint(path).params;
  if (p.output_width() != system.n() + system.m() || p.layer_sizes.front() != 1) {
    throw ConfigError("checkpoint '" + path.string() + "' does not fit system '" + system.name + "'");
  }
  return p;
}

validate::ValidationOptions validation_options(const ExperimentConfig& c, const systems::SystemSpec& s) {
  validate::ValidationOptions v;
  v.t_start = c.validate.t_start;
  v.t_end = c.validate.t_end;
  v.dt = c.validate.dt;
  v.energy = s.name == "tls";
  return v;
}

validate::ControlFunction network_control(const nn::NetworkParams& p, const ExperimentConfig& c,
                                          const systems::SystemSpec& s) {
  return validate::ControlFunction::network(p, c.train.constraint_mode, s.n(), s.u0);
}

std::string suffix(bool detuned) { return detuned ? "_detuned" : ""; }

validate::MetricsRecord validate_sequence(const pulses::PulseSequence& seq, const systems::SystemSpec& s, double dt) {
  validate::ValidationOptions v;
  v.t_start = seq.t_start;
  v.t_end = seq.t_end;
  v.dt = dt;
  return validate::validate_control(s, seq.control(), v).metrics;
}

}  // namespace

void cmd_train(const RunOptions& o, std::ostream& log) {
  const ExperimentConfig c = resolve_config(o);
  const systems::SystemSpec system = build_system(c.system, o.detuned);
  train::TrainState start = train::initial_state(system, c.train);
  bool warm = false;
  if (o.checkpoint) {
    const fs::path dir = o.checkpoint->parent_path();
    if (o.checkpoint->filename() == "checkpoint.json" && fs::exists(dir / "sidecar.json") && !o.detuned) {
      start = train::load_train_state(dir.empty() ? fs::path(".") : dir);
      log << "resuming from epoch " << start.epoch << "\n";
    } else {
      start.params = load_params(*o.checkpoint, system);
      warm = true;
    }
  }
  const fs::path dir = out_dir(c);
  train::TrainOptions opts;
  opts.checkpoint_dir = dir;
  opts.config_hash = config_hash(c);
  const std::size_t report = std::max<std::size_t>(1, c.train.epochs / 20);
  opts.on_epoch = [&](std::size_t e, const loss::LossBreakdown& b) {
    if ((e + 1) % report == 0) log << "epoch " << e + 1 << " loss " << b.total << "\n";
  };
  const std::size_t first = start.epoch;
  train::TrainResult r = warm ? train::retrain_with_detuning(start.params, system, c.train, opts)
                              : train::train_from(system, c.train, std::move(start), opts);

  io::save_checkpoint(dir / "checkpoint.json", r.state.params, &r.state.adam);
  nlohmann::ordered_json side;
  side["config_hash"] = opts.config_hash;
  side["epoch"] = r.state.epoch;
  if (r.state.best) {
    io::save_checkpoint(dir / "best.json", r.state.best->params);
    side["best"] = {{"epoch", r.state.best->epoch}, {"loss", r.state.best->loss}};
  }
  double wall = 0.0;
  for (double w : r.history.wall_seconds) wall += w;
  side["wall_seconds"] = wall;
  io::write_atomic(dir / "sidecar.json", side.dump(2) + "\n");
  io::write_atomic(dir / "history.csv", r.history.to_csv(first));
  io::write_atomic(dir / "config.json", dump_config(c));
  log << "trained " << r.history.size() << " epochs in " << wall << " s -> " << (dir / "checkpoint.json").string()
      << "\n";
}

void cmd_validate(const RunOptions& o, std::ostream& log) {
  const ExperimentConfig c = resolve_config(o);
  const systems::SystemSpec system = build_system(c.system, o.detuned);
  const nn::NetworkParams params = load_params(checkpoint_path(o, c), system);
  const auto v = validate::validate_control(system, network_control(params, c, system), validation_options(c, system));
  const fs::path dir = out_dir(c);
  const std::size_t stride = std::max<std::size_t>(1, v.trajectory.size() / 20000);
  io::write_atomic(dir / ("trajectory" + suffix(o.detuned) + ".csv"), validate::trajectory_csv(system, v.trajectory, stride));
  io::write_atomic(dir / ("metrics" + suffix(o.detuned) + ".json"), validate::metrics_json(v.metrics));
  log << "p2 " << v.metrics.p2 << " area " << v.metrics.area << " t_f " << v.metrics.t_f << " fidelity "
      << v.metrics.final_fidelity << "\n";
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::string out = "protocol,p2,area,t_f,p2_detuned,area_detuned,t_f_detuned\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.protocol.c_str(), r.nominal.p2,
                  r.nominal.area, r.nominal.t_f, r.detuned.p2, r.detuned.area, r.detuned.t_f);
    out += buf;
  }
  return out;
}

void cmd_benchmark(const RunOptions& o, std::ostream& log) {
  const ExperimentConfig c = resolve_config(o);
  if (c.system.kind != "lambda3") throw ConfigError("benchmark runs on the lambda3 system");
  if (c.system.initial.kind != InitialState::Kind::Default) throw ConfigError("benchmark needs rho(0) = s11");
  const systems::SystemSpec nominal = build_system(c.system, false);
  const systems::SystemSpec detuned = build_system(c.system, true);

  const fs::path ckpt = checkpoint_path(o, c);
  if (!fs::exists(ckpt)) {
    if (!o.train_missing) {
      throw ConfigError("no PINN checkpoint at '" + ckpt.string() + "'; run train first or pass --train");
    }
    RunOptions t = o;
    t.checkpoint.reset();
    t.detuned = false;
    cmd_train(t, log);
  }
  const nn::NetworkParams params = load_params(fs::exists(ckpt) ? ckpt : checkpoint_path(RunOptions{}, c), nominal);

  const std::vector<pulses::Protocol> protocols{pulses::Protocol::Stirap, pulses::Protocol::InverseEngineering,
                                                pulses::Protocol::Stirep, pulses::Protocol::ModSatd};
  std::vector<BenchmarkRow> rows(protocols.size() + 1);
  std::vector<std::function<void()>> jobs;
  for (bool det : {false, true}) {
    jobs.emplace_back([&, det] {
      const auto& s = det ? detuned : nominal;
      auto m = validate::validate_control(s, network_control(params, c, s), validation_options(c, s)).metrics;
      (det ? rows[0].detuned : rows[0].nominal) = std::move(m);
    });
    for (std::size_t i = 0; i < protocols.size(); ++i) {
      jobs.emplace_back([&, det, i] {
        const auto seq = pulses::benchmark_preset(protocols[i]);
        (det ? rows[i + 1].detuned : rows[i + 1].nominal) = validate_sequence(seq, det ? detuned : nominal, c.validate.dt);
      });
    }
  }
  rows[0].protocol = "pinn";
  for (std::size_t i = 0; i < protocols.size(); ++i) rows[i + 1].protocol = pulses::protocol_name(protocols[i]);
  run_parallel(jobs);

  const std::string csv = benchmark_csv(rows);
  io::write_atomic(out_dir(c) / "benchmark.csv", csv);
  log << csv;
}

void cmd_baseline(const RunOptions& o, std::ostream& log) {
  const ExperimentConfig c = resolve_config(o);
  std::vector<pulses::Protocol> which;
  for (const auto& name : o.protocols) which.push_back(pulses::protocol_from_name(name));
  if (which.empty()) {
    which = {pulses::Protocol::Stirap, pulses::Protocol::InverseEngineering, pulses::Protocol::Stirep,
             pulses::Protocol::ModSatd, pulses::Protocol::SaStirap};
  }
  const fs::path dir = out_dir(c);
  for (pulses::Protocol p : which) {
    const auto seq = pulses::benchmark_preset(p);
    const auto samples = static_cast<std::size_t>(std::ceil((seq.t_end - seq.t_start) / c.validate.dt));
    const fs::path path = dir / ("pulses_" + pulses::protocol_name(p) + ".csv");
    io::write_atomic(path, seq.to_csv(std::max<std::size_t>(samples, 1)));
    log << "wrote " << path.string() << "\n";
  }
}

void cmd_steady_state(const RunOptions& o, std::ostream& log) {
  const ExperimentConfig c = resolve_config(o);
  if (c.system.kind != "tls") throw ConfigError("steady-state is defined for the tls system");
  const systems::TlsParams p = systems::tls_params(c.system.params);
  const systems::CMatrix target = systems::CMatrix::Identity(2, 2) * 0.5;
  const auto opt = systems::tls_optimal_constant_control(p, target);
  const Eigen::Vector4d free = systems::tls_steady_state(p, 0.0);
  const Eigen::Vector4d best = systems::tls_steady_state(p, opt.xi);
  nlohmann::ordered_json j;
  j["xi_star"] = opt.xi;
  j["fidelity"] = opt.fidelity;
  j["steady_state_at_xi_star"] = {best(0), best(1), best(2), best(3)};
  j["steady_state_uncontrolled"] = {free(0), free(1), free(2), free(3)};
  io::write_atomic(out_dir(c) / "steady_state.json", j.dump(2) + "\n");
  log << "xi* " << opt.xi << " F* " << opt.fidelity << "\n";
}

void cmd_energy(const RunOptions& o, std::ostream& log) {
  const ExperimentConfig c = resolve_config(o);
  if (c.system.kind != "tls") throw ConfigError("energy is defined for the tls system");
  const systems::SystemSpec system = build_system(c.system);
  const nn::NetworkParams params = load_params(checkpoint_path(o, c), system);
  const auto v = validate::validate_control(system, network_control(params, c, system), validation_options(c, system));
  const fs::path dir = out_dir(c);
  const std::size_t stride = std::max<std::size_t>(1, v.metrics.energy->t.size() / 20000);
  io::write_atomic(dir / "energy.csv", validate::energy_csv(*v.metrics.energy, stride));
  nlohmann::ordered_json j;
  j["eff"] = v.metrics.eff ? nlohmann::ordered_json(*v.metrics.eff) : nlohmann::ordered_json(nullptr);
  io::write_atomic(dir / "energy_summary.json", j.dump(2) + "\n");
  log << "Eff " << (v.metrics.eff ? std::to_string(*v.metrics.eff) : "undefined") << "\n";
}

void cmd_gibbs(const RunOptions& o, std::ostream& log) {
  const ExperimentConfig base = resolve_config(o);
  if (base.system.kind != "tls") throw ConfigError("gibbs sweep is defined for the tls system");
  std::vector<double> ps = o.p_values;
  if (ps.empty()) {
    for (int i = 0; i <= 10; ++i) ps.push_back(0.1 * i);
  }
  std::string csv = "p,eff,final_fidelity\n";
  char buf[128];
  for (double p : ps) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("gibbs p must lie in [0, 1]");
    if (std::abs(p - 0.5) < 1e-12) {
      log << "warning: skipping p = 0.5, the initial state already equals the target\n";
      continue;
    }
    ExperimentConfig c = base;
    c.system.initial.kind = InitialState::Kind::Gibbs;
    c.system.initial.p = p;
    const systems::SystemSpec system = build_system(c.system);
    const train::TrainResult r = train::train(system, c.train);
    const auto v =
        validate::validate_control(system, network_control(r.state.result(), c, system), validation_options(c, system));
    const double eff = v.metrics.eff ? *v.metrics.eff : std::nan("");
    std::snprintf(buf, sizeof buf, "%.3f,%.10g,%.10g\n", p, eff, v.metrics.final_fidelity);
    csv += buf;
    log << buf;
  }
  io::write_atomic(out_dir(base) / "gibbs.csv", csv);
}

int run(const std::string& command, const RunOptions& o, std::ostream& log, std::ostream& err) {
  try {
    if (command == "train") {
      cmd_train(o, log);
    } else if (command == "validate") {
      cmd_validate(o, log);
    } else if (command == "benchmark") {
      cmd_benchmark(o, log);
    } else if (command == "baseline") {
      cmd_baseline(o, log);
    } else if (command == "steady-state") {
      cmd_steady_state(o, log);
    } else if (command == "energy") {
      cmd_energy(o, log);
    } else if (command == "gibbs") {
      cmd_gibbs(o, log);
    } else {
      err << "unknown command '" << command << "'\n";
      return kConfigFailure;
    }
  } catch (const NumericError& e) {
    err << "numeric failure at epoch " << e.epoch() << ": " << e.what() << "\n";
    return kNumericFailure;
  } catch (const IntegrationError& e) {
    err << "integration failure at t = " << e.time() << ": " << e.what() << "\n";
    return kNumericFailure;
  } catch (const OptimizationError& e) {
    err << "optimisation failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const DegenerateError& e) {
    err << "degenerate input: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kConfigFailure;
  }
  return kOk;
}

}  // namespace qcpinn::cli
