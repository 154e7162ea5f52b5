// qcpinn command-line entry point.
#include <CLI11.hpp>
#include <iostream>

#include "qcpinn/cli/commands.hpp"

int main(int argc, char** argv) {
  using qcpinn::cli::RunOptions;
  CLI::App app{"Physics-informed neural networks for quantum control"};
  app.require_subcommand(1);

  RunOptions opts;
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string checkpoint;
  double dt = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "override train.seed");
    sub->add_option("--out", out, "override output_dir");
    sub->add_option("--checkpoint", checkpoint, "checkpoint to load");
    sub->add_option("--dt", dt, "override validate.dt");
  };

  auto* train = app.add_subcommand("train", "train a network; writes checkpoint and history CSV");
  train->add_flag("--detuned", opts.detuned, "train on the detuned system (warm start with --checkpoint)");
  auto* validate = app.add_subcommand("validate", "integrate the system under a trained control");
  validate->add_flag("--detuned", opts.detuned, "validate on the detuned system");
  auto* benchmark = app.add_subcommand("benchmark", "PINN and baseline comparison on the lambda system");
  benchmark->add_flag("--train", opts.train_missing, "train the PINN row if no checkpoint exists");
  auto* baseline = app.add_subcommand("baseline", "write benchmark pulse sequences as CSV");
  baseline->add_option("--protocol", opts.protocols, "stirap, inverse_engineering, stirep, mod_satd, sa_stirap");
  auto* steady = app.add_subcommand("steady-state", "TLS steady state and best constant control");
  auto* energy = app.add_subcommand("energy", "work, heat and efficiency of a trained TLS control");
  auto* gibbs = app.add_subcommand("gibbs", "efficiency sweep over TLS initial states p|g><g| + (1-p)|e><e|");
  gibbs->add_option("--p", opts.p_values, "p values (default 0, 0.1, ..., 1)");
  for (auto* s : {train, validate, benchmark, baseline, steady, energy, gibbs}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qcpinn::cli::kConfigFailure;
  }

  CLI::App* chosen = app.get_subcommands().front();
  opts.config = config;
  if (chosen->count("--seed") > 0) opts.seed = seed;
  if (chosen->count("--out") > 0) opts.out = out;
  if (chosen->count("--checkpoint") > 0) opts.checkpoint = checkpoint;
  if (chosen->count("--dt") > 0) opts.dt = dt;
  return qcpinn::cli::run(chosen->get_name(), opts, std::cout, std::cerr);
}
