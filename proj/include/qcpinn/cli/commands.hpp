#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcpinn/cli/config.hpp"
#include "qcpinn/validate/validator.hpp"

namespace qcpinn::cli {

enum ExitCode : int { kOk = 0, kConfigFailure = 2, kNumericFailure = 3 };

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::filesystem::path> checkpoint;
  std::optional<double> dt;
  bool detuned = false;
  std::vector<std::string> protocols;  // baseline; empty = all
  std::vector<double> p_values;        // gibbs; empty = 0, 0.1, ..., 1
  bool train_missing = false;          // benchmark: train the PINN row when no checkpoint exists
};

/// Loads the config and applies the --seed / --out / --dt overrides.
ExperimentConfig resolve_config(const RunOptions& o);

/// Worker cap from QCPINN_THREADS (default: hardware concurrency, at least 1).
unsigned worker_count();

struct BenchmarkRow {
  std::string protocol;
  validate::MetricsRecord nominal;
  validate::MetricsRecord detuned;
};
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

void cmd_train(const RunOptions& o, std::ostream& log);
void cmd_validate(const RunOptions& o, std::ostream& log);
void cmd_benchmark(const RunOptions& o, std::ostream& log);
void cmd_baseline(const RunOptions& o, std::ostream& log);
void cmd_steady_state(const RunOptions& o, std::ostream& log);
void cmd_energy(const RunOptions& o, std::ostream& log);
void cmd_gibbs(const RunOptions& o, std::ostream& log);

/// Dispatches `command` and maps failures to exit codes: 2 for
/// configuration problems, 3 for numeric ones. Diagnostics go to `err`.
int run(const std::string& command, const RunOptions& o, std::ostream& log, std::ostream& err);

}  // namespace qcpinn::cli
