#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "qcpinn/systems/system.hpp"
#include "qcpinn/train/trainer.hpp"

namespace qcpinn::cli {

/// Initial state family. Default is the system's own x0.
struct InitialState {
  enum class Kind { Default, Epsilon, Gibbs };
  Kind kind = Kind::Default;
  double epsilon = 0.0;  // Lambda: s11/2 + s22/2 + eps (s12 + s21)/2
  double p = 1.0;        // TLS: p|g><g| + (1 - p)|e><e|

  bool operator==(const InitialState&) const = default;
};

struct SystemConfig {
  std::string kind = "lambda3";  // tls | lambda3 | lambda4 | nqubit
  int qubits = 5;
  bool interacting = false;
  bool g0_tied = false;
  systems::ParamOverrides params;
  InitialState initial;

  bool operator==(const SystemConfig&) const = default;
};

struct ValidateSettings {
  double t_start = 0.0;
  double t_end = 4.0;
  double dt = 1e-3;

  bool operator==(const ValidateSettings&) const = default;
};

struct ExperimentConfig {
  SystemConfig system;
  train::TrainConfig train;
  ValidateSettings validate;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses JSON text. Missing keys take their defaults; unknown keys, wrong
/// types and invalid values throw ConfigError naming the field (and the
/// line for syntax errors).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const ExperimentConfig& c);
std::string dump_config(const ExperimentConfig& c);

/// 64-bit FNV-1a of the serialized config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

/// Two-photon and one-photon detuning used by the detuned benchmark columns.
inline constexpr double kDetuning = 2.0 * 3.14159265358979323846 * 0.2;

/// The configured system. `detuned` sets delta and the one-photon detuning
/// to kDetuning; ConfigError for systems without detunings.
systems::SystemSpec build_system(const SystemConfig& c, bool detuned = false);

}  // namespace qcpinn::cli
