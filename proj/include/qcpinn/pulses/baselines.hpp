#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcpinn/validate/control.hpp"

namespace qcpinn::pulses {

enum class Protocol { Stirap, InverseEngineering, Stirep, ModSatd, SaStirap };

std::string protocol_name(Protocol p);
/// Throws ConfigError for an unknown name.
Protocol protocol_from_name(const std::string& name);

/// Pump and Stokes fields (and the |1>-|2> field for SA-STIRAP) on [t_start, t_end].
struct PulseSequence {
  Protocol protocol = Protocol::Stirap;
  std::map<std::string, double> params;
  std::function<double(double)> omega_p;
  std::function<double(double)> omega_s;
  std::function<double(double)> omega_a;  // empty unless SA-STIRAP
  double t_start = 0.0;
  double t_end = 1.0;

  double max_amplitude(std::size_t samples = 10000) const;
  /// Two-channel control (Omega_p, Omega_s) for the Lambda system.
  validate::ControlFunction control() const;
  /// CSV with header t,omega_p,omega_s[,omega_a].
  std::string to_csv(std::size_t samples) const;
};

// STIRAP: Gaussian pair, Stokes centred t_d/2 before and pump t_d/2 after `centre`.
struct StirapParams {
  double omega0 = 8.0;
  double sigma = 4.0;
  double t_d = 4.8;
  double centre = 17.5;
  double duration = 35.0;
};
std::array<double, 2> stirap_fields(const StirapParams& p, double t);
/// tan(theta) = Omega_p / Omega_s
double stirap_mixing_angle(const StirapParams& p, double t);
PulseSequence stirap_pulses(const StirapParams& p);

// Inverse engineering through the invariant angles gamma(t), beta(t).
struct InverseEngineeringParams {
  int ansatz = 2;
  double epsilon = 0.02;
  double delta = 3.14159265358979323846 / 10.0;
  double t_f = 3.0;
  double d0 = 1.8;  // ansatz 3
  double d1 = 0.1;  // ansatz 3
  double period = 1.0;  // ansatz 3 (T)
};

struct AngleTrajectory {
  double gamma = 0.0;
  double gamma_rate = 0.0;
  double beta = 0.0;
  double beta_rate = 0.0;
};

/// Polynomial coefficients (lowest order first) of gamma (quartic) and beta
/// (cubic) for ansatz 2. Throws ConfigError if the conditions are singular.
struct Ansatz2Coefficients {
  std::array<double, 5> gamma;
  std::array<double, 4> beta;
};
Ansatz2Coefficients ansatz2_coefficients(double epsilon, double delta, double t_f);

AngleTrajectory inverse_engineering_angles(const InverseEngineeringParams& p, double t);
/// Omega_s = 2(beta' cot gamma cos beta - gamma' sin beta),
/// Omega_p = 2(beta' cot gamma sin beta + gamma' cos beta). Returns (Omega_p, Omega_s).
std::array<double, 2> inverse_engineering_fields(const InverseEngineeringParams& p, double t);
PulseSequence inverse_engineering_pulses(const InverseEngineeringParams& p);

// STIREP: area-optimal trajectory phi(eta) from the Euler-Lagrange equation
// with Lagrange multipliers, mapped to fields through a linear clock
// eta = clock_rate * t.
struct StirepParams {
  double lambda0 = 0.394;
  double lambda1 = -0.064;
  double lambda2 = 0.283;
  double phi0 = 0.0;
  double clock_rate = 1.0;
  double step = 1e-4;  // eta step of the pre-solve
};

struct StirepSample {
  double eta;
  double phi;
  double phi_rate;  // d phi / d eta
  double theta;
};

/// Right-hand side (phi', phi'') of the trajectory equation.
std::array<double, 2> stirep_trajectory_rhs(const StirepParams& p, double eta, double phi, double phi_rate);

/// Integrates (phi, phi', theta) with RK4 from eta = 0 (phi' = 0, theta = pi/2)
/// for `eta_end`, or until theta first drops to `theta_stop`. Throws
/// IntegrationError if phi leaves (-pi/2, pi/2).
std::vector<StirepSample> stirep_trajectory(const StirepParams& p, double eta_end, double theta_stop = -1.0);

/// Pre-solved symmetric trajectory: first half until theta = pi/4, second
/// half mirrored. Evaluation uses cubic Hermite interpolation.
class StirepSolution {
 public:
  explicit StirepSolution(const StirepParams& p);

  double eta_end() const { return 2.0 * eta_mid_; }
  double duration() const { return eta_end() / params_.clock_rate; }
  StirepSample at_eta(double eta) const;
  /// (Omega_p, Omega_s) at lab time t.
  std::array<double, 2> fields(double t) const;

 private:
  StirepParams params_;
  double eta_mid_ = 0.0;
  std::vector<StirepSample> half_;
  std::vector<double> phi_acc_;  // d^2 phi / d eta^2 at the samples
};

PulseSequence stirep_pulses(const StirepParams& p);

// MOD-SATD: Gaussian STIRAP fields with superadiabatic corrections g_x, g_z.
struct ModSatdParams {
  double omega0 = 2.0 * 3.14159265358979323846;
  double sigma = 2.0;  // also sigma_m
  double amplitude = 1.0 / 40.0;
  double t_d = 2.4;
  double half_window = 6.5;  // lab time t = centre time + half_window
  bool corrections = true;
};

struct ModSatdTerms {
  double theta, theta_rate, omega, g, mu, g_x, g_z;
};
/// Terms at centred time s (pulse centre at s = 0).
ModSatdTerms modsatd_terms(const ModSatdParams& p, double s);
std::array<double, 2> modsatd_fields(const ModSatdParams& p, double t);
PulseSequence modsatd_pulses(const ModSatdParams& p);

// SA-STIRAP: sin^4 pulses plus Omega_a = 2 dtheta/dt on |1>-|2>.
struct SaStirapParams {
  double omega0 = 2.0 * 3.14159265358979323846;
  double period = 4.0;
  double tau = 0.4;
};
std::array<double, 3> sastirap_fields(const SaStirapParams& p, double t);
PulseSequence sastirap_pulses(const SaStirapParams& p);

inline constexpr double kBenchmarkCap = 10.0;

/// Clamps every field of `s` to [-cap, cap].
PulseSequence saturate(PulseSequence s, double cap);

/// Benchmark presets, saturated at kBenchmarkCap. STIREP runs its clock at
/// rate 5 here.
PulseSequence benchmark_preset(Protocol p);

}  // namespace qcpinn::pulses
