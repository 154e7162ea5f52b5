#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcpinn/systems/system.hpp"
#include "qcpinn/systems/trajectory.hpp"
#include "qcpinn/validate/control.hpp"

namespace qcpinn::validate {

/// Classical RK4 with fixed step; the control is sampled at t, t + dt/2 and
/// t + dt of every step. The returned trajectory holds every step, with
/// x_rate = f(x, u) at the samples. Throws IntegrationError on blow-up.
systems::Trajectory rk4_integrate(const systems::SystemSpec& system, const ControlFunction& control,
                                  const Eigen::VectorXd& x0, double t_start, double t_end, double dt);

/// Same scheme for an arbitrary autonomous-in-control RHS f(t, x).
systems::Trajectory rk4_integrate(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& rhs,
                                  const Eigen::VectorXd& x0, double t_start, double t_end, double dt);

/// Composite Simpson integral of sqrt(Omega_p^2 + Omega_s^2) over [t_start, t_f]
/// (channels 0 and 1 of the control), step close to dt.
double pulse_area(const ControlFunction& control, double t_f, double dt, double t_start = 0.0);

/// Earliest sample time at which population `index` is maximal.
double transfer_time(const systems::Trajectory& traj, const systems::SystemSpec& system, int index);
double transfer_time(std::span<const double> t, std::span<const double> population);

struct EnergySeries {
  std::vector<double> t;
  std::vector<double> work;
  std::vector<double> heat;
  std::vector<std::optional<double>> ratio;  // |W/Q|, empty while |Q| < 1e-12
};

/// W(t) = int xi'(tau) rho_ee dtau and Q(t) = int Tr(H rho') dtau by
/// cumulative trapezoids along a TLS trajectory (control channel 0 = xi).
EnergySeries work_heat(const systems::Trajectory& traj, const ControlFunction& xi, const systems::TlsParams& params,
                       double dt);

/// Eff = 1 - int_{eta>1} (eta - 1) / int eta over the defined samples.
double efficiency(std::span<const std::optional<double>> eta, std::span<const double> t);

struct MetricsRecord {
  std::string system;
  std::string control_source;
  double p2 = 0.0;
  double area = 0.0;
  double t_f = 0.0;
  double final_fidelity = 0.0;
  double final_expectation = 0.0;  // <H_p> for state-vector systems
  std::vector<double> fidelity_t;
  std::vector<double> fidelity;
  std::optional<EnergySeries> energy;
  std::optional<double> eff;
};

struct ValidationOptions {
  double t_start = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  std::size_t fidelity_stride = 10;  // keep every k-th sample of the fidelity series
  bool energy = false;               // TLS only
};

struct Validation {
  systems::Trajectory trajectory;
  MetricsRecord metrics;
};

/// Integrates `system` under `control` from its x0 and derives every metric
/// that applies: p2 / area / t_f for population targets, fidelity for
/// density targets and state-vector targets, and the energy suite for the TLS.
Validation validate_control(const systems::SystemSpec& system, const ControlFunction& control,
                            const ValidationOptions& options);

/// Fidelity of a packed state with the system's reference target state.
double target_fidelity(const systems::SystemSpec& system, const Eigen::VectorXd& x);

std::string metrics_json(const MetricsRecord& m);
/// t, state components, controls, populations, coherence, fidelity; every
/// `stride`-th sample.
std::string trajectory_csv(const systems::SystemSpec& system, const systems::Trajectory& traj, std::size_t stride = 1);
std::string energy_csv(const EnergySeries& e, std::size_t stride = 1);

}  // namespace qcpinn::validate
