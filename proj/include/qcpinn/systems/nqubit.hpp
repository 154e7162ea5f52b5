#pragma once

#include <Eigen/Dense>

namespace qcpinn::systems {

/// Chain of N spin-1/2 qubits. Basis index bit j set means qubit j is down
/// (sigma_z = -1).
struct NQubitParams {
  int qubits = 5;
  bool interacting = false;
  double omega_x = 1.0;
  double omega_z = 1.0;  // omega_f when interacting
  double coupling = 0.25;

  bool operator==(const NQubitParams&) const = default;
};

/// H0 = -(omega_x/2) sum_j sigma_x,j
Eigen::MatrixXd nqubit_h0(const NQubitParams& p);

/// H_p = (omega_z/2) sum_j (1 - sigma_z,j) [- J sum_j sigma_z,j sigma_z,j+1]
Eigen::MatrixXd nqubit_hp(const NQubitParams& p);

/// Real dynamical matrix [[H^I, H^R], [-H^R, H^I]] for H = g0 H0 + gp Hp
/// acting on (Re psi, Im psi).
Eigen::MatrixXd nqubit_real_system(const NQubitParams& p, double g0, double gp);

/// Ground state of H_p (a basis state) and ground state of H0 (|+>^N).
Eigen::VectorXd nqubit_hp_ground_state(const NQubitParams& p);
Eigen::VectorXd nqubit_h0_ground_state(const NQubitParams& p);

/// Throws ConfigError unless 1 <= N <= 10.
void validate_nqubit(const NQubitParams& p);

}  // namespace qcpinn::systems
