#pragma once

#include <Eigen/Dense>

#include "qcpinn/systems/density.hpp"

namespace qcpinn::systems {

/// Driven two-level system with absorption and emission.
/// State x = (rho_gg, rho_ee, Re rho_ge, Im rho_ge), control u = xi.
struct TlsParams {
  double omega_x = 1.0;
  double omega_z = 2.0;
  double gamma_abs = 0.1;
  double gamma_em = 0.3;

  double dephasing() const { return 0.5 * (gamma_abs + gamma_em); }
  bool operator==(const TlsParams&) const = default;
};

Eigen::Matrix4d tls_matrix(const TlsParams& p, double xi);

/// H = omega_z sigma_z + omega_x sigma_x + xi sigma_ee in the basis (g, e).
CMatrix tls_hamiltonian(const TlsParams& p, double xi);
std::vector<JumpOperator> tls_jumps(const TlsParams& p);

/// Trace-normalised null vector of tls_matrix(p, xi). Throws DegenerateError
/// when the null space is not one-dimensional.
Eigen::Vector4d tls_steady_state(const TlsParams& p, double xi);

struct ConstantControlOptimum {
  double xi = 0.0;
  double fidelity = 0.0;
};

/// Minimises 1 - F(steady state(xi), rho_d): grid scan over [lo, hi], then
/// golden-section search around the best grid point. Throws
/// OptimizationError if the minimum sits on the scan boundary.
ConstantControlOptimum tls_optimal_constant_control(const TlsParams& p, const CMatrix& rho_d, double lo = -50.0,
                                                    double hi = 50.0);

/// <H> = Tr(H rho) for the packed state.
double tls_energy(const TlsParams& p, double xi, const Eigen::Vector4d& x);

}  // namespace qcpinn::systems
