#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>

#include "qcpinn/systems/density.hpp"

namespace qcpinn::systems {

/// Three-level Lambda system, levels |1>, |2> (ground-like) and |3> (lossy).
struct LambdaParams {
  double delta = 0.0;   // two-photon detuning
  double Delta1 = 0.0;  // one-photon detuning
  double gamma1 = 1e-3;
  double gamma2 = 1e-3;
  double gamma3 = 0.14;

  bool operator==(const LambdaParams&) const = default;
};

/// H = delta s22 + Delta1 s33 + (Omega_p/2 s31 + Omega_s/2 s32 + h.c.)
CMatrix lambda3_hamiltonian(const LambdaParams& p, double omega_p, double omega_s);

/// Pure dephasing gamma_i (2 s_ii rho s_ii - s_ii rho - rho s_ii), i.e. jump
/// s_ii at rate 2 gamma_i.
std::vector<JumpOperator> dephasing_jumps(std::span<const double> gammas);

/// z' for z = (rho11, rho22, rho33, Re rho12, Im rho12, Re rho13, Im rho13,
/// Re rho23, Im rho23).
template <typename T>
std::array<T, 9> lambda3_rhs(std::span<const T> z, T op, T os, const LambdaParams& p) {
  const T hp = T(0.5) * op;
  const T hs = T(0.5) * os;
  const T g12(p.gamma1 + p.gamma2);
  const T g13(p.gamma1 + p.gamma3);
  const T g23(p.gamma2 + p.gamma3);
  const T d(p.delta);
  const T d1(p.Delta1);
  return {
      -op * z[6],
      -os * z[8],
      op * z[6] + os * z[8],
      -d * z[4] - g12 * z[3] - hp * z[8] - hs * z[6],
      d * z[3] - g12 * z[4] - hp * z[7] + hs * z[5],
      -d1 * z[6] - g13 * z[5] - hs * z[4],
      d1 * z[5] - g13 * z[6] - hp * z[2] + hp * z[0] + hs * z[3],
      (d - d1) * z[8] - g23 * z[7] + hp * z[4],
      (d1 - d) * z[7] - g23 * z[8] + hp * z[3] + hs * z[1] - hs * z[2],
  };
}

/// Four-level extension with a spectator level |4>.
struct FourLevelParams {
  double delta = 0.0;
  double Delta3 = 0.0;
  double Delta4 = 6.79;
  double gamma1 = 1e-3;
  double gamma2 = 1e-3;
  double gamma3 = 0.14;
  double gamma4 = 1e-3;

  bool operator==(const FourLevelParams&) const = default;
};

/// H = delta s22 + Delta3 s33 + Delta4 s44 + Omega_p/2 (s13 + s14)
///     + Omega_s/2 (s23 - s24) + h.c.
CMatrix lambda4_hamiltonian(const FourLevelParams& p, double omega_p, double omega_s);
std::vector<JumpOperator> lambda4_jumps(const FourLevelParams& p);

/// Lindblad right-hand side on the 16-component packing, computed on the
/// complex matrix and repacked. Throws StateError if the trace is off by
/// more than 1e-6.
Eigen::VectorXd lambda4_rhs(const Eigen::VectorXd& state, double omega_p, double omega_s, const FourLevelParams& p);

/// rho(0) = s11/2 + s22/2 + eps (s12 + s21)/2 for the Lambda system.
Eigen::VectorXd lambda_epsilon_state(double eps);

}  // namespace qcpinn::systems
