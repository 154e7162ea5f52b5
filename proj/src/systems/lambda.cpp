#include "qcpinn/systems/lambda.hpp"

#include <cmath>

#include "qcpinn/errors.hpp"

namespace qcpinn::systems {

CMatrix lambda3_hamiltonian(const LambdaParams& p, double omega_p, double omega_s) {
  CMatrix h = CMatrix::Zero(3, 3);
  h(1, 1) = p.delta;
  h(2, 2) = p.Delta1;
  h(2, 0) = h(0, 2) = 0.5 * omega_p;
  h(2, 1) = h(1, 2) = 0.5 * omega_s;
  return h;
}

std::vector<JumpOperator> dephasing_jumps(std::span<const double> gammas) {
  const auto d = static_cast<int>(gammas.size());
  std::vector<JumpOperator> jumps;
  for (int i = 0; i < d; ++i) jumps.push_back({ket_bra(d, i, i), 2.0 * gammas[static_cast<std::size_t>(i)]});
  return jumps;
}

CMatrix lambda4_hamiltonian(const FourLevelParams& p, double omega_p, double omega_s) {
  CMatrix h = CMatrix::Zero(4, 4);
  h(1, 1) = p.delta;
  h(2, 2) = p.Delta3;
  h(3, 3) = p.Delta4;
  h(0, 2) = h(2, 0) = 0.5 * omega_p;
  h(0, 3) = h(3, 0) = 0.5 * omega_p;
  h(1, 2) = h(2, 1) = 0.5 * omega_s;
  h(1, 3) = h(3, 1) = -0.5 * omega_s;
  return h;
}

std::vector<JumpOperator> lambda4_jumps(const FourLevelParams& p) {
  const std::array<double, 4> g{p.gamma1, p.gamma2, p.gamma3, p.gamma4};
  return dephasing_jumps(g);
}

Eigen::VectorXd lambda4_rhs(const Eigen::VectorXd& state, double omega_p, double omega_s, const FourLevelParams& p) {
  if (state.size() != 16) throw ConfigError("four-level state must have 16 components");
  const CMatrix rho = unpack_density(state, 4);
  if (std::abs(rho.trace().real() - 1.0) > 1e-6) throw StateError("four-level state trace differs from 1");
  return pack_hermitian_part(lindblad_rhs(lambda4_hamiltonian(p, omega_p, omega_s), lambda4_jumps(p), rho));
}

Eigen::VectorXd lambda_epsilon_state(double eps) {
  CMatrix rho = CMatrix::Zero(3, 3);
  rho(0, 0) = rho(1, 1) = 0.5;
  rho(0, 1) = rho(1, 0) = 0.5 * eps;
  validate_density(rho);
  return pack_density(rho);
}

}  // namespace qcpinn::systems
