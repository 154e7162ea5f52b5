#include "qcpinn/systems/nqubit.hpp"

#include <bit>
#include <cmath>

#include "qcpinn/errors.hpp"

namespace qcpinn::systems {

void validate_nqubit(const NQubitParams& p) {
  if (p.qubits < 1 || p.qubits > 10) throw ConfigError("qubit count must be between 1 and 10");
}

Eigen::MatrixXd nqubit_h0(const NQubitParams& p) {
  validate_nqubit(p);
  const int dim = 1 << p.qubits;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    for (int j = 0; j < p.qubits; ++j) h(b ^ (1 << j), b) = -0.5 * p.omega_x;
  }
  return h;
}

Eigen::MatrixXd nqubit_hp(const NQubitParams& p) {
  validate_nqubit(p);
  const int dim = 1 << p.qubits;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    const auto u = static_cast<unsigned>(b);
    double e = p.omega_z * std::popcount(u);
    if (p.interacting) {
      for (int j = 0; j + 1 < p.qubits; ++j) {
        const double sj = (u >> j) & 1u ? -1.0 : 1.0;
        const double sk = (u >> (j + 1)) & 1u ? -1.0 : 1.0;
        e -= p.coupling * sj * sk;
      }
    }
    h(b, b) = e;
  }
  return h;
}

Eigen::MatrixXd nqubit_real_system(const NQubitParams& p, double g0, double gp) {
  const Eigen::MatrixXd h = g0 * nqubit_h0(p) + gp * nqubit_hp(p);
  const Eigen::Index d = h.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  a.topRightCorner(d, d) = h;
  a.bottomLeftCorner(d, d) = -h;
  return a;
}

Eigen::VectorXd nqubit_hp_ground_state(const NQubitParams& p) {
  const Eigen::MatrixXd h = nqubit_hp(p);
  Eigen::Index best = 0;
  h.diagonal().minCoeff(&best);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * h.rows());
  x(best) = 1.0;
  return x;
}

Eigen::VectorXd nqubit_h0_ground_state(const NQubitParams& p) {
  validate_nqubit(p);
  const int dim = 1 << p.qubits;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * dim);
  x.head(dim).setConstant(1.0 / std::sqrt(static_cast<double>(dim)));
  return x;
}

}  // namespace qcpinn::systems
