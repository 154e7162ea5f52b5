#include "qcpinn/systems/tls.hpp"

#include <cmath>

#include "qcpinn/errors.hpp"

namespace qcpinn::systems {

Eigen::Matrix4d tls_matrix(const TlsParams& p, double xi) {
  const double g = p.dephasing();
  const double w = 2.0 * p.omega_z + xi;
  Eigen::Matrix4d a;
  a << -p.gamma_abs, p.gamma_em, 0.0, -2.0 * p.omega_x,
       p.gamma_abs, -p.gamma_em, 0.0, 2.0 * p.omega_x,
       0.0, 0.0, -g, -w,
       p.omega_x, -p.omega_x, w, -g;
  return a;
}

CMatrix tls_hamiltonian(const TlsParams& p, double xi) {
  CMatrix h(2, 2);
  h << -p.omega_z, p.omega_x, p.omega_x, p.omega_z + xi;
  return h;
}

std::vector<JumpOperator> tls_jumps(const TlsParams& p) {
  // absorption |e><g|, emission |g><e|
  return {{ket_bra(2, 1, 0), p.gamma_abs}, {ket_bra(2, 0, 1), p.gamma_em}};
}

Eigen::Vector4d tls_steady_state(const TlsParams& p, double xi) {
  const Eigen::Matrix4d a = tls_matrix(p, xi);
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(a, Eigen::ComputeFullV);
  const Eigen::Vector4d s = svd.singularValues();
  if (s(2) < 1e-12 * std::max(1.0, s(0))) throw DegenerateError("TLS steady state is not unique");
  Eigen::Vector4d v = svd.matrixV().col(3);
  const double tr = v(0) + v(1);
  if (std::abs(tr) < 1e-14) throw DegenerateError("TLS null vector has zero trace");
  return v / tr;
}

double tls_energy(const TlsParams& p, double xi, const Eigen::Vector4d& x) {
  return -p.omega_z * x(0) + (p.omega_z + xi) * x(1) + 2.0 * p.omega_x * x(2);
}

ConstantControlOptimum tls_optimal_constant_control(const TlsParams& p, const CMatrix& rho_d, double lo, double hi) {
  validate_density(rho_d);
  if (rho_d.rows() != 2) throw StateError("target must be a qubit density matrix");
  auto cost = [&](double xi) {
    return 1.0 - fidelity(unpack_density(tls_steady_state(p, xi), 2), rho_d);
  };

  const int steps = 400;
  const double h = (hi - lo) / steps;
  int best = 0;
  double best_cost = cost(lo);
  for (int i = 1; i <= steps; ++i) {
    const double c = cost(lo + i * h);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  if (best == 0 || best == steps) throw OptimizationError("constant-control optimum lies on the search boundary");

  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo + (best - 1) * h;
  double b = lo + (best + 1) * h;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = cost(c);
  double fd = cost(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = cost(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = cost(d);
    }
  }
  const double xi = 0.5 * (a + b);
  return {xi, 1.0 - cost(xi)};
}

}  // namespace qcpinn::systems
