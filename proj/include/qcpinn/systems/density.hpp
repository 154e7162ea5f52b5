#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qcpinn::systems {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Real packing of a d x d Hermitian matrix: the d populations, then for
/// every pair j < k (row-major) Re rho_jk and Im rho_jk. Length d^2.
///
/// For d = 2 in the basis (g, e) this is (rho_gg, rho_ee, Re rho_ge, Im rho_ge);
/// for d = 3 it is (rho11, rho22, rho33, Re rho12, Im rho12, Re rho13, ...).
Eigen::VectorXd pack_density(const CMatrix& rho);
CMatrix unpack_density(const Eigen::VectorXd& x, int dim);

/// Packing without the Hermiticity check (used for generator columns).
Eigen::VectorXd pack_hermitian_part(const CMatrix& rho);

/// d with d^2 == packed length; throws ConfigError otherwise.
int density_dim_for(Eigen::Index packed_size);

/// Index of Re rho_jk (j < k) in the packing; Im is the next slot.
int coherence_slot(int dim, int j, int k);

struct DensityCheck {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
};
DensityCheck inspect_density(const CMatrix& rho);

/// Throws StateError unless Hermitian, unit trace and positive within `tol`.
void validate_density(const CMatrix& rho, double tol = 1e-9);

/// Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2.
double fidelity(const CMatrix& rho, const CMatrix& sigma);

/// 2 |rho_eg| for a qubit.
double coherence(const CMatrix& rho);

struct JumpOperator {
  CMatrix op;
  double rate = 0.0;
};

/// -i[H, rho] + sum_k rate_k (L rho L^dag - {L^dag L, rho}/2)
CMatrix lindblad_rhs(const CMatrix& h, const std::vector<JumpOperator>& jumps, const CMatrix& rho);

/// |j><k| in dimension d.
CMatrix ket_bra(int dim, int j, int k);

}  // namespace qcpinn::systems
