#include "qcpinn/systems/density.hpp"

#include <algorithm>
#include <cmath>

#include "qcpinn/errors.hpp"

namespace qcpinn::systems {

int density_dim_for(Eigen::Index packed_size) {
  const auto d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(packed_size))));
  if (d < 1 || static_cast<Eigen::Index>(d) * d != packed_size) {
    throw ConfigError("packed density vector length " + std::to_string(packed_size) + " is not a square");
  }
  return d;
}

int coherence_slot(int dim, int j, int k) {
  // pairs before row j: sum_{r<j} (dim - 1 - r)
  const int before = j * (dim - 1) - j * (j - 1) / 2;
  return dim + 2 * (before + (k - j - 1));
}

Eigen::VectorXd pack_hermitian_part(const CMatrix& rho) {
  const auto d = static_cast<int>(rho.rows());
  Eigen::VectorXd x(d * d);
  for (int i = 0; i < d; ++i) x(i) = rho(i, i).real();
  int s = d;
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      const Complex c = 0.5 * (rho(j, k) + std::conj(rho(k, j)));
      x(s++) = c.real();
      x(s++) = c.imag();
    }
  }
  return x;
}

Eigen::VectorXd pack_density(const CMatrix& rho) {
  if (rho.rows() != rho.cols()) throw StateError("density matrix must be square");
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw StateError("density matrix is not Hermitian");
  return pack_hermitian_part(rho);
}

CMatrix unpack_density(const Eigen::VectorXd& x, int dim) {
  if (x.size() != static_cast<Eigen::Index>(dim) * dim) throw ConfigError("packed length does not match dimension");
  CMatrix rho = CMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) rho(i, i) = x(i);
  int s = dim;
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      const Complex c(x(s), x(s + 1));
      s += 2;
      rho(j, k) = c;
      rho(k, j) = std::conj(c);
    }
  }
  return rho;
}

DensityCheck inspect_density(const CMatrix& rho) {
  DensityCheck c;
  c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  c.trace_error = std::abs(rho.trace() - Complex(1.0));
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  return c;
}

void validate_density(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols()) throw StateError("density matrix must be square");
  const DensityCheck c = inspect_density(rho);
  if (c.hermiticity_error > tol) throw StateError("density matrix is not Hermitian");
  if (c.trace_error > tol) throw StateError("density matrix trace differs from 1");
  if (c.min_eigenvalue < -tol) throw StateError("density matrix has a negative eigenvalue");
}

namespace {

CMatrix psd_sqrt(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-9) throw StateError("negative eigenvalue in fidelity argument");
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const CMatrix& rho, const CMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) throw StateError("fidelity: dimension mismatch");
  const CMatrix s = psd_sqrt(rho);
  const CMatrix inner = s * sigma * s;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  double tr = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev < -1e-9) throw StateError("negative eigenvalue in fidelity argument");
    tr += std::sqrt(std::max(ev, 0.0));
  }
  return std::clamp(tr * tr, 0.0, 1.0);
}

double coherence(const CMatrix& rho) {
  if (rho.rows() != 2) throw StateError("coherence is defined for a qubit");
  return 2.0 * std::abs(rho(1, 0));
}

CMatrix lindblad_rhs(const CMatrix& h, const std::vector<JumpOperator>& jumps, const CMatrix& rho) {
  const Complex i(0.0, 1.0);
  CMatrix out = -i * (h * rho - rho * h);
  for (const auto& j : jumps) {
    const CMatrix ld = j.op.adjoint();
    const CMatrix ldl = ld * j.op;
    out += j.rate * (j.op * rho * ld - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

CMatrix ket_bra(int dim, int j, int k) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(j, k) = 1.0;
  return m;
}

}  // namespace qcpinn::systems
