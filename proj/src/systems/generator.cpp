#include "qcpinn/systems/generator.hpp"

#include <cmath>

#include "qcpinn/errors.hpp"

namespace qcpinn::systems {

namespace {

std::vector<MatrixEntry> entries(const Eigen::MatrixXd& a) {
  std::vector<MatrixEntry> out;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      // Generators built from complex arithmetic carry rounding dust.
      if (std::abs(a(r, c)) > 1e-14 * scale) out.push_back({static_cast<int>(r), static_cast<int>(c), a(r, c)});
    }
  }
  return out;
}

}  // namespace

BilinearGenerator::BilinearGenerator(const Eigen::MatrixXd& drift, const std::vector<Eigen::MatrixXd>& control)
    : n_(static_cast<int>(drift.rows())), drift_(entries(drift)) {
  if (drift.rows() != drift.cols()) throw ConfigError("generator drift must be square");
  for (const auto& a : control) {
    if (a.rows() != drift.rows() || a.cols() != drift.cols()) throw ConfigError("generator control shape mismatch");
    control_.push_back(entries(a));
  }
}

Eigen::MatrixXd BilinearGenerator::matrix(const Eigen::VectorXd& u) const {
  if (u.size() != control_dim()) throw ConfigError("control vector has the wrong length");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& e : drift_) a(e.row, e.col) += e.value;
  for (std::size_t k = 0; k < control_.size(); ++k) {
    for (const auto& e : control_[k]) a(e.row, e.col) += u(static_cast<Eigen::Index>(k)) * e.value;
  }
  return a;
}

Eigen::VectorXd BilinearGenerator::apply(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (x.size() != n_ || u.size() != control_dim()) throw ConfigError("state or control vector has the wrong length");
  Eigen::VectorXd out(n_);
  apply<double>(std::span<const double>(x.data(), static_cast<std::size_t>(n_)),
                std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
                std::span<double>(out.data(), static_cast<std::size_t>(n_)));
  return out;
}

}  // namespace qcpinn::systems
