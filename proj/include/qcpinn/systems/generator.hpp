#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace qcpinn::systems {

struct MatrixEntry {
  int row;
  int col;
  double value;
};

/// Sparse real generator of a bilinear system x' = (A_0 + sum_k u_k A_k) x.
/// Evaluation is templated so the same code runs on doubles, dual numbers
/// and tape variables.
class BilinearGenerator {
 public:
  BilinearGenerator() = default;
  BilinearGenerator(const Eigen::MatrixXd& drift, const std::vector<Eigen::MatrixXd>& control);

  int state_dim() const { return n_; }
  int control_dim() const { return static_cast<int>(control_.size()); }
  const std::vector<MatrixEntry>& drift() const { return drift_; }
  const std::vector<MatrixEntry>& control(int k) const { return control_[static_cast<std::size_t>(k)]; }

  /// Dense A(u).
  Eigen::MatrixXd matrix(const Eigen::VectorXd& u) const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;

  template <typename T>
  void apply(std::span<const T> x, std::span<const T> u, std::span<T> out) const;

 private:
  int n_ = 0;
  std::vector<MatrixEntry> drift_;
  std::vector<std::vector<MatrixEntry>> control_;
};

template <typename T>
void BilinearGenerator::apply(std::span<const T> x, std::span<const T> u, std::span<T> out) const {
  const auto n = static_cast<std::size_t>(n_);
  std::vector<char> touched(n, 0);
  auto accumulate = [](T& slot, char& flag, T term) {
    if (flag) {
      slot = slot + term;
    } else {
      slot = term;
      flag = 1;
    }
  };
  for (const auto& e : drift_) {
    const auto r = static_cast<std::size_t>(e.row);
    accumulate(out[r], touched[r], T(e.value) * x[static_cast<std::size_t>(e.col)]);
  }
  std::vector<T> y(n);
  std::vector<char> y_touched(n);
  for (std::size_t k = 0; k < control_.size(); ++k) {
    std::fill(y_touched.begin(), y_touched.end(), 0);
    for (const auto& e : control_[k]) {
      const auto r = static_cast<std::size_t>(e.row);
      const T term = e.value == 1.0 ? x[static_cast<std::size_t>(e.col)] : T(e.value) * x[static_cast<std::size_t>(e.col)];
      accumulate(y[r], y_touched[r], term);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (y_touched[r]) accumulate(out[r], touched[r], u[k] * y[r]);
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (!touched[r]) out[r] = T(0.0);
  }
}

}  // namespace qcpinn::systems
