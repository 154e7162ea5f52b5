#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qcpinn::systems {

/// Samples of state, control and state derivative on a time grid. Column j
/// of each matrix belongs to t[j].
struct Trajectory {
  std::vector<double> t;
  Eigen::MatrixXd x;
  Eigen::MatrixXd u;
  Eigen::MatrixXd x_rate;

  std::size_t size() const { return t.size(); }
};

}  // namespace qcpinn::systems
