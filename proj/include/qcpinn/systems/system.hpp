#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qcpinn/systems/generator.hpp"
#include "qcpinn/systems/lambda.hpp"
#include "qcpinn/systems/nqubit.hpp"
#include "qcpinn/systems/tls.hpp"

namespace qcpinn::systems {

struct TargetSpec {
  enum class Kind { StateVector, PopulationIndex, ExpectationMin };
  Kind kind = Kind::StateVector;
  Eigen::VectorXd state;  // x_d, or the reference state used for fidelity reporting
  int index = -1;         // PopulationIndex
  std::vector<MatrixEntry> observable;  // ExpectationMin: x^T O x on the packed state

  static TargetSpec state_vector(Eigen::VectorXd x_d);
  static TargetSpec population(int index);
  static TargetSpec expectation(const Eigen::MatrixXd& observable, Eigen::VectorXd reference);

  template <typename T>
  T expectation_value(std::span<const T> x) const {
    T s(0.0);
    for (const auto& e : observable) {
      s = s + T(e.value) * x[static_cast<std::size_t>(e.row)] * x[static_cast<std::size_t>(e.col)];
    }
    return s;
  }
};

/// One squared penalty (sum_i a_i x_i + sum_k b_k u_k + offset)^2.
struct ConstraintTerm {
  std::string label;
  std::vector<std::pair<int, double>> state;
  std::vector<std::pair<int, double>> control;
  double offset = 0.0;

  template <typename T>
  T residual(std::span<const T> x, std::span<const T> u) const {
    T r(offset);
    for (const auto& [i, a] : state) r = r + T(a) * x[static_cast<std::size_t>(i)];
    for (const auto& [k, b] : control) r = r + T(b) * u[static_cast<std::size_t>(k)];
    return r;
  }
};

using SystemParams = std::variant<TlsParams, LambdaParams, FourLevelParams, NQubitParams>;

/// A controlled system x' = A(lambda, u) x with its initial condition,
/// target and trace/constraint penalties.
struct SystemSpec {
  std::string name;
  SystemParams params;
  Eigen::VectorXd x0;
  Eigen::VectorXd u0;
  TargetSpec target;
  std::vector<ConstraintTerm> constraints;
  std::vector<std::string> control_names;
  BilinearGenerator generator;
  int density_dim = 0;  // 0 for state-vector systems

  int n() const { return generator.state_dim(); }
  int m() const { return generator.control_dim(); }
  bool is_density() const { return density_dim > 0; }

  template <typename T>
  void rhs(std::span<const T> x, std::span<const T> u, std::span<T> out) const {
    generator.apply<T>(x, u, out);
  }
  Eigen::VectorXd rhs(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const { return generator.apply(x, u); }

  /// Population of level i (density systems) or |amplitude|^2 otherwise.
  double population(const Eigen::VectorXd& x, int i) const;
};

/// Real generator of a Lindblad equation with H = H_0 + sum_k u_k H_k,
/// obtained by applying the complex right-hand side to every basis element
/// of the packing.
BilinearGenerator lindblad_generator(const CMatrix& h0, const std::vector<CMatrix>& hk,
                                     const std::vector<JumpOperator>& jumps);

using ParamOverrides = std::map<std::string, double>;

TlsParams tls_params(const ParamOverrides& overrides);
LambdaParams lambda_params(const ParamOverrides& overrides);
FourLevelParams four_level_params(const ParamOverrides& overrides);
NQubitParams nqubit_params(int qubits, bool interacting, const ParamOverrides& overrides);

ParamOverrides to_overrides(const SystemParams& params);

/// Ground state initially, target rho_d = I/2, no separate constraints.
SystemSpec make_tls(const TlsParams& p);
/// rho(0) = s11, target population of |2>, penalties on rho11 and rho33.
SystemSpec make_lambda3(const LambdaParams& p);
/// As the Lambda system plus a penalty on rho44.
SystemSpec make_lambda4(const FourLevelParams& p);
/// psi(0) = |+>^N, u0 = (g0, gp) = (1, 0), target min <H_p>. With
/// `tied`, adds the penalty (g0 + gp - 1)^2.
SystemSpec make_nqubit(const NQubitParams& p, bool tied);

/// Same system with a different packed initial state (validated).
SystemSpec with_initial_state(SystemSpec spec, const Eigen::VectorXd& x0);

}  // namespace qcpinn::systems
