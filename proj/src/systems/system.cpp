#include "qcpinn/systems/system.hpp"

#include <cmath>

#include "qcpinn/errors.hpp"

namespace qcpinn::systems {

TargetSpec TargetSpec::state_vector(Eigen::VectorXd x_d) {
  TargetSpec t;
  t.kind = Kind::StateVector;
  t.state = std::move(x_d);
  return t;
}

TargetSpec TargetSpec::population(int index) {
  TargetSpec t;
  t.kind = Kind::PopulationIndex;
  t.index = index;
  return t;
}

TargetSpec TargetSpec::expectation(const Eigen::MatrixXd& observable, Eigen::VectorXd reference) {
  if (!observable.isApprox(observable.transpose())) throw ConfigError("observable must be symmetric");
  TargetSpec t;
  t.kind = Kind::ExpectationMin;
  t.state = std::move(reference);
  for (Eigen::Index r = 0; r < observable.rows(); ++r) {
    for (Eigen::Index c = 0; c < observable.cols(); ++c) {
      if (observable(r, c) != 0.0) t.observable.push_back({static_cast<int>(r), static_cast<int>(c), observable(r, c)});
    }
  }
  return t;
}

double SystemSpec::population(const Eigen::VectorXd& x, int i) const {
  if (is_density()) return x(i);
  const Eigen::Index d = x.size() / 2;
  return x(i) * x(i) + x(d + i) * x(d + i);
}

BilinearGenerator lindblad_generator(const CMatrix& h0, const std::vector<CMatrix>& hk,
                                     const std::vector<JumpOperator>& jumps) {
  const auto d = static_cast<int>(h0.rows());
  const int n = d * d;
  auto build = [&](const CMatrix& h, const std::vector<JumpOperator>& js) {
    Eigen::MatrixXd a(n, n);
    for (int c = 0; c < n; ++c) {
      const CMatrix basis = unpack_density(Eigen::VectorXd::Unit(n, c), d);
      a.col(c) = pack_hermitian_part(lindblad_rhs(h, js, basis));
    }
    return a;
  };
  std::vector<Eigen::MatrixXd> control;
  for (const auto& h : hk) control.push_back(build(h, {}));
  return BilinearGenerator(build(h0, jumps), control);
}

namespace {

void apply_override(const ParamOverrides& o, const std::map<std::string, double*>& slots) {
  for (const auto& [key, value] : o) {
    const auto it = slots.find(key);
    if (it == slots.end()) throw ConfigError("unknown system parameter '" + key + "'");
    if (!std::isfinite(value)) throw ConfigError("system parameter '" + key + "' must be finite");
    *it->second = value;
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0)) throw ConfigError(std::string(name) + " must be >= 0");
}

}  // namespace

TlsParams tls_params(const ParamOverrides& overrides) {
  TlsParams p;
  apply_override(overrides, {{"omega_x", &p.omega_x},
                             {"omega_z", &p.omega_z},
                             {"gamma_abs", &p.gamma_abs},
                             {"gamma_em", &p.gamma_em}});
  require_nonnegative(p.gamma_abs, "gamma_abs");
  require_nonnegative(p.gamma_em, "gamma_em");
  return p;
}

LambdaParams lambda_params(const ParamOverrides& overrides) {
  LambdaParams p;
  apply_override(overrides, {{"delta", &p.delta},
                             {"Delta1", &p.Delta1},
                             {"gamma1", &p.gamma1},
                             {"gamma2", &p.gamma2},
                             {"gamma3", &p.gamma3}});
  require_nonnegative(p.gamma1, "gamma1");
  require_nonnegative(p.gamma2, "gamma2");
  require_nonnegative(p.gamma3, "gamma3");
  return p;
}

FourLevelParams four_level_params(const ParamOverrides& overrides) {
  FourLevelParams p;
  apply_override(overrides, {{"delta", &p.delta},
                             {"Delta3", &p.Delta3},
                             {"Delta4", &p.Delta4},
                             {"gamma1", &p.gamma1},
                             {"gamma2", &p.gamma2},
                             {"gamma3", &p.gamma3},
                             {"gamma4", &p.gamma4}});
  return p;
}

NQubitParams nqubit_params(int qubits, bool interacting, const ParamOverrides& overrides) {
  NQubitParams p;
  p.qubits = qubits;
  p.interacting = interacting;
  if (interacting) {
    apply_override(overrides, {{"omega_x", &p.omega_x}, {"omega_f", &p.omega_z}, {"J", &p.coupling}});
  } else {
    apply_override(overrides, {{"omega_x", &p.omega_x}, {"omega_z", &p.omega_z}});
  }
  validate_nqubit(p);
  return p;
}

ParamOverrides to_overrides(const SystemParams& params) {
  struct Visitor {
    ParamOverrides operator()(const TlsParams& p) const {
      return {{"omega_x", p.omega_x}, {"omega_z", p.omega_z}, {"gamma_abs", p.gamma_abs}, {"gamma_em", p.gamma_em}};
    }
    ParamOverrides operator()(const LambdaParams& p) const {
      return {{"delta", p.delta}, {"Delta1", p.Delta1}, {"gamma1", p.gamma1}, {"gamma2", p.gamma2},
              {"gamma3", p.gamma3}};
    }
    ParamOverrides operator()(const FourLevelParams& p) const {
      return {{"delta", p.delta},   {"Delta3", p.Delta3}, {"Delta4", p.Delta4}, {"gamma1", p.gamma1},
              {"gamma2", p.gamma2}, {"gamma3", p.gamma3}, {"gamma4", p.gamma4}};
    }
    ParamOverrides operator()(const NQubitParams& p) const {
      if (p.interacting) return {{"omega_x", p.omega_x}, {"omega_f", p.omega_z}, {"J", p.coupling}};
      return {{"omega_x", p.omega_x}, {"omega_z", p.omega_z}};
    }
  };
  return std::visit(Visitor{}, params);
}

SystemSpec make_tls(const TlsParams& p) {
  SystemSpec s;
  s.name = "tls";
  s.params = p;
  s.density_dim = 2;
  CMatrix sigma_ee = ket_bra(2, 1, 1);
  s.generator = lindblad_generator(tls_hamiltonian(p, 0.0), {sigma_ee}, tls_jumps(p));
  s.x0 = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
  s.u0 = Eigen::VectorXd::Zero(1);
  s.target = TargetSpec::state_vector(Eigen::Vector4d(0.5, 0.5, 0.0, 0.0));
  s.control_names = {"xi"};
  return s;
}

SystemSpec make_lambda3(const LambdaParams& p) {
  SystemSpec s;
  s.name = "lambda3";
  s.params = p;
  s.density_dim = 3;
  const CMatrix hp = 0.5 * (ket_bra(3, 2, 0) + ket_bra(3, 0, 2));
  const CMatrix hs = 0.5 * (ket_bra(3, 2, 1) + ket_bra(3, 1, 2));
  const std::array<double, 3> g{p.gamma1, p.gamma2, p.gamma3};
  s.generator = lindblad_generator(lambda3_hamiltonian(p, 0.0, 0.0), {hp, hs}, dephasing_jumps(g));
  s.x0 = Eigen::VectorXd::Unit(9, 0);
  s.u0 = Eigen::VectorXd::Zero(2);
  s.target = TargetSpec::population(1);
  s.constraints = {{"rho11", {{0, 1.0}}, {}, 0.0}, {"rho33", {{2, 1.0}}, {}, 0.0}};
  s.control_names = {"omega_p", "omega_s"};
  return s;
}

SystemSpec make_lambda4(const FourLevelParams& p) {
  SystemSpec s;
  s.name = "lambda4";
  s.params = p;
  s.density_dim = 4;
  const CMatrix hp = lambda4_hamiltonian(FourLevelParams{0, 0, 0, 0, 0, 0, 0}, 1.0, 0.0);
  const CMatrix hs = lambda4_hamiltonian(FourLevelParams{0, 0, 0, 0, 0, 0, 0}, 0.0, 1.0);
  s.generator = lindblad_generator(lambda4_hamiltonian(p, 0.0, 0.0), {hp, hs}, lambda4_jumps(p));
  s.x0 = Eigen::VectorXd::Unit(16, 0);
  s.u0 = Eigen::VectorXd::Zero(2);
  s.target = TargetSpec::population(1);
  s.constraints = {{"rho11", {{0, 1.0}}, {}, 0.0}, {"rho33", {{2, 1.0}}, {}, 0.0}, {"rho44", {{3, 1.0}}, {}, 0.0}};
  s.control_names = {"omega_p", "omega_s"};
  return s;
}

SystemSpec make_nqubit(const NQubitParams& p, bool tied) {
  validate_nqubit(p);
  SystemSpec s;
  s.name = "nqubit";
  s.params = p;
  s.density_dim = 0;
  const Eigen::MatrixXd a0 = nqubit_real_system(p, 1.0, 0.0);
  const Eigen::MatrixXd ap = nqubit_real_system(p, 0.0, 1.0);
  s.generator = BilinearGenerator(Eigen::MatrixXd::Zero(a0.rows(), a0.cols()), {a0, ap});
  s.x0 = nqubit_h0_ground_state(p);
  s.u0 = Eigen::Vector2d(1.0, 0.0);
  const Eigen::MatrixXd hp = nqubit_hp(p);
  const Eigen::Index d = hp.rows();
  Eigen::MatrixXd obs = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  obs.topLeftCorner(d, d) = hp;
  obs.bottomRightCorner(d, d) = hp;
  s.target = TargetSpec::expectation(obs, nqubit_hp_ground_state(p));
  if (tied) s.constraints = {{"g0+gp-1", {}, {{0, 1.0}, {1, 1.0}}, -1.0}};
  s.control_names = {"g0", "gp"};
  return s;
}

SystemSpec with_initial_state(SystemSpec spec, const Eigen::VectorXd& x0) {
  if (x0.size() != spec.n()) throw ConfigError("initial state has the wrong length");
  if (spec.is_density()) {
    validate_density(unpack_density(x0, spec.density_dim));
  } else if (std::abs(x0.squaredNorm() - 1.0) > 1e-9) {
    throw StateError("initial wavefunction must be normalised");
  }
  spec.x0 = x0;
  return spec;
}

}  // namespace qcpinn::systems
