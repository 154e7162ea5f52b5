#include "qcpinn/validate/validator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "qcpinn/errors.hpp"
#include "qcpinn/systems/density.hpp"

namespace qcpinn::validate {

using systems::SystemSpec;
using systems::Trajectory;

namespace {

std::size_t step_count(double t_start, double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > t_start)) throw ConfigError("integration needs dt > 0 and t_end > t_start");
  const double steps = (t_end - t_start) / dt;
  return static_cast<std::size_t>(std::max(1.0, std::round(steps)));
}

void require_finite_state(const Eigen::VectorXd& x, double t) {
  if (!x.allFinite()) throw IntegrationError("state became non-finite", t);
}

}  // namespace

Trajectory rk4_integrate(const SystemSpec& system, const ControlFunction& control, const Eigen::VectorXd& x0,
                         double t_start, double t_end, double dt) {
  if (control.dim() != system.m()) throw ConfigError("control dimension does not match the system");
  if (x0.size() != system.n()) throw ConfigError("initial state has the wrong length");
  const std::size_t k = step_count(t_start, t_end, dt);
  const double h = (t_end - t_start) / static_cast<double>(k);
  std::vector<double> half(2 * k + 1);
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = t_start + 0.5 * h * static_cast<double>(i);
  half.back() = t_end;
  const Eigen::MatrixXd u = control.sample(half);

  Trajectory tr;
  tr.t.resize(k + 1);
  tr.x.resize(system.n(), static_cast<Eigen::Index>(k + 1));
  tr.u.resize(system.m(), static_cast<Eigen::Index>(k + 1));
  tr.x_rate.resize(system.n(), static_cast<Eigen::Index>(k + 1));
  Eigen::VectorXd x = x0;
  for (std::size_t i = 0; i <= k; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const Eigen::MatrixXd a0 = system.generator.matrix(u.col(static_cast<Eigen::Index>(2 * i)));
    tr.t[i] = half[2 * i];
    tr.x.col(col) = x;
    tr.u.col(col) = u.col(static_cast<Eigen::Index>(2 * i));
    tr.x_rate.col(col) = a0 * x;
    if (i == k) break;
    const Eigen::MatrixXd am = system.generator.matrix(u.col(static_cast<Eigen::Index>(2 * i + 1)));
    const Eigen::MatrixXd a1 = system.generator.matrix(u.col(static_cast<Eigen::Index>(2 * i + 2)));
    const Eigen::VectorXd k1 = tr.x_rate.col(col);
    const Eigen::VectorXd k2 = am * (x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = am * (x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = a1 * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    require_finite_state(x, half[2 * i + 2]);
  }
  return tr;
}

Trajectory rk4_integrate(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& rhs,
                         const Eigen::VectorXd& x0, double t_start, double t_end, double dt) {
  const std::size_t k = step_count(t_start, t_end, dt);
  const double h = (t_end - t_start) / static_cast<double>(k);
  Trajectory tr;
  tr.t.resize(k + 1);
  tr.x.resize(x0.size(), static_cast<Eigen::Index>(k + 1));
  tr.x_rate.resize(x0.size(), static_cast<Eigen::Index>(k + 1));
  Eigen::VectorXd x = x0;
  for (std::size_t i = 0; i <= k; ++i) {
    const double t = i == k ? t_end : t_start + h * static_cast<double>(i);
    const auto col = static_cast<Eigen::Index>(i);
    tr.t[i] = t;
    tr.x.col(col) = x;
    const Eigen::VectorXd k1 = rhs(t, x);
    tr.x_rate.col(col) = k1;
    if (i == k) break;
    const Eigen::VectorXd k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    require_finite_state(x, t + h);
  }
  return tr;
}

double pulse_area(const ControlFunction& control, double t_f, double dt, double t_start) {
  if (!(t_f > t_start)) throw ConfigError("pulse area needs t_f > t_start");
  if (control.dim() < 2) throw ConfigError("pulse area needs two control channels");
  std::size_t k = step_count(t_start, t_f, dt);
  if (k % 2 == 1) ++k;
  const double h = (t_f - t_start) / static_cast<double>(k);
  std::vector<double> t(k + 1);
  for (std::size_t i = 0; i <= k; ++i) t[i] = t_start + h * static_cast<double>(i);
  t.back() = t_f;
  const Eigen::MatrixXd u = control.sample(t);
  double sum = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const double f = std::hypot(u(0, c), u(1, c));
    const double w = (i == 0 || i == k) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * f;
  }
  return sum * h / 3.0;
}

double transfer_time(std::span<const double> t, std::span<const double> population) {
  if (t.empty() || t.size() != population.size()) throw ConfigError("transfer time needs a non-empty trajectory");
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    if (population[i] > population[best]) best = i;
  }
  return t[best];
}

double transfer_time(const Trajectory& traj, const SystemSpec& system, int index) {
  std::vector<double> p(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    p[i] = system.population(traj.x.col(static_cast<Eigen::Index>(i)), index);
  }
  return transfer_time(traj.t, p);
}

EnergySeries work_heat(const Trajectory& traj, const ControlFunction& xi, const systems::TlsParams& params,
                       double dt) {
  if (traj.x.rows() != 4) throw ConfigError("energy analysis needs a two-level trajectory");
  const Eigen::MatrixXd rate = xi.sample_rate(traj.t, dt / 10.0);
  EnergySeries e;
  e.t = traj.t;
  const std::size_t n = traj.size();
  e.work.assign(n, 0.0);
  e.heat.assign(n, 0.0);
  e.ratio.assign(n, std::nullopt);
  auto power = [&](std::size_t i) {
    return rate(0, static_cast<Eigen::Index>(i)) * traj.x(1, static_cast<Eigen::Index>(i));
  };
  auto heat_flux = [&](std::size_t i) {
    const auto c = static_cast<Eigen::Index>(i);
    const Eigen::Vector4d xr = traj.x_rate.col(c);
    return systems::tls_energy(params, traj.u(0, c), xr);
  };
  for (std::size_t i = 1; i < n; ++i) {
    const double h = traj.t[i] - traj.t[i - 1];
    e.work[i] = e.work[i - 1] + 0.5 * h * (power(i - 1) + power(i));
    e.heat[i] = e.heat[i - 1] + 0.5 * h * (heat_flux(i - 1) + heat_flux(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(e.heat[i]) >= 1e-12) e.ratio[i] = std::abs(e.work[i] / e.heat[i]);
  }
  return e;
}

double efficiency(std::span<const std::optional<double>> eta, std::span<const double> t) {
  if (eta.size() != t.size()) throw ConfigError("efficiency: series lengths differ");
  std::size_t first = 0;
  while (first < eta.size() && !eta[first]) ++first;
  double i1 = 0.0;
  double i2 = 0.0;
  for (std::size_t i = first + 1; i < eta.size(); ++i) {
    if (!eta[i] || !eta[i - 1]) continue;
    const double a = *eta[i - 1];
    const double b = *eta[i];
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("efficiency: non-finite ratio sample");
    const double h = t[i] - t[i - 1];
    i1 += 0.5 * h * (std::max(a - 1.0, 0.0) + std::max(b - 1.0, 0.0));
    i2 += 0.5 * h * (a + b);
  }
  if (i2 == 0.0) throw DegenerateError("efficiency: integral of the ratio is zero");
  return std::clamp(1.0 - i1 / i2, 0.0, 1.0);
}

double target_fidelity(const SystemSpec& system, const Eigen::VectorXd& x) {
  if (system.target.state.size() != x.size()) return 0.0;
  if (system.is_density()) {
    const int d = system.density_dim;
    return systems::fidelity(systems::unpack_density(x, d), systems::unpack_density(system.target.state, d));
  }
  const Eigen::Index d = x.size() / 2;
  const Eigen::VectorXd& y = system.target.state;
  // |<y|x>|^2 with complex vectors stored as (Re, Im)
  const double re = y.head(d).dot(x.head(d)) + y.tail(d).dot(x.tail(d));
  const double im = y.head(d).dot(x.tail(d)) - y.tail(d).dot(x.head(d));
  return re * re + im * im;
}

Validation validate_control(const SystemSpec& system, const ControlFunction& control,
                            const ValidationOptions& options) {
  Validation v;
  v.trajectory = rk4_integrate(system, control, system.x0, options.t_start, options.t_end, options.dt);
  const Trajectory& tr = v.trajectory;
  MetricsRecord& m = v.metrics;
  m.system = system.name;
  m.control_source = control.source();
  const auto last = static_cast<Eigen::Index>(tr.size() - 1);

  const bool has_reference = system.target.state.size() == system.n();
  if (has_reference) {
    const std::size_t stride = std::max<std::size_t>(1, options.fidelity_stride);
    for (std::size_t i = 0; i < tr.size(); i += stride) {
      m.fidelity_t.push_back(tr.t[i]);
      m.fidelity.push_back(target_fidelity(system, tr.x.col(static_cast<Eigen::Index>(i))));
    }
    m.final_fidelity = target_fidelity(system, tr.x.col(last));
  }
  if (system.target.kind == systems::TargetSpec::Kind::PopulationIndex) {
    const int idx = system.target.index;
    m.t_f = transfer_time(tr, system, idx);
    const auto it = std::find(tr.t.begin(), tr.t.end(), m.t_f);
    m.p2 = system.population(tr.x.col(static_cast<Eigen::Index>(it - tr.t.begin())), idx);
    if (system.m() >= 2 && m.t_f > options.t_start) m.area = pulse_area(control, m.t_f, options.dt, options.t_start);
  }
  if (system.target.kind == systems::TargetSpec::Kind::ExpectationMin) {
    const Eigen::VectorXd xf = tr.x.col(last);
    m.final_expectation = system.target.expectation_value<double>(std::span<const double>(xf.data(), xf.size()));
  }
  if (options.energy) {
    const auto* tls = std::get_if<systems::TlsParams>(&system.params);
    if (tls == nullptr) throw ConfigError("energy analysis is defined for the two-level system only");
    m.energy = work_heat(tr, control, *tls, options.dt);
    try {
      m.eff = efficiency(m.energy->ratio, m.energy->t);
    } catch (const DegenerateError&) {
      m.eff.reset();
    }
  }
  return v;
}

std::string metrics_json(const MetricsRecord& m) {
  nlohmann::ordered_json j;
  j["system"] = m.system;
  j["control"] = m.control_source;
  j["p2"] = m.p2;
  j["area"] = m.area;
  j["t_f"] = m.t_f;
  j["final_fidelity"] = m.final_fidelity;
  j["final_expectation"] = m.final_expectation;
  j["fidelity_series"] = {{"t", m.fidelity_t}, {"fidelity", m.fidelity}};
  if (m.eff) j["eff"] = *m.eff;
  return j.dump(2) + "\n";
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, ",%.12g", v);
  out += buf;
}

}  // namespace

std::string trajectory_csv(const SystemSpec& system, const Trajectory& traj, std::size_t stride) {
  stride = std::max<std::size_t>(1, stride);
  std::string out = "t";
  for (int i = 0; i < system.n(); ++i) out += ",x" + std::to_string(i + 1);
  for (const auto& name : system.control_names) out += "," + name;
  const int levels = system.is_density() ? system.density_dim : system.n() / 2;
  for (int i = 0; i < levels; ++i) out += ",p" + std::to_string(i + 1);
  out += ",coherence,fidelity\n";
  for (std::size_t s = 0; s < traj.size(); s += stride) {
    const auto c = static_cast<Eigen::Index>(s);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", traj.t[s]);
    out += buf;
    const Eigen::VectorXd x = traj.x.col(c);
    for (Eigen::Index i = 0; i < x.size(); ++i) append_number(out, x(i));
    for (Eigen::Index k = 0; k < traj.u.rows(); ++k) append_number(out, traj.u(k, c));
    for (int i = 0; i < levels; ++i) append_number(out, system.population(x, i));
    append_number(out, system.density_dim == 2 ? 2.0 * std::hypot(x(2), x(3)) : 0.0);
    append_number(out, target_fidelity(system, x));
    out += "\n";
  }
  return out;
}

std::string energy_csv(const EnergySeries& e, std::size_t stride) {
  stride = std::max<std::size_t>(1, stride);
  std::string out = "t,work,heat,eta\n";
  for (std::size_t i = 0; i < e.t.size(); i += stride) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,", e.t[i], e.work[i], e.heat[i]);
    out += buf;
    if (e.ratio[i]) {
      std::snprintf(buf, sizeof buf, "%.12g", *e.ratio[i]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace qcpinn::validate
