#include "qcpinn/pulses/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>

#include "qcpinn/errors.hpp"

namespace qcpinn::pulses {

using std::numbers::pi;

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Stirap:
      return "stirap";
    case Protocol::InverseEngineering:
      return "inverse_engineering";
    case Protocol::Stirep:
      return "stirep";
    case Protocol::ModSatd:
      return "mod_satd";
    case Protocol::SaStirap:
      return "sa_stirap";
  }
  return "unknown";
}

Protocol protocol_from_name(const std::string& name) {
  for (Protocol p : {Protocol::Stirap, Protocol::InverseEngineering, Protocol::Stirep, Protocol::ModSatd,
                     Protocol::SaStirap}) {
    if (protocol_name(p) == name) return p;
  }
  throw ConfigError("unknown protocol '" + name + "'");
}

double PulseSequence::max_amplitude(std::size_t samples) const {
  double m = 0.0;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double t = t_start + (t_end - t_start) * static_cast<double>(i) / static_cast<double>(samples);
    m = std::max({m, std::abs(omega_p(t)), std::abs(omega_s(t))});
  }
  return m;
}

validate::ControlFunction PulseSequence::control() const {
  return validate::ControlFunction::from_functions({omega_p, omega_s}, protocol_name(protocol));
}

std::string PulseSequence::to_csv(std::size_t samples) const {
  std::string out = omega_a ? "t,omega_p,omega_s,omega_a\n" : "t,omega_p,omega_s\n";
  char buf[128];
  for (std::size_t i = 0; i <= samples; ++i) {
    const double t = t_start + (t_end - t_start) * static_cast<double>(i) / static_cast<double>(samples);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g", t, omega_p(t), omega_s(t));
    out += buf;
    if (omega_a) {
      std::snprintf(buf, sizeof buf, ",%.12g", omega_a(t));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

// STIRAP

std::array<double, 2> stirap_fields(const StirapParams& p, double t) {
  const double s2 = 2.0 * p.sigma * p.sigma;
  const double dp = t - p.centre - 0.5 * p.t_d;
  const double ds = t - p.centre + 0.5 * p.t_d;
  return {p.omega0 * std::exp(-dp * dp / s2), p.omega0 * std::exp(-ds * ds / s2)};
}

double stirap_mixing_angle(const StirapParams& p, double t) {
  const auto f = stirap_fields(p, t);
  return std::atan2(f[0], f[1]);
}

PulseSequence stirap_pulses(const StirapParams& p) {
  if (!(p.sigma > 0.0)) throw ConfigError("STIRAP sigma must be positive");
  PulseSequence s;
  s.protocol = Protocol::Stirap;
  s.params = {{"omega0", p.omega0}, {"sigma", p.sigma}, {"t_d", p.t_d}, {"centre", p.centre}, {"duration", p.duration}};
  s.omega_p = [p](double t) { return stirap_fields(p, t)[0]; };
  s.omega_s = [p](double t) { return stirap_fields(p, t)[1]; };
  s.t_end = p.duration;
  return s;
}

// Inverse engineering

Ansatz2Coefficients ansatz2_coefficients(double epsilon, double delta, double t_f) {
  if (!(t_f > 0.0)) throw ConfigError("inverse engineering needs t_f > 0");
  auto row = [](double t, int degree, bool derivative) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(degree + 1);
    for (int j = 0; j <= degree; ++j) {
      if (derivative) {
        r(j) = j == 0 ? 0.0 : j * std::pow(t, j - 1);
      } else {
        r(j) = std::pow(t, j);
      }
    }
    return r;
  };
  Eigen::Matrix<double, 5, 5> ga;
  ga << row(0, 4, false), row(0, 4, true), row(t_f, 4, false), row(t_f, 4, true), row(0.5 * t_f, 4, false);
  Eigen::Matrix<double, 5, 1> gb;
  gb << epsilon, 0.0, epsilon, 0.0, delta;
  Eigen::Matrix4d ba;
  ba << row(0, 3, false), row(0, 3, true), row(t_f, 3, false), row(t_f, 3, true);
  Eigen::Vector4d bb(0.0, 0.0, 0.5 * pi, 0.0);

  Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> glu(ga);
  Eigen::FullPivLU<Eigen::Matrix4d> blu(ba);
  if (!glu.isInvertible() || !blu.isInvertible()) throw ConfigError("ansatz 2 boundary conditions are singular");
  const Eigen::Matrix<double, 5, 1> gc = glu.solve(gb);
  const Eigen::Vector4d bc = blu.solve(bb);
  Ansatz2Coefficients c{};
  for (int j = 0; j < 5; ++j) c.gamma[static_cast<std::size_t>(j)] = gc(j);
  for (int j = 0; j < 4; ++j) c.beta[static_cast<std::size_t>(j)] = bc(j);
  return c;
}

namespace {

template <std::size_t N>
std::array<double, 2> polynomial(const std::array<double, N>& c, double t) {
  double v = 0.0;
  double d = 0.0;
  for (std::size_t j = N; j-- > 0;) {
    d = d * t + v;
    v = v * t + c[j];
  }
  return {v, d};
}

}  // namespace

AngleTrajectory inverse_engineering_angles(const InverseEngineeringParams& p, double t) {
  AngleTrajectory a;
  switch (p.ansatz) {
    case 1:
      a.gamma = p.epsilon;
      a.beta = pi * t / (2.0 * p.t_f);
      a.beta_rate = pi / (2.0 * p.t_f);
      return a;
    case 2: {
      const Ansatz2Coefficients c = ansatz2_coefficients(p.epsilon, p.delta, p.t_f);
      const auto g = polynomial(c.gamma, t);
      const auto b = polynomial(c.beta, t);
      return {g[0], g[1], b[0], b[1]};
    }
    case 3: {
      const double T = p.period;
      const double d0 = p.d0;
      const double d1 = p.d1;
      const std::array<double, 5> gc{0.0, 1.0, -(5 * pi - 16 * d0 + 3 * T) / (T * T),
                                     2 * (7 * pi - 16 * d0 + T) / (T * T * T), -8 * (pi - 2 * d0) / std::pow(T, 4)};
      const auto g = polynomial(gc, t);
      const double x = t / T;
      const double c2 = 0.5 * (2 * pi * d1 + 3 * pi);
      const double c1 = -0.5 * (2 * pi * d1 + 3 * pi + 1.5 * pi);
      a.gamma = g[0];
      a.gamma_rate = g[1];
      a.beta = -pi * x * x * x + c2 * x * x + c1 * x + d1 * std::sin(pi * x);
      a.beta_rate = (-3 * pi * x * x + 2 * c2 * x + c1 + d1 * pi * std::cos(pi * x)) / T;
      return a;
    }
    default:
      throw ConfigError("inverse engineering ansatz must be 1, 2 or 3");
  }
}

std::array<double, 2> inverse_engineering_fields(const InverseEngineeringParams& p, double t) {
  const AngleTrajectory a = inverse_engineering_angles(p, t);
  const double cot = std::cos(a.gamma) / std::sin(a.gamma);
  const double cb = std::cos(a.beta);
  const double sb = std::sin(a.beta);
  return {2.0 * (a.beta_rate * cot * sb + a.gamma_rate * cb), 2.0 * (a.beta_rate * cot * cb - a.gamma_rate * sb)};
}

PulseSequence inverse_engineering_pulses(const InverseEngineeringParams& p) {
  PulseSequence s;
  s.protocol = Protocol::InverseEngineering;
  s.params = {{"ansatz", p.ansatz}, {"epsilon", p.epsilon}, {"delta", p.delta}, {"t_f", p.t_f},
              {"d0", p.d0},         {"d1", p.d1},           {"T", p.period}};
  InverseEngineeringParams q = p;
  if (p.ansatz == 2) {
    // solve the boundary conditions once
    const Ansatz2Coefficients c = ansatz2_coefficients(p.epsilon, p.delta, p.t_f);
    auto fields = [c](double t) {
      const auto g = polynomial(c.gamma, t);
      const auto b = polynomial(c.beta, t);
      const double cot = std::cos(g[0]) / std::sin(g[0]);
      return std::array<double, 2>{2.0 * (b[1] * cot * std::sin(b[0]) + g[1] * std::cos(b[0])),
                                   2.0 * (b[1] * cot * std::cos(b[0]) - g[1] * std::sin(b[0]))};
    };
    s.omega_p = [fields](double t) { return fields(t)[0]; };
    s.omega_s = [fields](double t) { return fields(t)[1]; };
  } else {
    inverse_engineering_angles(q, 0.0);
    s.omega_p = [q](double t) { return inverse_engineering_fields(q, t)[0]; };
    s.omega_s = [q](double t) { return inverse_engineering_fields(q, t)[1]; };
  }
  // gamma(0) = 0 for ansatz 3 makes cot(gamma) singular at t = 0
  s.t_start = p.ansatz == 3 ? 1e-3 * p.period : 0.0;
  s.t_end = p.ansatz == 3 ? p.period : p.t_f;
  return s;
}

// STIREP

std::array<double, 2> stirep_trajectory_rhs(const StirepParams& p, double eta, double phi, double phi_rate) {
  const double c = std::cos(phi);
  const double s2 = phi_rate * phi_rate + c * c;
  const double drive = p.lambda0 / c + p.lambda1 * std::sin(eta) - p.lambda2 * std::cos(eta);
  return {phi_rate, -(2.0 * phi_rate * phi_rate + c * c) * std::tan(phi) + drive * s2 * std::sqrt(s2)};
}

std::vector<StirepSample> stirep_trajectory(const StirepParams& p, double eta_end, double theta_stop) {
  if (!(p.step > 0.0)) throw ConfigError("STIREP step must be positive");
  const auto steps = static_cast<std::size_t>(std::ceil(eta_end / p.step));
  const double h = eta_end / static_cast<double>(std::max<std::size_t>(steps, 1));
  std::vector<StirepSample> out;
  out.reserve(steps + 1);
  std::array<double, 3> y{p.phi0, 0.0, 0.5 * pi};
  auto f = [&](double eta, const std::array<double, 3>& v) {
    const auto d = stirep_trajectory_rhs(p, eta, v[0], v[1]);
    return std::array<double, 3>{d[0], d[1], -std::sin(v[0])};
  };
  for (std::size_t i = 0;; ++i) {
    const double eta = h * static_cast<double>(i);
    if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || std::abs(y[0]) >= 0.5 * pi) {
      throw IntegrationError("STIREP trajectory left (-pi/2, pi/2)", eta);
    }
    out.push_back({eta, y[0], y[1], y[2]});
    if (i == steps || y[2] <= theta_stop) break;
    const auto k1 = f(eta, y);
    std::array<double, 3> tmp{};
    for (int j = 0; j < 3; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    const auto k2 = f(eta + 0.5 * h, tmp);
    for (int j = 0; j < 3; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    const auto k3 = f(eta + 0.5 * h, tmp);
    for (int j = 0; j < 3; ++j) tmp[j] = y[j] + h * k3[j];
    const auto k4 = f(eta + h, tmp);
    for (int j = 0; j < 3; ++j) y[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return out;
}

StirepSolution::StirepSolution(const StirepParams& p) : params_(p) {
  if (!(p.clock_rate > 0.0)) throw ConfigError("STIREP clock rate must be positive");
  // theta falls from pi/2; the half-way point theta = pi/4 fixes the mirror axis
  const double horizon = 50.0;
  const std::vector<StirepSample> all = stirep_trajectory(p, horizon, 0.25 * pi);
  std::size_t cross = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].theta <= 0.25 * pi) {
      cross = i;
      break;
    }
  }
  if (cross == 0) throw IntegrationError("STIREP trajectory never reaches theta = pi/4", horizon);
  const StirepSample& a = all[cross - 1];
  const StirepSample& b = all[cross];
  const double w = (a.theta - 0.25 * pi) / (a.theta - b.theta);
  eta_mid_ = a.eta + w * (b.eta - a.eta);
  half_.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cross + 1));
  phi_acc_.reserve(half_.size());
  for (const auto& s : half_) phi_acc_.push_back(stirep_trajectory_rhs(p, s.eta, s.phi, s.phi_rate)[1]);
}

StirepSample StirepSolution::at_eta(double eta) const {
  eta = std::clamp(eta, 0.0, eta_end());
  const bool mirrored = eta > eta_mid_;
  const double e = mirrored ? 2.0 * eta_mid_ - eta : eta;
  const double h = half_[1].eta - half_[0].eta;
  const auto i = std::min(static_cast<std::size_t>(e / h), half_.size() - 2);
  const StirepSample& a = half_[i];
  const StirepSample& b = half_[i + 1];
  const double s = (e - a.eta) / h;
  // cubic Hermite basis
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  StirepSample out;
  out.eta = eta;
  out.phi = h00 * a.phi + h10 * h * a.phi_rate + h01 * b.phi + h11 * h * b.phi_rate;
  out.phi_rate = h00 * a.phi_rate + h10 * h * phi_acc_[i] + h01 * b.phi_rate + h11 * h * phi_acc_[i + 1];
  out.theta = h00 * a.theta + h10 * h * -std::sin(a.phi) + h01 * b.theta + h11 * h * -std::sin(b.phi);
  if (mirrored) {
    out.phi_rate = -out.phi_rate;
    out.theta = 0.5 * pi - out.theta;
  }
  return out;
}

std::array<double, 2> StirepSolution::fields(double t) const {
  const StirepSample s = at_eta(params_.clock_rate * t);
  const double scale = 2.0 * params_.clock_rate;
  const double c = std::cos(s.phi);
  const double omega_s = c * std::sin(s.theta) - s.phi_rate * std::cos(s.theta);
  const double omega_p = -c * std::cos(s.theta) - s.phi_rate * std::sin(s.theta);
  return {scale * omega_p, scale * omega_s};
}

PulseSequence stirep_pulses(const StirepParams& p) {
  auto solution = std::make_shared<const StirepSolution>(p);
  PulseSequence s;
  s.protocol = Protocol::Stirep;
  s.params = {{"lambda0", p.lambda0}, {"lambda1", p.lambda1}, {"lambda2", p.lambda2},
              {"phi0", p.phi0},       {"clock_rate", p.clock_rate}};
  s.omega_p = [solution](double t) { return solution->fields(t)[0]; };
  s.omega_s = [solution](double t) { return solution->fields(t)[1]; };
  s.t_end = solution->duration();
  return s;
}

// MOD-SATD

ModSatdTerms modsatd_terms(const ModSatdParams& p, double s) {
  const double sig2 = p.sigma * p.sigma;
  const double a = p.t_d / sig2;
  const double zeta = 9.0 / (10.0 * p.sigma);
  ModSatdTerms r{};
  r.theta = std::atan(std::exp(a * s));
  r.theta_rate = a / (2.0 * std::cosh(a * s));
  const double theta_acc = -a * a * std::sinh(a * s) / (2.0 * std::cosh(a * s) * std::cosh(a * s));
  r.omega = p.omega0 * std::exp(-(s * s + 0.25 * p.t_d * p.t_d) / (2.0 * sig2)) * std::sqrt(2.0 * std::cosh(a * s));
  const double omega_rate = r.omega * (-s / sig2 + 0.5 * a * std::tanh(a * s));
  r.g = p.amplitude / std::cosh(zeta * s);
  const double g_rate = -p.amplitude * zeta * std::sinh(zeta * s) / (std::cosh(zeta * s) * std::cosh(zeta * s));
  const double d = r.omega + r.g / p.sigma;
  const double d_rate = omega_rate + g_rate / p.sigma;
  const double q = r.theta_rate / d;
  const double q_rate = (theta_acc * d - r.theta_rate * d_rate) / (d * d);
  r.mu = -std::atan(q);
  r.g_x = -q_rate / (1.0 + q * q);
  // -Omega - theta'/tan(mu) with tan(mu) = -theta'/(Omega + g/sigma)
  r.g_z = r.g / p.sigma;
  if (!p.corrections) r.g_x = r.g_z = 0.0;
  return r;
}

std::array<double, 2> modsatd_fields(const ModSatdParams& p, double t) {
  const ModSatdTerms r = modsatd_terms(p, t - p.half_window);
  const double base = r.omega + r.g_z;
  const double theta = r.theta - std::atan(r.g_x / base);
  const double amp = std::hypot(base, r.g_x);
  const double op = -amp * std::sin(theta);
  const double os = amp * std::cos(theta);
  if (!std::isfinite(op) || !std::isfinite(os)) throw DomainError("MOD-SATD fields are not finite");
  return {op, os};
}

PulseSequence modsatd_pulses(const ModSatdParams& p) {
  PulseSequence s;
  s.protocol = Protocol::ModSatd;
  s.params = {{"omega0", p.omega0},       {"sigma", p.sigma},         {"A", p.amplitude},
              {"t_d", p.t_d},             {"half_window", p.half_window}};
  s.omega_p = [p](double t) { return modsatd_fields(p, t)[0]; };
  s.omega_s = [p](double t) { return modsatd_fields(p, t)[1]; };
  s.t_end = 2.0 * p.half_window;
  return s;
}

// SA-STIRAP

std::array<double, 3> sastirap_fields(const SaStirapParams& p, double t) {
  const double k = pi / p.period;
  const double xp = k * (t - p.tau);
  const double xs = k * t;
  const double sp = std::sin(xp);
  const double ss = std::sin(xs);
  const double op = p.omega0 * std::pow(sp, 4);
  const double os = p.omega0 * std::pow(ss, 4);
  const double op_rate = 4.0 * p.omega0 * k * sp * sp * sp * std::cos(xp);
  const double os_rate = 4.0 * p.omega0 * k * ss * ss * ss * std::cos(xs);
  const double norm = op * op + os * os;
  const double theta_rate = norm > 0.0 ? (op_rate * os - op * os_rate) / norm : 0.0;
  return {op, os, 2.0 * theta_rate};
}

PulseSequence sastirap_pulses(const SaStirapParams& p) {
  PulseSequence s;
  s.protocol = Protocol::SaStirap;
  s.params = {{"omega0", p.omega0}, {"T", p.period}, {"tau", p.tau}};
  s.omega_p = [p](double t) { return sastirap_fields(p, t)[0]; };
  s.omega_s = [p](double t) { return sastirap_fields(p, t)[1]; };
  s.omega_a = [p](double t) { return sastirap_fields(p, t)[2]; };
  s.t_end = p.period;
  return s;
}

PulseSequence saturate(PulseSequence s, double cap) {
  if (!(cap > 0.0)) throw ConfigError("pulse cap must be positive");
  auto clip = [cap](std::function<double(double)> f) {
    return [f = std::move(f), cap](double t) { return std::clamp(f(t), -cap, cap); };
  };
  s.omega_p = clip(std::move(s.omega_p));
  s.omega_s = clip(std::move(s.omega_s));
  if (s.omega_a) s.omega_a = clip(std::move(s.omega_a));
  s.params["cap"] = cap;
  return s;
}

PulseSequence benchmark_preset(Protocol p) {
  switch (p) {
    case Protocol::Stirap:
      return saturate(stirap_pulses(StirapParams{}), kBenchmarkCap);
    case Protocol::InverseEngineering:
      return saturate(inverse_engineering_pulses(InverseEngineeringParams{}), kBenchmarkCap);
    case Protocol::Stirep: {
      StirepParams s;
      s.clock_rate = 5.0;
      return saturate(stirep_pulses(s), kBenchmarkCap);
    }
    case Protocol::ModSatd:
      return saturate(modsatd_pulses(ModSatdParams{}), kBenchmarkCap);
    case Protocol::SaStirap:
      return saturate(sastirap_pulses(SaStirapParams{}), kBenchmarkCap);
  }
  throw ConfigError("unknown protocol");
}

}  // namespace qcpinn::pulses
