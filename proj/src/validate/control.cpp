#include "qcpinn/validate/control.hpp"

#include <algorithm>

#include "qcpinn/errors.hpp"

namespace qcpinn::validate {

ControlFunction::ControlFunction(int dim, Sampler values, Sampler rates, std::string source)
    : dim_(dim), values_(std::move(values)), rates_(std::move(rates)), source_(std::move(source)) {
  if (dim_ < 1 || !values_) throw ConfigError("control function needs a positive dimension and a sampler");
}

namespace {

// Keeps batch activations of wide networks within a few tens of MB.
constexpr std::size_t kChunk = 2048;

Eigen::MatrixXd network_samples(const nn::NetworkParams& params, const nn::ConstraintMode& mode, int state_dim,
                                const Eigen::VectorXd& u0, std::span<const double> times, bool rate) {
  const auto m = u0.size();
  Eigen::MatrixXd out(m, static_cast<Eigen::Index>(times.size()));
  for (std::size_t begin = 0; begin < times.size(); begin += kChunk) {
    const std::size_t count = std::min(kChunk, times.size() - begin);
    const nn::BatchEvaluation batch(params, times.subspan(begin, count));
    for (std::size_t j = 0; j < count; ++j) {
      const double t = times[begin + j];
      const auto col = static_cast<Eigen::Index>(j);
      const Eigen::VectorXd raw = batch.outputs().col(col).segment(state_dim, m);
      const Eigen::VectorXd raw_rate = batch.rates().col(col).segment(state_dim, m);
      Eigen::VectorXd u;
      if (mode.is_hard()) {
        u = rate ? Eigen::VectorXd(nn::anchor_rate(t) * raw + nn::anchor(t) * raw_rate)
                 : Eigen::VectorXd(u0 + nn::anchor(t) * raw);
      } else {
        u = rate ? raw_rate : raw;
      }
      out.col(static_cast<Eigen::Index>(begin + j)) = u;
    }
  }
  return out;
}

}  // namespace

ControlFunction ControlFunction::network(const nn::NetworkParams& params, const nn::ConstraintMode& mode,
                                         int state_dim, const Eigen::VectorXd& u0) {
  if (params.output_width() != state_dim + u0.size()) throw ConfigError("network width does not match the system");
  auto values = [params, mode, state_dim, u0](std::span<const double> t) {
    return network_samples(params, mode, state_dim, u0, t, false);
  };
  auto rates = [params, mode, state_dim, u0](std::span<const double> t) {
    return network_samples(params, mode, state_dim, u0, t, true);
  };
  return ControlFunction(static_cast<int>(u0.size()), values, rates, "network");
}

ControlFunction ControlFunction::constant(const Eigen::VectorXd& u) {
  auto values = [u](std::span<const double> t) {
    return Eigen::MatrixXd(u.replicate(1, static_cast<Eigen::Index>(t.size())));
  };
  auto rates = [m = u.size()](std::span<const double> t) {
    return Eigen::MatrixXd(Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(t.size())));
  };
  return ControlFunction(static_cast<int>(u.size()), values, rates, "constant");
}

ControlFunction ControlFunction::zero(int dim) {
  ControlFunction c = constant(Eigen::VectorXd::Zero(dim));
  c.source_ = "zero";
  return c;
}

ControlFunction ControlFunction::from_functions(std::vector<std::function<double(double)>> channels,
                                                std::string source) {
  const auto m = static_cast<int>(channels.size());
  auto values = [channels = std::move(channels)](std::span<const double> t) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(channels.size()), static_cast<Eigen::Index>(t.size()));
    for (std::size_t k = 0; k < channels.size(); ++k) {
      for (std::size_t j = 0; j < t.size(); ++j) {
        out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = channels[k](t[j]);
      }
    }
    return out;
  };
  return ControlFunction(m, values, {}, std::move(source));
}

Eigen::VectorXd ControlFunction::operator()(double t) const {
  const double ts[1] = {t};
  return values_(ts).col(0);
}

Eigen::MatrixXd ControlFunction::sample(std::span<const double> times) const { return values_(times); }

Eigen::MatrixXd ControlFunction::sample_rate(std::span<const double> times, double h) const {
  if (rates_) return rates_(times);
  std::vector<double> up(times.begin(), times.end());
  std::vector<double> down(times.begin(), times.end());
  for (auto& t : up) t += h;
  for (auto& t : down) t -= h;
  return (values_(up) - values_(down)) / (2.0 * h);
}

}  // namespace qcpinn::validate
