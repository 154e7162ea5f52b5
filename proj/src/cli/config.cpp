#include "qcpinn/cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qcpinn/errors.hpp"
#include "qcpinn/systems/lambda.hpp"

namespace qcpinn::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Walks one JSON object, remembering which keys were read.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_.contains(key)) return;
    try {
      out = node_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + ": wrong type (" + node_.at(key).dump() + ")");
    }
  }

  Reader child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Reader(node_.contains(key) ? node_.at(key) : empty, where(key));
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.contains(item.key())) throw ConfigError(where(item.key()) + ": unknown key");
    }
  }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) line += text[i] == '\n';
  return line;
}

std::string mask_name(loss::ControlMask::Kind k) {
  switch (k) {
    case loss::ControlMask::Kind::All:
      return "all";
    case loss::ControlMask::Kind::LastK:
      return "last";
    case loss::ControlMask::Kind::RandomK:
      return "random";
  }
  return "all";
}

std::string initial_name(InitialState::Kind k) {
  switch (k) {
    case InitialState::Kind::Default:
      return "default";
    case InitialState::Kind::Epsilon:
      return "epsilon";
    case InitialState::Kind::Gibbs:
      return "gibbs";
  }
  return "default";
}

void read_system(Reader r, SystemConfig& s) {
  r.get("kind", s.kind);
  if (s.kind != "tls" && s.kind != "lambda3" && s.kind != "lambda4" && s.kind != "nqubit") {
    throw ConfigError(r.where("kind") + ": expected tls, lambda3, lambda4 or nqubit, got '" + s.kind + "'");
  }
  r.get("qubits", s.qubits);
  r.get("interacting", s.interacting);
  r.get("g0_tied", s.g0_tied);
  r.get("params", s.params);
  Reader init = r.child("initial_state");
  std::string kind = initial_name(s.initial.kind);
  init.get("kind", kind);
  if (kind == "default") {
    s.initial.kind = InitialState::Kind::Default;
  } else if (kind == "epsilon") {
    s.initial.kind = InitialState::Kind::Epsilon;
  } else if (kind == "gibbs") {
    s.initial.kind = InitialState::Kind::Gibbs;
  } else {
    throw ConfigError(init.where("kind") + ": expected default, epsilon or gibbs");
  }
  init.get("epsilon", s.initial.epsilon);
  init.get("p", s.initial.p);
  init.finish();
  r.finish();
}

void read_train(Reader r, train::TrainConfig& t) {
  r.get("epochs", t.epochs);
  r.get("learning_rate", t.learning_rate);
  Reader g = r.child("grid");
  g.get("t_start", t.grid.t_start);
  g.get("t_end", t.grid.t_end);
  g.get("points", t.grid.points);
  g.finish();
  r.get("jitter", t.jitter_amplitude);
  r.get("seed", t.seed);
  r.get("hidden_layers", t.hidden_layers);
  r.get("checkpoint_every", t.checkpoint_every);
  Reader adam = r.child("adam");
  adam.get("beta1", t.adam_beta1);
  adam.get("beta2", t.adam_beta2);
  adam.get("epsilon", t.adam_epsilon);
  adam.finish();

  std::string mode = t.constraint_mode.is_hard() ? "hard" : "soft";
  double lambda_ic = t.constraint_mode.ic_weight;
  r.get("constraint", mode);
  r.get("lambda_ic", lambda_ic);
  if (mode == "hard") {
    t.constraint_mode = nn::ConstraintMode::hard();
    t.loss_weights.lambda_ic = 0.0;
  } else if (mode == "soft") {
    t.constraint_mode = nn::ConstraintMode::soft(lambda_ic);
    t.loss_weights.lambda_ic = lambda_ic;
  } else {
    throw ConfigError(r.where("constraint") + ": expected hard or soft");
  }
  r.get("eta", t.loss_weights.eta);
  r.get("eta_c", t.loss_weights.eta_c);
  r.get("chi", t.loss_weights.chi);
  r.get("keep_best", t.keep_best);
  std::string reg = t.loss_weights.regularizer == loss::LossWeights::Regularizer::Weights ? "weights" : "fields";
  r.get("regularize", reg);
  if (reg == "weights") {
    t.loss_weights.regularizer = loss::LossWeights::Regularizer::Weights;
  } else if (reg == "fields") {
    t.loss_weights.regularizer = loss::LossWeights::Regularizer::Fields;
  } else {
    throw ConfigError(r.where("regularize") + ": expected weights or fields");
  }

  Reader m = r.child("mask");
  std::string kind = mask_name(t.loss_weights.mask.kind);
  std::size_t k = t.loss_weights.mask.k;
  m.get("kind", kind);
  m.get("k", k);
  m.finish();
  if (kind == "all") {
    t.loss_weights.mask = loss::ControlMask::all();
  } else if (kind == "last") {
    t.loss_weights.mask = loss::ControlMask::last(k);
  } else if (kind == "random") {
    t.loss_weights.mask = loss::ControlMask::random(k);
  } else {
    throw ConfigError(m.where("kind") + ": expected all, last or random");
  }
  r.finish();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  ExperimentConfig c;
  Reader root(doc, "");
  read_system(root.child("system"), c.system);
  read_train(root.child("train"), c.train);
  Reader v = root.child("validate");
  v.get("t_start", c.validate.t_start);
  v.get("t_end", c.validate.t_end);
  v.get("dt", c.validate.dt);
  v.finish();
  root.get("output_dir", c.output_dir);
  root.finish();

  if (!(c.validate.dt > 0.0)) throw ConfigError("validate.dt: must be positive");
  if (!(c.validate.t_end > c.validate.t_start)) throw ConfigError("validate.t_end: must exceed t_start");
  if (c.output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  try {
    c.train.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  build_system(c.system);  // range-checks the physical parameters
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  const SystemConfig& s = c.system;
  j["system"] = {{"kind", s.kind},
                 {"qubits", s.qubits},
                 {"interacting", s.interacting},
                 {"g0_tied", s.g0_tied},
                 {"params", s.params},
                 {"initial_state",
                  {{"kind", initial_name(s.initial.kind)}, {"epsilon", s.initial.epsilon}, {"p", s.initial.p}}}};
  const train::TrainConfig& t = c.train;
  j["train"] = {{"epochs", t.epochs},
                {"learning_rate", t.learning_rate},
                {"grid", {{"t_start", t.grid.t_start}, {"t_end", t.grid.t_end}, {"points", t.grid.points}}},
                {"jitter", t.jitter_amplitude},
                {"seed", t.seed},
                {"hidden_layers", t.hidden_layers},
                {"checkpoint_every", t.checkpoint_every},
                {"adam", {{"beta1", t.adam_beta1}, {"beta2", t.adam_beta2}, {"epsilon", t.adam_epsilon}}},
                {"constraint", t.constraint_mode.is_hard() ? "hard" : "soft"},
                {"lambda_ic", t.constraint_mode.ic_weight},
                {"eta", t.loss_weights.eta},
                {"eta_c", t.loss_weights.eta_c},
                {"chi", t.loss_weights.chi},
                {"regularize", t.loss_weights.regularizer == loss::LossWeights::Regularizer::Weights ? "weights"
                                                                                                     : "fields"},
                {"mask", {{"kind", mask_name(t.loss_weights.mask.kind)}, {"k", t.loss_weights.mask.k}}},
                {"keep_best", t.keep_best}};
  j["validate"] = {{"t_start", c.validate.t_start}, {"t_end", c.validate.t_end}, {"dt", c.validate.dt}};
  j["output_dir"] = c.output_dir;
  return j;
}

std::string dump_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

systems::SystemSpec build_system(const SystemConfig& c, bool detuned) {
  systems::ParamOverrides overrides = c.params;
  systems::SystemSpec spec;
  if (c.kind == "tls") {
    if (detuned) throw ConfigError("the TLS has no detuning");
    spec = systems::make_tls(systems::tls_params(overrides));
  } else if (c.kind == "lambda3") {
    if (detuned) overrides["delta"] = overrides["Delta1"] = kDetuning;
    spec = systems::make_lambda3(systems::lambda_params(overrides));
  } else if (c.kind == "lambda4") {
    if (detuned) overrides["delta"] = overrides["Delta3"] = kDetuning;
    spec = systems::make_lambda4(systems::four_level_params(overrides));
  } else if (c.kind == "nqubit") {
    if (detuned) throw ConfigError("the N-qubit systems have no detuning");
    spec = systems::make_nqubit(systems::nqubit_params(c.qubits, c.interacting, overrides), c.g0_tied);
  } else {
    throw ConfigError("unknown system kind '" + c.kind + "'");
  }

  switch (c.initial.kind) {
    case InitialState::Kind::Default:
      return spec;
    case InitialState::Kind::Epsilon:
      if (c.kind != "lambda3") throw ConfigError("epsilon initial states exist for lambda3 only");
      return systems::with_initial_state(std::move(spec), systems::lambda_epsilon_state(c.initial.epsilon));
    case InitialState::Kind::Gibbs: {
      if (c.kind != "tls") throw ConfigError("gibbs initial states exist for tls only");
      if (!(c.initial.p >= 0.0 && c.initial.p <= 1.0)) throw ConfigError("initial_state.p must lie in [0, 1]");
      Eigen::VectorXd x0(4);
      x0 << c.initial.p, 1.0 - c.initial.p, 0.0, 0.0;
      return systems::with_initial_state(std::move(spec), x0);
    }
  }
  return spec;
}

}  // namespace qcpinn::cli
