#include "qcpinn/io/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "qcpinn/errors.hpp"

namespace qcpinn::io {

using nlohmann::json;

namespace {

json layer_arrays(const nn::NetworkParams& p, bool weights) {
  json out = json::array();
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    json flat = json::array();
    if (weights) {
      const Eigen::MatrixXd& w = p.weights[l];
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    } else {
      for (double b : p.biases[l]) flat.push_back(b);
    }
    out.push_back(std::move(flat));
  }
  return out;
}

void read_arrays(const json& weights, const json& biases, nn::NetworkParams& p) {
  if (!weights.is_array() || !biases.is_array() || weights.size() != p.layer_count() ||
      biases.size() != p.layer_count()) {
    throw ConfigError("checkpoint: weights/biases do not match layer_sizes");
  }
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    Eigen::MatrixXd& w = p.weights[l];
    Eigen::VectorXd& b = p.biases[l];
    const json& wj = weights[l];
    const json& bj = biases[l];
    if (wj.size() != static_cast<std::size_t>(w.size()) || bj.size() != static_cast<std::size_t>(b.size())) {
      throw ConfigError("checkpoint: layer " + std::to_string(l) + " has the wrong number of entries");
    }
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = wj[k++].get<double>();
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = bj[static_cast<std::size_t>(i)].get<double>();
  }
}

}  // namespace

json to_json(const nn::NetworkParams& params, const nn::AdamState* adam) {
  json doc;
  doc["layer_sizes"] = params.layer_sizes;
  doc["activation"] = "sin";
  doc["weights"] = layer_arrays(params, true);
  doc["biases"] = layer_arrays(params, false);
  doc["seed"] = params.seed;
  if (adam != nullptr) {
    doc["adam"] = {
        {"m", {{"weights", layer_arrays(adam->first_moment, true)}, {"biases", layer_arrays(adam->first_moment, false)}}},
        {"v",
         {{"weights", layer_arrays(adam->second_moment, true)}, {"biases", layer_arrays(adam->second_moment, false)}}},
        {"t", adam->step_count},
        {"beta1", adam->beta1},
        {"beta2", adam->beta2},
        {"epsilon", adam->epsilon},
    };
  }
  return doc;
}

Checkpoint checkpoint_from_json(const json& doc) {
  try {
    if (doc.value("activation", std::string("sin")) != "sin") throw ConfigError("checkpoint: activation must be sin");
    const auto sizes = doc.at("layer_sizes").get<std::vector<int>>();
    Checkpoint cp;
    cp.params = nn::init_params(sizes, 0);
    cp.params.seed = doc.at("seed").get<std::uint64_t>();
    read_arrays(doc.at("weights"), doc.at("biases"), cp.params);
    if (doc.contains("adam")) {
      const json& a = doc.at("adam");
      nn::AdamState s = nn::make_adam_state(cp.params, a.value("beta1", 0.9), a.value("beta2", 0.999),
                                            a.value("epsilon", 1e-8));
      read_arrays(a.at("m").at("weights"), a.at("m").at("biases"), s.first_moment);
      read_arrays(a.at("v").at("weights"), a.at("v").at("biases"), s.second_moment);
      s.step_count = a.at("t").get<std::uint64_t>();
      cp.adam = std::move(s);
    }
    return cp;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_checkpoint(const std::filesystem::path& path, const nn::NetworkParams& params, const nn::AdamState* adam) {
  write_atomic(path, to_json(params, adam).dump() + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(doc);
}

}  // namespace qcpinn::io
