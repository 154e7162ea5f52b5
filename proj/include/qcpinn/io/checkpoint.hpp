#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "qcpinn/nn/adam.hpp"
#include "qcpinn/nn/network.hpp"

namespace qcpinn::io {

struct Checkpoint {
  nn::NetworkParams params;
  std::optional<nn::AdamState> adam;
};

nlohmann::json to_json(const nn::NetworkParams& params, const nn::AdamState* adam = nullptr);
Checkpoint checkpoint_from_json(const nlohmann::json& doc);

/// Writes `text` to a sibling temporary and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const nn::NetworkParams& params,
                     const nn::AdamState* adam = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qcpinn::io
