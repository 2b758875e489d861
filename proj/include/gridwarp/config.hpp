#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "gridwarp/scene.hpp"

namespace gridwarp {

// SceneConfig <-> JSON. Sections "grid", "camera" and "image" are required;
// "noise", "pipeline" and "terrain" fall back to defaults. Unknown keys are
// rejected. Every failure is a ConfigError naming the dotted key path.
SceneConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const SceneConfig& cfg);

SceneConfig load_config(const std::filesystem::path& path);
void save_config(const SceneConfig& cfg, const std::filesystem::path& path);

// FNV-1a 64 of the canonical JSON serialization, as 16 hex digits.
std::string config_digest(const SceneConfig& cfg);

}  // namespace gridwarp
