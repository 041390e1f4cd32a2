#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rrm/crf.hpp"
#include "rrm/label_gen.hpp"
#include "rrm/losses.hpp"

namespace rrm {

// JSON (de)serialization for the three config records. Field names are the
// ones in the structs; unknown fields are rejected.
nlohmann::json to_json(const SelectionConfig& sel);
nlohmann::json to_json(const CrfConfig& cfg);
nlohmann::json to_json(const EnergyConfig& cfg);

SelectionConfig selection_from_json(const nlohmann::json& j);
CrfConfig crf_from_json(const nlohmann::json& j);
EnergyConfig energy_from_json(const nlohmann::json& j);

SelectionConfig load_selection_config(const std::filesystem::path& path);
CrfConfig load_crf_config(const std::filesystem::path& path);
EnergyConfig load_energy_config(const std::filesystem::path& path);

std::string to_string(SelectionMode m);
std::string to_string(EnergyNormalization n);
std::string to_string(FilterPath p);
std::string to_string(SoftFilterGrad g);

}  // namespace rrm
