#pragma once

#include <filesystem>
#include <vector>

#include "rrm/config_io.hpp"

namespace rrm {

struct ManifestEntry {
    std::filesystem::path image;
    std::vector<std::filesystem::path> features;  // one tensor per scale
    std::vector<int> classes;                      // foreground ids, 1..N
    std::filesystem::path weights;                 // [N_total, D] tensor
};

struct PipelineManifest {
    std::vector<ManifestEntry> images;
    SelectionConfig selection;
    CrfConfig crf;
    EnergyConfig energy;
};

// Loads a manifest JSON. Relative paths resolve against the manifest's
// directory; every referenced file must exist; class ids must be unique and
// in 1..254. Config entries are paths to JSON files and fall back to
// defaults when omitted.
PipelineManifest load_manifest(const std::filesystem::path& path);

}  // namespace rrm
