#include "rrm/manifest.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace rrm {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path fp(p);
    if (fp.is_relative()) fp = base / fp;
    if (!std::filesystem::exists(fp))
        throw std::runtime_error("manifest: referenced path does not exist: " + fp.string());
    return fp;
}

}  // namespace

PipelineManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error("manifest: malformed JSON in " + path.string() + ": " + e.what());
    }

    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");
    PipelineManifest m;

    if (j.contains("selection")) m.selection = load_selection_config(resolve(base, j.at("selection").get<std::string>()));
    if (j.contains("crf")) m.crf = load_crf_config(resolve(base, j.at("crf").get<std::string>()));
    if (j.contains("energy")) m.energy = load_energy_config(resolve(base, j.at("energy").get<std::string>()));

    if (!j.contains("images")) return m;
    for (const auto& je : j.at("images")) {
        ManifestEntry e;
        e.image = resolve(base, je.at("image").get<std::string>());
        for (const auto& f : je.at("features"))
            e.features.push_back(resolve(base, f.get<std::string>()));
        if (e.features.empty())
            throw std::runtime_error("manifest: image entry needs at least one feature scale");
        e.weights = resolve(base, je.at("weights").get<std::string>());
        e.classes = je.at("classes").get<std::vector<int>>();
        std::set<int> seen;
        for (int id : e.classes) {
            if (id < 1 || id > 254)
                throw std::runtime_error("manifest: class id outside 1..254");
            if (!seen.insert(id).second)
                throw std::runtime_error("manifest: duplicate class id");
        }
        if (e.classes.empty()) throw std::runtime_error("manifest: image entry needs classes");
        m.images.push_back(std::move(e));
    }
    return m;
}

}  // namespace rrm
