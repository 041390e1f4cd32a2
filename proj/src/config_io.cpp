#include "rrm/config_io.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "rrm/util.hpp"

namespace rrm {

namespace {

nlohmann::json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error("config: malformed JSON in " + path.string() + ": " + e.what());
    }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const char* what) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::runtime_error(std::string(what) + ": unknown field \"" + it.key() + "\"");
}

}  // namespace

std::string to_string(SelectionMode m) {
    return m == SelectionMode::fixed_alpha ? "fixed_alpha" : "per_class_ratio";
}
std::string to_string(EnergyNormalization n) {
    return n == EnergyNormalization::pixel_count ? "pixel_count" : "kernel_sum";
}
std::string to_string(FilterPath p) { return p == FilterPath::brute ? "brute" : "lattice"; }
std::string to_string(SoftFilterGrad g) {
    return g == SoftFilterGrad::stop ? "stop" : "subgradient";
}

nlohmann::json to_json(const SelectionConfig& sel) {
    nlohmann::json j;
    j["mode"] = to_string(sel.mode);
    if (sel.mode == SelectionMode::fixed_alpha)
        j["alpha"] = round_g9(sel.alpha);
    else
        j["ratio"] = round_g9(sel.ratio);
    return j;
}

SelectionConfig selection_from_json(const nlohmann::json& j) {
    reject_unknown(j, {"mode", "alpha", "ratio"}, "selection config");
    SelectionConfig sel;
    const std::string mode = j.value("mode", std::string("per_class_ratio"));
    if (mode == "fixed_alpha")
        sel.mode = SelectionMode::fixed_alpha;
    else if (mode == "per_class_ratio")
        sel.mode = SelectionMode::per_class_ratio;
    else
        throw std::runtime_error("selection config: unknown mode \"" + mode + "\"");
    if (j.contains("alpha")) sel.alpha = j.at("alpha").get<double>();
    if (j.contains("ratio")) sel.ratio = j.at("ratio").get<double>();
    validate(sel);
    return sel;
}

nlohmann::json to_json(const CrfConfig& cfg) {
    return nlohmann::json{{"iterations", cfg.iterations},
                          {"w_smooth", round_g9(cfg.w_smooth)},
                          {"sxy_smooth", round_g9(cfg.sxy_smooth)},
                          {"w_appear", round_g9(cfg.w_appear)},
                          {"sxy_appear", round_g9(cfg.sxy_appear)},
                          {"srgb_appear", round_g9(cfg.srgb_appear)},
                          {"compat", round_g9(cfg.compat)}};
}

CrfConfig crf_from_json(const nlohmann::json& j) {
    reject_unknown(j,
                   {"iterations", "w_smooth", "sxy_smooth", "w_appear", "sxy_appear",
                    "srgb_appear", "compat"},
                   "crf config");
    CrfConfig cfg;
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.w_smooth = j.value("w_smooth", cfg.w_smooth);
    cfg.sxy_smooth = j.value("sxy_smooth", cfg.sxy_smooth);
    cfg.w_appear = j.value("w_appear", cfg.w_appear);
    cfg.sxy_appear = j.value("sxy_appear", cfg.sxy_appear);
    cfg.srgb_appear = j.value("srgb_appear", cfg.srgb_appear);
    cfg.compat = j.value("compat", cfg.compat);
    validate(cfg);
    return cfg;
}

nlohmann::json to_json(const EnergyConfig& cfg) {
    return nlohmann::json{{"sigma_d", round_g9(cfg.sigma_d)},
                          {"sigma_r", round_g9(cfg.sigma_r)},
                          {"normalization", to_string(cfg.normalization)},
                          {"soft_filter", cfg.soft_filter ? "enabled" : "disabled"},
                          {"fast_path", to_string(cfg.fast_path)},
                          {"brute_cap", cfg.brute_cap},
                          {"soft_filter_grad", to_string(cfg.soft_filter_grad)}};
}

EnergyConfig energy_from_json(const nlohmann::json& j) {
    reject_unknown(j,
                   {"sigma_d", "sigma_r", "normalization", "soft_filter", "fast_path",
                    "brute_cap", "soft_filter_grad"},
                   "energy config");
    EnergyConfig cfg;
    cfg.sigma_d = j.value("sigma_d", cfg.sigma_d);
    cfg.sigma_r = j.value("sigma_r", cfg.sigma_r);
    if (j.contains("normalization")) {
        const std::string n = j.at("normalization").get<std::string>();
        if (n == "pixel_count")
            cfg.normalization = EnergyNormalization::pixel_count;
        else if (n == "kernel_sum")
            cfg.normalization = EnergyNormalization::kernel_sum;
        else
            throw std::runtime_error("energy config: unknown normalization \"" + n + "\"");
    }
    if (j.contains("soft_filter")) {
        const std::string s = j.at("soft_filter").get<std::string>();
        if (s == "enabled")
            cfg.soft_filter = true;
        else if (s == "disabled")
            cfg.soft_filter = false;
        else
            throw std::runtime_error("energy config: soft_filter must be enabled/disabled");
    }
    if (j.contains("fast_path")) {
        const std::string p = j.at("fast_path").get<std::string>();
        if (p == "brute")
            cfg.fast_path = FilterPath::brute;
        else if (p == "lattice")
            cfg.fast_path = FilterPath::lattice;
        else
            throw std::runtime_error("energy config: fast_path must be brute/lattice");
    }
    cfg.brute_cap = j.value("brute_cap", cfg.brute_cap);
    if (j.contains("soft_filter_grad")) {
        const std::string g = j.at("soft_filter_grad").get<std::string>();
        if (g == "stop")
            cfg.soft_filter_grad = SoftFilterGrad::stop;
        else if (g == "subgradient")
            cfg.soft_filter_grad = SoftFilterGrad::subgradient;
        else
            throw std::runtime_error("energy config: soft_filter_grad must be stop/subgradient");
    }
    validate(cfg);
    return cfg;
}

SelectionConfig load_selection_config(const std::filesystem::path& path) {
    return selection_from_json(parse_file(path));
}
CrfConfig load_crf_config(const std::filesystem::path& path) {
    return crf_from_json(parse_file(path));
}
EnergyConfig load_energy_config(const std::filesystem::path& path) {
    return energy_from_json(parse_file(path));
}

}  // namespace rrm
