#include "rrm/label_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rrm {

void validate(const SelectionConfig& sel) {
    if (sel.mode == SelectionMode::fixed_alpha) {
        // alpha >= 1 is legal and selects nothing (max probability is 1)
        if (!(sel.alpha > 0.0) || !std::isfinite(sel.alpha))
            throw std::invalid_argument("selection: alpha must be positive");
    } else {
        if (!(sel.ratio > 0.0 && sel.ratio <= 1.0))
            throw std::invalid_argument("selection: ratio must be in (0,1]");
    }
}

namespace {

// ceil(ratio * count) with a relative guard so exact products like 0.4*5
// do not round up from floating-point dust.
int selection_count(double ratio, int count) {
    const double v = ratio * double(count);
    const int k = int(std::ceil(v * (1.0 - 1e-12)));
    return std::min(std::max(k, 0), count);
}

}  // namespace

LabelMap cam_label(const ProbMap& probs, const SelectionConfig& sel) {
    validate(sel);
    if (probs.channels < 1 || probs.channels > 255)
        throw std::invalid_argument("cam label: channel count must be 1..255");
    const int n = probs.pixels();

    // per-pixel argmax (lowest channel wins ties) and its probability
    std::vector<int> arg(n);
    std::vector<double> top(n);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double bv = probs.at_flat(0, i);
        for (int c = 1; c < probs.channels; ++c) {
            const double v = probs.at_flat(c, i);
            if (v > bv) {
                bv = v;
                best = c;
            }
        }
        arg[i] = best;
        top[i] = bv;
    }

    LabelMap out(probs.height, probs.width);

    if (sel.mode == SelectionMode::fixed_alpha) {
        for (int i = 0; i < n; ++i)
            out.labels[i] = top[i] > sel.alpha ? std::uint8_t(arg[i]) : kUnlabeled;
        return out;
    }

    // per-class top-k over pixels grouped by argmax class
    std::vector<std::vector<int>> groups(probs.channels);
    for (int i = 0; i < n; ++i) groups[arg[i]].push_back(i);
    for (int c = 0; c < probs.channels; ++c) {
        auto& g = groups[c];
        if (g.empty()) continue;
        const int keep = selection_count(sel.ratio, int(g.size()));
        // descending probability; row-major order breaks ties
        std::stable_sort(g.begin(), g.end(),
                         [&](int a, int b) { return top[a] > top[b]; });
        for (int k = 0; k < keep; ++k) out.labels[g[k]] = std::uint8_t(c);
    }
    return out;
}

LabelMap intersect_labels(const LabelMap& cam, const LabelMap& crf) {
    if (cam.height != crf.height || cam.width != crf.width)
        throw std::invalid_argument("intersect: label map dimensions differ");
    LabelMap out(cam.height, cam.width);
    for (std::size_t i = 0; i < cam.labels.size(); ++i)
        out.labels[i] = cam.labels[i] == crf.labels[i] ? cam.labels[i] : kUnlabeled;
    return out;
}

ProbMap fused_prob_map(const std::vector<TensorF32>& per_scale_features,
                       const ClassifierWeights& weights, const ImageRGB& image, double gamma) {
    if (per_scale_features.empty())
        throw std::invalid_argument("mine: need at least one feature scale");
    validate(image);

    std::vector<CamStack> cams;
    cams.reserve(per_scale_features.size());
    for (const TensorF32& f : per_scale_features)
        cams.push_back(cam_from_features(f, weights, image.height, image.width));

    const CamStack fused = multiscale_cam(cams);
    const Grid3 p_fg = normalize_fg(fused);
    const Grid3 p_bg = background_prob(p_fg, gamma);
    return concat_fg_bg(p_fg, p_bg);
}

LabelMap mine_reliable_regions(const std::vector<TensorF32>& per_scale_features,
                               const ClassifierWeights& weights, const ClassSet& classes,
                               const ImageRGB& image, double gamma, const SelectionConfig& sel,
                               const CrfConfig& crf_cfg) {
    validate(classes);
    if (classes.count() != weights.num_classes)
        throw std::invalid_argument("mine: class set size does not match weight rows");

    const ProbMap p = fused_prob_map(per_scale_features, weights, image, gamma);
    const LabelMap cam = cam_label(p, sel);
    const LabelMap crf = crf_label(p, image, crf_cfg);
    LabelMap final_map = intersect_labels(cam, crf);

    // channel indices -> global class ids
    for (std::uint8_t& v : final_map.labels) {
        if (v == kUnlabeled || v == 0) continue;
        v = std::uint8_t(classes.foreground_ids[v - 1]);
    }
    return final_map;
}

}  // namespace rrm
