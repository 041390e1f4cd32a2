#include "rrm/cam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rrm/tensor_io.hpp"

namespace rrm {

void validate(const ClassifierWeights& cw) {
    if (cw.num_classes < 1 || cw.feature_dim < 1)
        throw std::invalid_argument("weights: need at least one class and one feature channel");
    if (cw.w.size() != std::size_t(cw.num_classes) * cw.feature_dim)
        throw std::invalid_argument("weights: buffer size mismatch");
    for (double v : cw.w)
        if (!std::isfinite(v)) throw std::invalid_argument("weights: non-finite value");
}

CamStack cam_from_features(const TensorF32& features, const ClassifierWeights& weights,
                           int out_h, int out_w) {
    validate(weights);
    Grid3 f = to_grid(features);
    if (f.channels != weights.feature_dim)
        throw std::invalid_argument("cam: feature channels (" + std::to_string(f.channels) +
                                    ") do not match weight dim (" +
                                    std::to_string(weights.feature_dim) + ")");
    if (out_h < 1 || out_w < 1)
        throw std::invalid_argument("cam: output dimensions must be >= 1");

    Grid3 raw(weights.num_classes, f.height, f.width);
    const int n = f.pixels();
    for (int c = 0; c < weights.num_classes; ++c)
        for (int ch = 0; ch < f.channels; ++ch) {
            const double w = weights.at(c, ch);
            if (w == 0.0) continue;
            for (int i = 0; i < n; ++i) raw.at_flat(c, i) += w * f.at_flat(ch, i);
        }

    CamStack cam = resize_bilinear(raw, out_h, out_w);
    for (double& v : cam.data) v = std::max(v, 0.0);
    return cam;
}

CamStack multiscale_cam(const std::vector<CamStack>& per_scale) {
    if (per_scale.empty()) throw std::invalid_argument("multiscale cam: empty scale list");
    const CamStack& first = per_scale.front();
    for (const CamStack& s : per_scale)
        if (s.channels != first.channels || s.height != first.height || s.width != first.width)
            throw std::invalid_argument("multiscale cam: stacks must share shape");

    CamStack out(first.channels, first.height, first.width);
    const double inv = 1.0 / double(per_scale.size());
    for (const CamStack& s : per_scale)
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += s.data[i];
    for (double& v : out.data) v *= inv;
    return out;
}

Grid3 normalize_fg(const CamStack& cam) {
    Grid3 out(cam.channels, cam.height, cam.width);
    const int n = cam.pixels();
    for (int c = 0; c < cam.channels; ++c) {
        double mx = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = cam.at_flat(c, i);
            if (v < 0.0) throw std::invalid_argument("normalize: negative CAM value");
            mx = std::max(mx, v);
        }
        if (mx == 0.0) continue;  // degenerate class map stays all zeros
        for (int i = 0; i < n; ++i) out.at_flat(c, i) = cam.at_flat(c, i) / mx;
    }
    return out;
}

Grid3 background_prob(const Grid3& p_fg, double gamma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("background prob: gamma must be > 1");
    Grid3 out(1, p_fg.height, p_fg.width);
    const int n = p_fg.pixels();
    for (int i = 0; i < n; ++i) {
        double mx = 0.0;
        for (int c = 0; c < p_fg.channels; ++c) {
            const double v = p_fg.at_flat(c, i);
            if (v < 0.0 || v > 1.0)
                throw std::invalid_argument("background prob: foreground value outside [0,1]");
            mx = std::max(mx, v);
        }
        out.data[i] = std::pow(1.0 - mx, gamma);
    }
    return out;
}

ProbMap concat_fg_bg(const Grid3& p_fg, const Grid3& p_bg) {
    if (p_bg.channels != 1 || p_bg.height != p_fg.height || p_bg.width != p_fg.width)
        throw std::invalid_argument("concat: foreground/background shape mismatch");
    ProbMap out(p_fg.channels + 1, p_fg.height, p_fg.width);
    const int n = p_fg.pixels();
    for (int i = 0; i < n; ++i) out.at_flat(0, i) = p_bg.data[i];
    for (int c = 0; c < p_fg.channels; ++c)
        for (int i = 0; i < n; ++i) out.at_flat(c + 1, i) = p_fg.at_flat(c, i);
    return out;
}

}  // namespace rrm
