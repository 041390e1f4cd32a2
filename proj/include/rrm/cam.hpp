#pragma once

#include <vector>

#include "rrm/tensor.hpp"

namespace rrm {

// Per-class classifier weight vectors, rows in ClassSet order; feature_dim
// must equal the feature stack's channel count.
struct ClassifierWeights {
    int num_classes = 0;
    int feature_dim = 0;
    std::vector<double> w;  // num_classes * feature_dim, row-major

    double at(int c, int ch) const { return w[std::size_t(c) * feature_dim + ch]; }
};

void validate(const ClassifierWeights& cw);

// Per-class activation map: weighted channel sum of the feature stack,
// bilinearly resized to (out_h, out_w), negatives clamped to zero.
CamStack cam_from_features(const TensorF32& features, const ClassifierWeights& weights,
                           int out_h, int out_w);

// Elementwise mean over per-scale stacks already at the reference resolution.
CamStack multiscale_cam(const std::vector<CamStack>& per_scale);

// Per-class division by the class map's max; an all-zero class map stays zero.
Grid3 normalize_fg(const CamStack& cam);

// P_bg(i) = (1 - max_c P_fg[c](i))^gamma, gamma > 1. Returns a 1×H×W grid.
Grid3 background_prob(const Grid3& p_fg, double gamma);

// Channel 0 = background, channels 1..N = foreground in ClassSet order.
ProbMap concat_fg_bg(const Grid3& p_fg, const Grid3& p_bg);

}  // namespace rrm
