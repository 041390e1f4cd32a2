#pragma once

#include "rrm/tensor.hpp"

namespace rrm {

// Mean-field dense CRF over background + foreground classes with a
// spatial-only Gaussian kernel and a bilateral (spatial + color) kernel,
// strict Potts compatibility. Defaults are the widely used dense-CRF
// settings.
struct CrfConfig {
    int iterations = 10;
    double w_smooth = 3.0;
    double sxy_smooth = 3.0;
    double w_appear = 10.0;
    double sxy_appear = 80.0;
    double srgb_appear = 13.0;
    double compat = 1.0;
};

void validate(const CrfConfig& cfg);

// Runs cfg.iterations mean-field updates from the normalized unary and
// returns the final per-pixel class distribution. 64-bit math throughout;
// exact pairwise filtering up to the brute-force cap, lattice filtering
// above it.
ProbMap crf_inference(const ProbMap& unary_probs, const ImageRGB& image, const CrfConfig& cfg);

// Per-pixel argmax of crf_inference; ties break toward the lowest channel.
LabelMap crf_label(const ProbMap& unary_probs, const ImageRGB& image, const CrfConfig& cfg);

// Argmax over channels with the same tie rule, without running the CRF.
LabelMap argmax_labels(const ProbMap& probs);

}  // namespace rrm
