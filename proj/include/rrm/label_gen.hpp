#pragma once

#include <vector>

#include "rrm/cam.hpp"
#include "rrm/crf.hpp"
#include "rrm/tensor.hpp"

namespace rrm {

enum class SelectionMode { fixed_alpha, per_class_ratio };

// fixed_alpha keeps pixels whose top probability beats alpha; per_class_ratio
// keeps the most confident ceil(ratio * count) pixels of each argmax class.
struct SelectionConfig {
    SelectionMode mode = SelectionMode::per_class_ratio;
    double alpha = 0.0;  // fixed_alpha: in (0,1)
    double ratio = 0.4;  // per_class_ratio: in (0,1]
};

void validate(const SelectionConfig& sel);

// Confident-label selection over a fg+bg probability map. Output labels are
// channel indices (0 = background); unselected pixels are 255. Top-k ties
// break by row-major pixel order.
LabelMap cam_label(const ProbMap& probs, const SelectionConfig& sel);

// Keeps a pixel's CAM label only where the CRF label agrees; everything
// else, including pixels already unlabeled in I_cam, becomes 255.
LabelMap intersect_labels(const LabelMap& cam, const LabelMap& crf);

// Full mining pipeline: per-scale CAMs -> multi-scale fusion -> fg/bg
// probabilities -> CRF label ∩ confident CAM label. The returned map carries
// global class ids (0 background, classes.foreground_ids, 255 undecided).
LabelMap mine_reliable_regions(const std::vector<TensorF32>& per_scale_features,
                               const ClassifierWeights& weights, const ClassSet& classes,
                               const ImageRGB& image, double gamma, const SelectionConfig& sel,
                               const CrfConfig& crf_cfg);

// Same pipeline, stopping at the fused fg+bg probability map (channel order:
// background, then classes in ClassSet order).
ProbMap fused_prob_map(const std::vector<TensorF32>& per_scale_features,
                       const ClassifierWeights& weights, const ImageRGB& image, double gamma);

}  // namespace rrm
