#pragma once

#include <vector>

#include "rrm/gaussian_filter.hpp"
#include "rrm/tensor.hpp"

namespace rrm {

enum class EnergyNormalization { pixel_count, kernel_sum };
enum class FilterPath { brute, lattice };
enum class SoftFilterGrad { stop, subgradient };

// Dense energy loss configuration. sigma_d is in pixels, sigma_r in 8-bit
// color units. The 1/W normalization is either the pixel count or the total
// pairwise kernel mass. S(i) is treated as a constant under differentiation
// unless soft_filter_grad selects the subgradient route.
struct EnergyConfig {
    double sigma_d = 15.0;
    double sigma_r = 100.0;
    EnergyNormalization normalization = EnergyNormalization::pixel_count;
    bool soft_filter = true;
    FilterPath fast_path = FilterPath::brute;
    int brute_cap = kBruteForceCap;
    SoftFilterGrad soft_filter_grad = SoftFilterGrad::stop;
};

void validate(const EnergyConfig& cfg);

struct LossValueGrad {
    double value = 0.0;
    Grid3 grad;  // dloss/dP, same shape as the probability input
};

// Masked cross entropy over labeled pixels (labels != 255), computed as the
// mean over labeled background pixels plus the mean over labeled foreground
// pixels. Empty label set gives zero loss and gradient.
LossValueGrad cross_entropy_masked(const ProbMap& p_net, const LabelMap& labels);

// Literal pair-sum form of the energy (the double loop over pixel pairs and
// distinct class pairs) — the oracle for the Potts-simplified energy_loss.
double energy_pairwise_reference(const ProbMap& p_net, const ImageRGB& image,
                                 const LabelMap& labels, const EnergyConfig& cfg);

// Potts-form dense energy loss with the soft filter, plus its analytic
// gradient (kernel symmetry gives grad = S*Ĝ(1-P) - Ĝ(S*P), scaled by 1/W).
LossValueGrad energy_loss(const ProbMap& p_net, const ImageRGB& image, const LabelMap& labels,
                          const EnergyConfig& cfg);

// Energy value with an externally pinned per-pixel soft filter. Finite
// difference checks use this so S stays constant on both routes, matching
// the stop-gradient convention of energy_loss.
double energy_value_pinned_soft_filter(const ProbMap& p_net, const ImageRGB& image,
                                       const std::vector<double>& soft_filter,
                                       const EnergyConfig& cfg);

// The S(i) values energy_loss would use for this input.
std::vector<double> energy_soft_filter(const ProbMap& p_net, const LabelMap& labels,
                                       const EnergyConfig& cfg);

// Sum of cross_entropy_masked and energy_loss, value and gradient.
LossValueGrad joint_seg_loss(const ProbMap& p_net, const ImageRGB& image, const LabelMap& labels,
                             const EnergyConfig& cfg);

// Multi-label binary cross entropy over per-class scores with logistic
// squashing, averaged over the class count. present holds 1-based class ids.
// grad comes back as an N×1×1 grid.
LossValueGrad classification_loss(const std::vector<double>& scores,
                                  const std::vector<int>& present);

// Channelwise softmax with log-sum-exp stabilization, for callers holding
// raw scores instead of probabilities.
ProbMap softmax(const Grid3& scores);

}  // namespace rrm
