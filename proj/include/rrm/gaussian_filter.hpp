#pragma once

#include <vector>

#include "rrm/tensor.hpp"

namespace rrm {

// Largest pixel count the O(N^2) reference path accepts by default.
inline constexpr int kBruteForceCap = 4096;

// Spatial position and color of one pixel — the feature space shared by the
// CRF bilateral kernel and the dense energy kernel.
struct PixelFeature {
    double x = 0, y = 0;
    double r = 0, g = 0, b = 0;
};

// Flat (x, y) rows, one per pixel, row-major pixel order.
std::vector<double> spatial_features(int height, int width);
// Flat (x, y, r, g, b) rows built from pixel positions and 0..255 colors.
std::vector<double> bilateral_features(const ImageRGB& image);

// Unnormalized Gaussian convolution with the self term excluded:
//   out[c](i) = sum_{j != i} exp(-0.5 * sum_d ((f_i[d]-f_j[d]) / sigma[d])^2) * values[c](j)
// Exact double-loop evaluation; throws if H*W exceeds the cap.
Grid3 gaussian_filter_bruteforce(const Grid3& values, const std::vector<double>& features,
                                 int feature_dim, const std::vector<double>& bandwidths,
                                 int cap = kBruteForceCap);

// Permutohedral-lattice approximation of the same convolution; the self term
// is filtered along and subtracted explicitly (exp(0) = 1).
Grid3 gaussian_filter_fast(const Grid3& values, const std::vector<double>& features,
                           int feature_dim, const std::vector<double>& bandwidths);

}  // namespace rrm
