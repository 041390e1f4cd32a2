#pragma once

#include <cstdint>
#include <vector>

#include "rrm/cam.hpp"
#include "rrm/tensor.hpp"

namespace rrm {

// Deterministic bright-square test scene: a noisy bright square on a dark
// canvas, per-scale feature stacks whose first channel peaks on the square,
// single-row classifier weights, and the exact ground truth. Stands in for
// a backbone when exercising the mining pipeline.
struct SquareFixture {
    ImageRGB image;
    LabelMap ground_truth;  // 1 inside the square, 0 outside
    std::vector<TensorF32> per_scale_features;
    ClassifierWeights weights;
    ClassSet classes;  // {1}
    int square_x0 = 0, square_y0 = 0, square_size = 0;
};

// Feature scales used for the fixture stacks.
const std::vector<double>& fixture_scales();

SquareFixture make_square_fixture(std::uint64_t seed, int canvas = 48, int square = 16);

}  // namespace rrm
