#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace rrm {

// Label value marking a pixel whose class is not decided.
inline constexpr std::uint8_t kUnlabeled = 255;

// Dense array with 1-4 axes, row-major. Payload is 32-bit on disk; compute
// paths promote to double where precision matters.
struct TensorF32 {
    std::vector<int> shape;
    std::vector<float> data;

    std::size_t size() const { return data.size(); }
};

std::size_t shape_product(const std::vector<int>& shape);

// Throws std::invalid_argument if the shape is empty/degenerate, shape and
// payload size disagree, or any value is NaN/Inf.
void validate(const TensorF32& t);

struct ImageRGB {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels;  // H*W*3, RGB interleaved

    ImageRGB() = default;
    ImageRGB(int h, int w) : height(h), width(w), pixels(std::size_t(h) * w * 3, 0) {}

    std::uint8_t at(int y, int x, int ch) const {
        return pixels[(std::size_t(y) * width + x) * 3 + ch];
    }
    std::uint8_t& at(int y, int x, int ch) {
        return pixels[(std::size_t(y) * width + x) * 3 + ch];
    }
};

void validate(const ImageRGB& img);

struct LabelMap {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> labels;  // H*W, class id in 0..N or kUnlabeled

    LabelMap() = default;
    LabelMap(int h, int w, std::uint8_t fill = kUnlabeled)
        : height(h), width(w), labels(std::size_t(h) * w, fill) {}

    std::uint8_t at(int y, int x) const { return labels[std::size_t(y) * width + x]; }
    std::uint8_t& at(int y, int x) { return labels[std::size_t(y) * width + x]; }
    std::size_t size() const { return labels.size(); }
};

// Throws if any label is outside {0..num_classes} ∪ {255}.
void validate(const LabelMap& m, int num_classes);

// Ordered foreground class ids in 1..N, no duplicates. Background id is
// fixed at 0 and never listed.
struct ClassSet {
    std::vector<int> foreground_ids;

    int count() const { return static_cast<int>(foreground_ids.size()); }
};

void validate(const ClassSet& cs);

// Channel-major stack of double maps. CAM stacks and probability maps share
// this layout; channel order follows the ClassSet (channel 0 is background
// in fg+bg probability maps).
struct Grid3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Grid3() = default;
    Grid3(int c, int h, int w)
        : channels(c), height(h), width(w), data(std::size_t(c) * h * w, 0.0) {}

    int pixels() const { return height * width; }
    std::size_t size() const { return data.size(); }
    double at(int c, int y, int x) const {
        return data[(std::size_t(c) * height + y) * width + x];
    }
    double& at(int c, int y, int x) {
        return data[(std::size_t(c) * height + y) * width + x];
    }
    // flat pixel index i = y*width + x
    double at_flat(int c, int i) const { return data[std::size_t(c) * height * width + i]; }
    double& at_flat(int c, int i) { return data[std::size_t(c) * height * width + i]; }
};

using CamStack = Grid3;
using ProbMap = Grid3;

// 3-axis tensor -> Grid3 (throws unless t has exactly 3 axes).
Grid3 to_grid(const TensorF32& t);
// Doubles narrowed to f32.
TensorF32 to_tensor(const Grid3& g);

}  // namespace rrm
