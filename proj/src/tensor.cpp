#include "rrm/tensor.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace rrm {

std::size_t shape_product(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 1) throw std::invalid_argument("tensor: shape axis must be >= 1");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

void validate(const TensorF32& t) {
    if (t.shape.empty() || t.shape.size() > 4)
        throw std::invalid_argument("tensor: shape must have 1-4 axes");
    if (shape_product(t.shape) != t.data.size())
        throw std::invalid_argument("tensor: shape/payload size mismatch");
    for (float v : t.data)
        if (!std::isfinite(v)) throw std::invalid_argument("tensor: non-finite value");
}

void validate(const ImageRGB& img) {
    if (img.height < 1 || img.width < 1)
        throw std::invalid_argument("image: height and width must be >= 1");
    if (img.pixels.size() != std::size_t(img.height) * img.width * 3)
        throw std::invalid_argument("image: pixel buffer size mismatch");
}

void validate(const LabelMap& m, int num_classes) {
    if (m.height < 1 || m.width < 1)
        throw std::invalid_argument("label map: height and width must be >= 1");
    if (m.labels.size() != std::size_t(m.height) * m.width)
        throw std::invalid_argument("label map: buffer size mismatch");
    for (std::uint8_t v : m.labels)
        if (v != kUnlabeled && v > num_classes)
            throw std::invalid_argument("label map: value " + std::to_string(int(v)) +
                                        " outside 0.." + std::to_string(num_classes) + " and 255");
}

void validate(const ClassSet& cs) {
    if (cs.foreground_ids.empty())
        throw std::invalid_argument("class set: must be nonempty");
    std::set<int> seen;
    for (int id : cs.foreground_ids) {
        if (id < 1 || id > 254)
            throw std::invalid_argument("class set: id " + std::to_string(id) + " outside 1..254");
        if (!seen.insert(id).second)
            throw std::invalid_argument("class set: duplicate id " + std::to_string(id));
    }
}

Grid3 to_grid(const TensorF32& t) {
    validate(t);
    if (t.shape.size() != 3)
        throw std::invalid_argument("tensor: expected 3 axes (C,H,W), got " +
                                    std::to_string(t.shape.size()));
    Grid3 g(t.shape[0], t.shape[1], t.shape[2]);
    for (std::size_t i = 0; i < t.data.size(); ++i) g.data[i] = t.data[i];
    return g;
}

TensorF32 to_tensor(const Grid3& g) {
    TensorF32 t;
    t.shape = {g.channels, g.height, g.width};
    t.data.resize(g.data.size());
    for (std::size_t i = 0; i < g.data.size(); ++i) t.data[i] = static_cast<float>(g.data[i]);
    return t;
}

}  // namespace rrm
