#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "rrm/tensor.hpp"

namespace rrm {

// (N+1)x(N+1) counts, rows = ground truth, cols = prediction; ground-truth
// 255 pixels are excluded.
struct ConfusionMatrix {
    int num_classes = 0;  // foreground classes; matrix side is num_classes+1
    std::vector<std::int64_t> counts;

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int n)
        : num_classes(n), counts(std::size_t(n + 1) * (n + 1), 0) {}

    int side() const { return num_classes + 1; }
    std::int64_t at(int gt, int pred) const { return counts[std::size_t(gt) * side() + pred]; }
    std::int64_t& at(int gt, int pred) { return counts[std::size_t(gt) * side() + pred]; }
    std::int64_t total() const;

    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

ConfusionMatrix confusion(const LabelMap& gt, const LabelMap& pred, int num_classes);

struct MiouResult {
    double miou = 0.0;
    std::vector<double> per_class;  // index = class id; NaN-free, see valid
    std::vector<bool> valid;        // false when the class never occurs
};

// IoU_c = M[c][c] / (row_c + col_c - M[c][c]); classes absent from both gt
// and prediction are excluded from the mean.
MiouResult miou(const ConfusionMatrix& cm);

struct PseudoLabelReport {
    struct PerClass {
        std::int64_t labeled = 0;    // pixels the pseudo map assigns to this class
        std::int64_t evaluated = 0;  // of those, pixels with known ground truth
        std::int64_t correct = 0;
        std::optional<double> precision;
    };
    double labeled_ratio = 0.0;            // fraction of pixels != 255
    std::optional<double> precision;       // over labeled pixels with known gt
    std::map<int, PerClass> per_class;     // keyed by class id
};

PseudoLabelReport pseudo_label_report(const LabelMap& pseudo, const LabelMap& gt);

}  // namespace rrm
