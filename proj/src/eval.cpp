#include "rrm/eval.hpp"

#include <stdexcept>
#include <string>

namespace rrm {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (std::int64_t v : counts) t += v;
    return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (num_classes != other.num_classes)
        throw std::invalid_argument("confusion: class counts differ");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    return *this;
}

ConfusionMatrix confusion(const LabelMap& gt, const LabelMap& pred, int num_classes) {
    if (num_classes < 0 || num_classes > 254)
        throw std::invalid_argument("confusion: class count outside 0..254");
    if (gt.height != pred.height || gt.width != pred.width)
        throw std::invalid_argument("confusion: label map dimensions differ");

    ConfusionMatrix cm(num_classes);
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
        const std::uint8_t p = pred.labels[i];
        if (p == kUnlabeled)
            throw std::invalid_argument("confusion: prediction contains unlabeled pixels");
        if (p > num_classes)
            throw std::invalid_argument("confusion: prediction label " + std::to_string(int(p)) +
                                        " outside 0.." + std::to_string(num_classes));
        const std::uint8_t g = gt.labels[i];
        if (g == kUnlabeled) continue;
        if (g > num_classes)
            throw std::invalid_argument("confusion: ground-truth label " +
                                        std::to_string(int(g)) + " outside 0.." +
                                        std::to_string(num_classes));
        ++cm.at(g, p);
    }
    return cm;
}

MiouResult miou(const ConfusionMatrix& cm) {
    const int side = cm.side();
    MiouResult r;
    r.per_class.assign(side, 0.0);
    r.valid.assign(side, false);

    double sum = 0.0;
    int counted = 0;
    for (int c = 0; c < side; ++c) {
        std::int64_t row = 0, col = 0;
        for (int k = 0; k < side; ++k) {
            row += cm.at(c, k);
            col += cm.at(k, c);
        }
        const std::int64_t denom = row + col - cm.at(c, c);
        if (denom == 0) continue;  // class absent from gt and prediction
        r.valid[c] = true;
        r.per_class[c] = double(cm.at(c, c)) / double(denom);
        sum += r.per_class[c];
        ++counted;
    }
    if (counted == 0) throw std::invalid_argument("miou: no class occurs in either map");
    r.miou = sum / counted;
    return r;
}

PseudoLabelReport pseudo_label_report(const LabelMap& pseudo, const LabelMap& gt) {
    if (pseudo.height != gt.height || pseudo.width != gt.width)
        throw std::invalid_argument("report: label map dimensions differ");

    PseudoLabelReport rep;
    std::int64_t labeled = 0, evaluated = 0, correct = 0;
    for (std::size_t i = 0; i < pseudo.labels.size(); ++i) {
        const std::uint8_t p = pseudo.labels[i];
        if (p == kUnlabeled) continue;
        ++labeled;
        auto& pc = rep.per_class[p];
        ++pc.labeled;
        const std::uint8_t g = gt.labels[i];
        if (g == kUnlabeled) continue;
        ++evaluated;
        ++pc.evaluated;
        if (g == p) {
            ++correct;
            ++pc.correct;
        }
    }

    rep.labeled_ratio = pseudo.labels.empty() ? 0.0 : double(labeled) / double(pseudo.labels.size());
    if (evaluated > 0) rep.precision = double(correct) / double(evaluated);
    for (auto& [id, pc] : rep.per_class)
        if (pc.evaluated > 0) pc.precision = double(pc.correct) / double(pc.evaluated);
    return rep;
}

}  // namespace rrm
