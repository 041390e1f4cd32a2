#include <doctest.h>

#include <stdexcept>

#include "rrm/eval.hpp"
#include "rrm/util.hpp"

using namespace rrm;

TEST_CASE("confusion") {
    SUBCASE("all-255 ground truth counts nothing") {
        const LabelMap gt(2, 2);  // all 255
        const LabelMap pred(2, 2, 0);
        const ConfusionMatrix cm = confusion(gt, pred, 3);
        CHECK(cm.total() == 0);
    }
    SUBCASE("perfect prediction is diagonal") {
        LabelMap m(1, 4);
        m.labels = {0, 1, 2, 1};
        const ConfusionMatrix cm = confusion(m, m, 2);
        CHECK(cm.total() == 4);
        CHECK(cm.at(0, 0) == 1);
        CHECK(cm.at(1, 1) == 2);
        CHECK(cm.at(2, 2) == 1);
        CHECK(cm.at(0, 1) == 0);
    }
    SUBCASE("hand count: gt=(0,1), pred=(0,0)") {
        LabelMap gt(2, 1), pred(2, 1, 0);
        gt.labels = {0, 1};
        const ConfusionMatrix cm = confusion(gt, pred, 1);
        CHECK(cm.at(0, 0) == 1);
        CHECK(cm.at(1, 0) == 1);
        CHECK(cm.at(1, 1) == 0);
    }
    SUBCASE("unlabeled prediction rejected") {
        const LabelMap gt(1, 1, 0);
        const LabelMap pred(1, 1);  // 255
        CHECK_THROWS_WITH_AS(confusion(gt, pred, 1), doctest::Contains("unlabeled"),
                             std::invalid_argument);
    }
    SUBCASE("dimension mismatch rejected") {
        const LabelMap gt(1, 2, 0), pred(2, 1, 0);
        CHECK_THROWS_AS(confusion(gt, pred, 1), std::invalid_argument);
    }
    SUBCASE("totals equal the gt!=255 pixel count") {
        Rng rng(10);
        LabelMap gt(8, 8), pred(8, 8, 0);
        int known = 0;
        for (auto& v : gt.labels) {
            if (rng.uniform() < 0.4) {
                v = std::uint8_t(rng.uniform_int(4));
                ++known;
            }
        }
        for (auto& v : pred.labels) v = std::uint8_t(rng.uniform_int(4));
        CHECK(confusion(gt, pred, 3).total() == known);
    }
}

TEST_CASE("miou") {
    SUBCASE("perfect prediction gives 1.0") {
        LabelMap m(1, 3);
        m.labels = {0, 1, 2};
        const MiouResult r = miou(confusion(m, m, 2));
        CHECK(r.miou == doctest::Approx(1.0));
    }
    SUBCASE("disjoint prediction gives IoU zero for that class") {
        LabelMap gt(1, 2), pred(1, 2);
        gt.labels = {1, 1};
        pred.labels = {2, 2};
        const MiouResult r = miou(confusion(gt, pred, 2));
        CHECK(r.per_class[1] == doctest::Approx(0.0));
        CHECK(r.per_class[2] == doctest::Approx(0.0));
    }
    SUBCASE("hand case: mIoU 0.25") {
        // M[0][0]=1, M[1][0]=1 -> IoU_0 = 1/2, IoU_1 = 0
        LabelMap gt(2, 1), pred(2, 1, 0);
        gt.labels = {0, 1};
        const MiouResult r = miou(confusion(gt, pred, 1));
        CHECK(r.per_class[0] == doctest::Approx(0.5));
        CHECK(r.per_class[1] == doctest::Approx(0.0));
        CHECK(r.miou == doctest::Approx(0.25));
    }
    SUBCASE("classes absent everywhere are excluded from the mean") {
        LabelMap m(1, 2, 0);
        const MiouResult r = miou(confusion(m, m, 5));
        CHECK(r.valid[0]);
        for (int c = 1; c <= 5; ++c) CHECK(!r.valid[c]);
        CHECK(r.miou == doctest::Approx(1.0));
    }
    SUBCASE("empty matrix errors") {
        const ConfusionMatrix cm(3);
        CHECK_THROWS_AS(miou(cm), std::invalid_argument);
    }
    SUBCASE("iou bounds and permutation invariance") {
        Rng rng(17);
        LabelMap gt(10, 10), pred(10, 10, 0);
        for (auto& v : gt.labels) v = std::uint8_t(rng.uniform_int(3));
        for (auto& v : pred.labels) v = std::uint8_t(rng.uniform_int(3));
        const MiouResult r = miou(confusion(gt, pred, 2));
        for (int c = 0; c <= 2; ++c)
            if (r.valid[c]) {
                CHECK(r.per_class[c] >= 0.0);
                CHECK(r.per_class[c] <= 1.0);
            }

        // permute ids 0<->2 in both maps: same mIoU
        LabelMap gt2 = gt, pred2 = pred;
        for (auto& v : gt2.labels) v = v == 0 ? 2 : (v == 2 ? 0 : v);
        for (auto& v : pred2.labels) v = v == 0 ? 2 : (v == 2 ? 0 : v);
        const MiouResult r2 = miou(confusion(gt2, pred2, 2));
        CHECK(r2.miou == doctest::Approx(r.miou).epsilon(1e-12));
        CHECK(r2.per_class[2] == doctest::Approx(r.per_class[0]).epsilon(1e-12));
    }
}

TEST_CASE("pseudo_label_report") {
    SUBCASE("all-255 pseudo map: ratio 0, precision absent") {
        const LabelMap pseudo(2, 2);
        const LabelMap gt(2, 2, 1);
        const PseudoLabelReport rep = pseudo_label_report(pseudo, gt);
        CHECK(rep.labeled_ratio == 0.0);
        CHECK(!rep.precision.has_value());
    }
    SUBCASE("pseudo == gt everywhere: ratio 1, precision 1") {
        LabelMap m(2, 2, 1);
        m.labels = {0, 1, 1, 0};
        const PseudoLabelReport rep = pseudo_label_report(m, m);
        CHECK(rep.labeled_ratio == doctest::Approx(1.0));
        REQUIRE(rep.precision.has_value());
        CHECK(*rep.precision == doctest::Approx(1.0));
    }
    SUBCASE("half labeled, all correct") {
        LabelMap pseudo(1, 4), gt(1, 4);
        pseudo.labels = {0, 255, 1, 255};
        gt.labels = {0, 0, 1, 1};
        const PseudoLabelReport rep = pseudo_label_report(pseudo, gt);
        CHECK(rep.labeled_ratio == doctest::Approx(0.5));
        REQUIRE(rep.precision.has_value());
        CHECK(*rep.precision == doctest::Approx(1.0));
        CHECK(rep.per_class.at(0).labeled == 1);
        CHECK(rep.per_class.at(1).correct == 1);
    }
    SUBCASE("gt 255 pixels are excluded from precision but not from ratio") {
        LabelMap pseudo(1, 2), gt(1, 2);
        pseudo.labels = {1, 1};
        gt.labels = {255, 2};
        const PseudoLabelReport rep = pseudo_label_report(pseudo, gt);
        CHECK(rep.labeled_ratio == doctest::Approx(1.0));
        REQUIRE(rep.precision.has_value());
        CHECK(*rep.precision == doctest::Approx(0.0));
    }
}
