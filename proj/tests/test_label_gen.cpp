#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <set>

#include "rrm/label_gen.hpp"
#include "rrm/selftest.hpp"
#include "rrm/util.hpp"

using namespace rrm;

TEST_CASE("cam_label fixed_alpha") {
    ProbMap p(2, 1, 3);
    p.data = {0.9, 0.5, 0.2,   // bg channel
              0.1, 0.5, 0.8};  // fg channel

    SelectionConfig sel;
    sel.mode = SelectionMode::fixed_alpha;

    SUBCASE("alpha >= 1 selects nothing") {
        sel.alpha = 1.0;
        const LabelMap m = cam_label(p, sel);
        for (auto v : m.labels) CHECK(v == kUnlabeled);
    }
    SUBCASE("threshold picks only confident pixels") {
        sel.alpha = 0.6;
        const LabelMap m = cam_label(p, sel);
        CHECK(int(m.labels[0]) == 0);          // 0.9 > 0.6
        CHECK(m.labels[1] == kUnlabeled);      // max 0.5 (tie -> bg) not above
        CHECK(int(m.labels[2]) == 1);          // 0.8 > 0.6
    }
    SUBCASE("labeled set shrinks monotonically in alpha") {
        Rng rng(9);
        const ProbMap randp = selftest::random_prob_map(rng, 3, 8, 8);
        std::set<int> prev;
        bool first = true;
        for (const double a : {0.34, 0.45, 0.55, 0.7, 0.9}) {
            sel.alpha = a;
            const LabelMap m = cam_label(randp, sel);
            std::set<int> cur;
            for (int i = 0; i < 64; ++i)
                if (m.labels[i] != kUnlabeled) cur.insert(i);
            if (!first)
                CHECK(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
            prev = cur;
            first = false;
        }
    }
}

TEST_CASE("cam_label per_class_ratio") {
    SelectionConfig sel;  // default: ratio mode

    SUBCASE("ratio 1.0 labels every pixel with its argmax") {
        Rng rng(3);
        const ProbMap p = selftest::random_prob_map(rng, 3, 6, 6);
        sel.ratio = 1.0;
        const LabelMap m = cam_label(p, sel);
        for (int i = 0; i < 36; ++i) {
            int best = 0;
            for (int c = 1; c < 3; ++c)
                if (p.at_flat(c, i) > p.at_flat(best, i)) best = c;
            CHECK(int(m.labels[i]) == best);
        }
    }
    SUBCASE("4-pixel hand case, ratio 0.5") {
        // bg probs (0.9,0.7,0.2,0.1), fg probs (0.1,0.3,0.8,0.9):
        // groups bg={0,1}, fg={2,3}; keep 1 of each -> pixels 0 and 3
        ProbMap p(2, 1, 4);
        p.data = {0.9, 0.7, 0.2, 0.1, 0.1, 0.3, 0.8, 0.9};
        sel.ratio = 0.5;
        const LabelMap m = cam_label(p, sel);
        CHECK(int(m.labels[0]) == 0);
        CHECK(m.labels[1] == kUnlabeled);
        CHECK(m.labels[2] == kUnlabeled);
        CHECK(int(m.labels[3]) == 1);
    }
    SUBCASE("ties break by row-major pixel order") {
        ProbMap p(1, 1, 4);
        p.data = {0.5, 0.5, 0.5, 0.5};
        sel.ratio = 0.5;
        const LabelMap m = cam_label(p, sel);
        CHECK(int(m.labels[0]) == 0);
        CHECK(int(m.labels[1]) == 0);
        CHECK(m.labels[2] == kUnlabeled);
        CHECK(m.labels[3] == kUnlabeled);
    }
    SUBCASE("labels exactly sum of per-class ceil(ratio*count)") {
        Rng rng(14);
        const ProbMap p = selftest::random_prob_map(rng, 4, 9, 7);
        for (const double ratio : {0.13, 0.4, 0.61, 0.999}) {
            sel.ratio = ratio;
            const LabelMap m = cam_label(p, sel);

            // oracle: count argmax groups, then sum ceilings (exact arithmetic
            // via scaled integers where the product is integral)
            std::vector<int> group(4, 0);
            for (int i = 0; i < 63; ++i) {
                int best = 0;
                for (int c = 1; c < 4; ++c)
                    if (p.at_flat(c, i) > p.at_flat(best, i)) best = c;
                ++group[best];
            }
            std::size_t want = 0;
            for (int c = 0; c < 4; ++c)
                want += std::size_t(std::ceil(ratio * group[c] - 1e-9));
            std::size_t got = 0;
            for (auto v : m.labels) got += v != kUnlabeled;
            CHECK(got == want);
        }
    }
}

TEST_CASE("intersect_labels") {
    SUBCASE("identical maps without 255 pass through") {
        LabelMap a(1, 3, 0);
        a.labels = {0, 1, 2};
        const LabelMap out = intersect_labels(a, a);
        CHECK(out.labels == a.labels);
    }
    SUBCASE("complete disagreement blanks everything") {
        LabelMap a(1, 3, 0), b(1, 3, 1);
        const LabelMap out = intersect_labels(a, b);
        for (auto v : out.labels) CHECK(v == kUnlabeled);
    }
    SUBCASE("elementwise rule") {
        LabelMap cam(1, 3), crf(1, 3);
        cam.labels = {0, 255, 2};
        crf.labels = {0, 1, 1};
        const LabelMap out = intersect_labels(cam, crf);
        CHECK(int(out.labels[0]) == 0);
        CHECK(out.labels[1] == kUnlabeled);
        CHECK(out.labels[2] == kUnlabeled);
    }
    SUBCASE("unlabeled set only grows") {
        Rng rng(77);
        LabelMap cam(6, 6), crf(6, 6);
        for (auto& v : cam.labels)
            v = rng.uniform() < 0.3 ? kUnlabeled : std::uint8_t(rng.uniform_int(3));
        for (auto& v : crf.labels) v = std::uint8_t(rng.uniform_int(3));
        const LabelMap out = intersect_labels(cam, crf);
        for (std::size_t i = 0; i < out.labels.size(); ++i) {
            if (cam.labels[i] == kUnlabeled) CHECK(out.labels[i] == kUnlabeled);
            if (out.labels[i] != kUnlabeled) {
                CHECK(out.labels[i] == cam.labels[i]);
                CHECK(out.labels[i] == crf.labels[i]);
            }
        }
    }
    SUBCASE("dimension mismatch throws") {
        LabelMap a(1, 3), b(3, 1);
        CHECK_THROWS_AS(intersect_labels(a, b), std::invalid_argument);
    }
}

TEST_CASE("selection config validation") {
    SelectionConfig sel;
    sel.mode = SelectionMode::per_class_ratio;
    sel.ratio = 0.0;
    CHECK_THROWS_AS(validate(sel), std::invalid_argument);
    sel.ratio = 1.5;
    CHECK_THROWS_AS(validate(sel), std::invalid_argument);
    sel.mode = SelectionMode::fixed_alpha;
    sel.alpha = -0.5;
    CHECK_THROWS_AS(validate(sel), std::invalid_argument);
}
