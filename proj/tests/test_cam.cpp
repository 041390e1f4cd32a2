#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "rrm/cam.hpp"
#include "rrm/util.hpp"

using namespace rrm;

namespace {

TensorF32 features_1ch(int h, int w, const std::vector<float>& vals) {
    return TensorF32{{1, h, w}, vals};
}

}  // namespace

TEST_CASE("cam_from_features basics") {
    SUBCASE("zero weights give zero maps") {
        const TensorF32 f{{2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8}};
        const ClassifierWeights w{1, 2, {0.0, 0.0}};
        const CamStack cam = cam_from_features(f, w, 2, 2);
        for (double v : cam.data) CHECK(v == 0.0);
    }
    SUBCASE("identity: D=1, w=1, nonnegative features, same size") {
        const TensorF32 f = features_1ch(2, 3, {0, 1, 2, 3, 4, 5});
        const ClassifierWeights w{1, 1, {1.0}};
        const CamStack cam = cam_from_features(f, w, 2, 3);
        for (int i = 0; i < 6; ++i) CHECK(cam.data[i] == doctest::Approx(f.data[i]));
    }
    SUBCASE("negative responses clamp to zero") {
        // w = (1,-1), F0 = [[2]], F1 = [[3]] -> raw -1 -> 0
        const TensorF32 f{{2, 1, 1}, {2.0f, 3.0f}};
        const ClassifierWeights w{1, 2, {1.0, -1.0}};
        const CamStack cam = cam_from_features(f, w, 1, 1);
        CHECK(cam.data[0] == 0.0);
    }
    SUBCASE("channel mismatch throws") {
        const TensorF32 f = features_1ch(1, 1, {1});
        const ClassifierWeights w{1, 2, {1.0, 1.0}};
        CHECK_THROWS_AS(cam_from_features(f, w, 1, 1), std::invalid_argument);
    }
}

TEST_CASE("cam_from_features is linear in the weights before clamping") {
    Rng rng(11);
    // nonnegative features and weights keep the clamp inactive
    TensorF32 f{{3, 4, 4}, {}};
    f.data.resize(48);
    for (auto& v : f.data) v = float(rng.uniform(0.0, 2.0));
    ClassifierWeights w{2, 3, {}};
    w.w.resize(6);
    for (auto& v : w.w) v = rng.uniform(0.0, 1.5);
    ClassifierWeights w2 = w;
    for (auto& v : w2.w) v *= 2.0;

    const CamStack a = cam_from_features(f, w, 8, 8);
    const CamStack b = cam_from_features(f, w2, 8, 8);
    for (std::size_t i = 0; i < a.data.size(); ++i)
        CHECK(b.data[i] == doctest::Approx(2.0 * a.data[i]).epsilon(1e-12));
}

TEST_CASE("multiscale_cam") {
    CamStack a(1, 2, 2);
    CamStack b(1, 2, 2);
    for (auto& v : b.data) v = 1.0;

    SUBCASE("single scale is identity") {
        const CamStack m = multiscale_cam({b});
        CHECK(m.data == b.data);
    }
    SUBCASE("two identical stacks give the same stack") {
        const CamStack m = multiscale_cam({b, b});
        for (double v : m.data) CHECK(v == doctest::Approx(1.0));
    }
    SUBCASE("zeros and ones average to one half") {
        const CamStack m = multiscale_cam({a, b});
        for (double v : m.data) CHECK(v == doctest::Approx(0.5));
    }
    SUBCASE("mean is order-invariant within 1e-6") {
        Rng rng(3);
        std::vector<CamStack> stacks(4, CamStack(2, 3, 3));
        for (auto& s : stacks)
            for (auto& v : s.data) v = rng.uniform(0.0, 5.0);
        const CamStack fwd = multiscale_cam(stacks);
        std::vector<CamStack> rev(stacks.rbegin(), stacks.rend());
        const CamStack bwd = multiscale_cam(rev);
        for (std::size_t i = 0; i < fwd.data.size(); ++i)
            CHECK(std::abs(fwd.data[i] - bwd.data[i]) < 1e-6);
    }
    SUBCASE("empty list and shape mismatch throw") {
        CHECK_THROWS_AS(multiscale_cam({}), std::invalid_argument);
        CamStack c(1, 3, 2);
        CHECK_THROWS_AS(multiscale_cam({a, c}), std::invalid_argument);
    }
}

TEST_CASE("normalize_fg") {
    SUBCASE("all-zero class map stays zero") {
        const CamStack cam(2, 2, 2);
        const Grid3 p = normalize_fg(cam);
        for (double v : p.data) CHECK(v == 0.0);
    }
    SUBCASE("map with max one is unchanged") {
        CamStack cam(1, 1, 2);
        cam.data = {0.25, 1.0};
        const Grid3 p = normalize_fg(cam);
        CHECK(p.data[0] == doctest::Approx(0.25));
        CHECK(p.data[1] == doctest::Approx(1.0));
    }
    SUBCASE("scalar division") {
        CamStack cam(1, 1, 2);
        cam.data = {2.0, 4.0};
        const Grid3 p = normalize_fg(cam);
        CHECK(p.data[0] == doctest::Approx(0.5));
        CHECK(p.data[1] == doctest::Approx(1.0));
    }
    SUBCASE("per-class max is exactly one unless the map is zero") {
        Rng rng(8);
        CamStack cam(3, 5, 5);
        for (auto& v : cam.data) v = rng.uniform(0.0, 9.0);
        for (int i = 0; i < 25; ++i) cam.at_flat(2, i) = 0.0;  // one degenerate class
        const Grid3 p = normalize_fg(cam);
        for (int c = 0; c < 2; ++c) {
            double mx = 0.0;
            for (int i = 0; i < 25; ++i) mx = std::max(mx, p.at_flat(c, i));
            CHECK(mx == doctest::Approx(1.0).epsilon(1e-12));
        }
        for (int i = 0; i < 25; ++i) CHECK(p.at_flat(2, i) == 0.0);
    }
}

TEST_CASE("background_prob") {
    Grid3 p_fg(1, 1, 3);

    SUBCASE("hand values") {
        p_fg.data = {1.0, 0.0, 0.5};
        const Grid3 bg = background_prob(p_fg, 4.0);
        CHECK(bg.data[0] == doctest::Approx(0.0));       // max fg 1 -> 0
        CHECK(bg.data[1] == doctest::Approx(1.0));       // max fg 0 -> 1
        CHECK(bg.data[2] == doctest::Approx(0.0625));    // (1-0.5)^4
    }
    SUBCASE("gamma <= 1 rejected") {
        p_fg.data = {0.1, 0.2, 0.3};
        CHECK_THROWS_AS(background_prob(p_fg, 1.0), std::invalid_argument);
    }
    SUBCASE("antitone in the max foreground probability") {
        Grid3 low(2, 1, 1), high(2, 1, 1);
        low.data = {0.3, 0.2};
        high.data = {0.6, 0.2};
        CHECK(background_prob(high, 4.0).data[0] < background_prob(low, 4.0).data[0]);
    }
}

TEST_CASE("concat_fg_bg") {
    Grid3 p_fg(1, 1, 2);
    p_fg.data = {0.0, 0.0};
    const Grid3 p_bg = background_prob(p_fg, 4.0);
    const ProbMap p = concat_fg_bg(p_fg, p_bg);

    CHECK(p.channels == 2);
    CHECK(p.at_flat(0, 0) == doctest::Approx(1.0));  // all-background case
    CHECK(p.at_flat(1, 0) == 0.0);

    SUBCASE("values preserved bit-exact") {
        Rng rng(21);
        Grid3 fg(3, 4, 4), bg(1, 4, 4);
        for (auto& v : fg.data) v = rng.uniform(0.0, 1.0);
        for (auto& v : bg.data) v = rng.uniform(0.0, 1.0);
        const ProbMap cat = concat_fg_bg(fg, bg);
        CHECK(cat.channels == 4);
        for (int i = 0; i < 16; ++i) {
            CHECK(cat.at_flat(0, i) == bg.data[i]);
            for (int c = 0; c < 3; ++c) CHECK(cat.at_flat(c + 1, i) == fg.at_flat(c, i));
        }
    }
    SUBCASE("shape mismatch throws") {
        Grid3 bad(1, 2, 2);
        CHECK_THROWS_AS(concat_fg_bg(p_fg, bad), std::invalid_argument);
    }
}
