#include "rrm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rrm/util.hpp"

namespace rrm {

namespace {

// Chebyshev distance from a pixel to the square; 0 on the boundary or
// inside, positive outside.
int outside_distance(int x, int y, int x0, int y0, int size) {
    const int dx = std::max({x0 - x, x - (x0 + size - 1), 0});
    const int dy = std::max({y0 - y, y - (y0 + size - 1), 0});
    return std::max(dx, dy);
}

}  // namespace

const std::vector<double>& fixture_scales() {
    static const std::vector<double> s{0.5, 1.0, 1.5, 2.0};
    return s;
}

SquareFixture make_square_fixture(std::uint64_t seed, int canvas, int square) {
    if (canvas < 8 || square < 2 || square > canvas - 4)
        throw std::invalid_argument("fixture: square must fit the canvas with margin");

    Rng rng(seed);
    SquareFixture fx;
    fx.square_size = square;

    // Jitter the square placement a little per seed, keeping a margin.
    const int slack = std::max(1, (canvas - square) / 4);
    const int base = (canvas - square) / 2;
    fx.square_x0 = base + rng.uniform_int(2 * slack + 1) - slack;
    fx.square_y0 = base + rng.uniform_int(2 * slack + 1) - slack;

    fx.ground_truth = LabelMap(canvas, canvas, 0);
    for (int y = fx.square_y0; y < fx.square_y0 + square; ++y)
        for (int x = fx.square_x0; x < fx.square_x0 + square; ++x) fx.ground_truth.at(y, x) = 1;

    // Image: bright square with a one-pixel soft rim over a dark noisy
    // canvas. The rim makes the color structure slightly larger than the
    // ground truth, so CRF boundaries wobble within a pixel or two.
    fx.image = ImageRGB(canvas, canvas);
    const int dark[3] = {28, 31, 36};
    const int bright[3] = {224, 219, 204};
    for (int y = 0; y < canvas; ++y)
        for (int x = 0; x < canvas; ++x) {
            const int d = outside_distance(x, y, fx.square_x0, fx.square_y0, square);
            const double mix = d == 0 ? 1.0 : (d == 1 ? 0.55 : 0.0);
            for (int c = 0; c < 3; ++c) {
                const double noise = rng.uniform(-7.0, 7.0);
                const double v = dark[c] + mix * (bright[c] - dark[c]) + noise;
                fx.image.at(y, x, c) = std::uint8_t(std::clamp(int(std::lround(v)), 0, 255));
            }
        }

    // Per-scale feature stacks at stride 4 of the scaled image, 4 channels:
    // square bump, horizontal ramp, noise, constant bias.
    const int feature_dim = 4;
    for (double s : fixture_scales()) {
        const int scaled = std::max(4, int(std::lround(canvas * s)));
        const int fh = std::max(2, scaled / 4);
        TensorF32 f;
        f.shape = {feature_dim, fh, fh};
        f.data.assign(std::size_t(feature_dim) * fh * fh, 0.0f);
        const auto at = [&](int ch, int y, int x) -> float& {
            return f.data[(std::size_t(ch) * fh + y) * fh + x];
        };
        for (int fy = 0; fy < fh; ++fy)
            for (int fx_ = 0; fx_ < fh; ++fx_) {
                // canvas-space center of this feature cell
                const double cx = (fx_ + 0.5) * canvas / fh - 0.5;
                const double cy = (fy + 0.5) * canvas / fh - 0.5;
                const int d = outside_distance(int(std::lround(cx)), int(std::lround(cy)),
                                               fx.square_x0, fx.square_y0, square);
                const double bump = std::max(0.0, 1.0 - d / 5.0);
                at(0, fy, fx_) = float(bump);
                at(1, fy, fx_) = float(cx / canvas);
                at(2, fy, fx_) = float(rng.uniform());
                at(3, fy, fx_) = 0.5f;
            }
        fx.per_scale_features.push_back(std::move(f));
    }

    fx.weights.num_classes = 1;
    fx.weights.feature_dim = feature_dim;
    fx.weights.w = {1.0, 0.12, 0.08, -0.18};
    fx.classes.foreground_ids = {1};
    return fx;
}

}  // namespace rrm
