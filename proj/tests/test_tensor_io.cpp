#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "rrm/tensor_io.hpp"
#include "rrm/util.hpp"
#include "test_util.hpp"

using namespace rrm;

TEST_CASE("tensor round trip: fixed cases") {
    testutil::TempDir dir("tensor");

    TensorF32 zero{{2, 2}, {0, 0, 0, 0}};
    write_tensor(zero, dir.path() / "zero.rrmt");
    TensorF32 back = read_tensor(dir.path() / "zero.rrmt");
    CHECK(back.shape == zero.shape);
    CHECK(back.data == zero.data);

    TensorF32 one{{1}, {1.0f}};
    write_tensor(one, dir.path() / "one.rrmt");
    back = read_tensor(dir.path() / "one.rrmt");
    CHECK(back.shape == std::vector<int>{1});
    CHECK(back.data == std::vector<float>{1.0f});
}

TEST_CASE("tensor file layout is pinned") {
    testutil::TempDir dir("tensor_layout");
    TensorF32 t{{3}, {1.0f, 2.0f, 3.0f}};
    write_tensor(t, dir.path() / "t.rrmt");

    std::ifstream in(dir.path() / "t.rrmt", std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const char magic[8] = {'R', 'R', 'M', 'T', 0, 0, 0, 1};
    REQUIRE(all.size() >= 8);
    CHECK(std::memcmp(all.data(), magic, 8) == 0);
    const std::string header = "{\"shape\":[3],\"dtype\":\"f32\"}\n";
    CHECK(all.substr(8, header.size()) == header);
    CHECK(all.size() == 8 + header.size() + 12);  // 3 floats
}

TEST_CASE("tensor round trip is bit-exact on randomized instances") {
    testutil::TempDir dir("tensor_rand");
    Rng rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        TensorF32 t;
        const int axes = 1 + rng.uniform_int(4);
        std::size_t n = 1;
        for (int a = 0; a < axes; ++a) {
            t.shape.push_back(1 + rng.uniform_int(6));
            n *= t.shape.back();
        }
        t.data.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            t.data.push_back(float(rng.uniform(-1e6, 1e6)));

        const auto p = dir.path() / ("r" + std::to_string(trial) + ".rrmt");
        write_tensor(t, p);
        const TensorF32 back = read_tensor(p);
        REQUIRE(back.shape == t.shape);
        REQUIRE(back.data.size() == t.data.size());
        for (std::size_t i = 0; i < n; ++i) {
            // bit-exact, not approximately equal
            CHECK(std::memcmp(&back.data[i], &t.data[i], 4) == 0);
        }
    }
}

TEST_CASE("tensor load errors are distinct") {
    testutil::TempDir dir("tensor_err");

    SUBCASE("empty shape rejected on write") {
        TensorF32 bad{{}, {}};
        CHECK_THROWS_WITH_AS(write_tensor(bad, dir.path() / "x.rrmt"),
                             doctest::Contains("shape"), std::invalid_argument);
    }
    SUBCASE("bad magic") {
        std::ofstream(dir.path() / "bad.rrmt") << "NOTATENSOR";
        CHECK_THROWS_WITH_AS(read_tensor(dir.path() / "bad.rrmt"),
                             doctest::Contains("magic"), std::runtime_error);
    }
    SUBCASE("malformed header") {
        std::ofstream out(dir.path() / "hdr.rrmt", std::ios::binary);
        const char magic[8] = {'R', 'R', 'M', 'T', 0, 0, 0, 1};
        out.write(magic, 8);
        out << "{not json}\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_tensor(dir.path() / "hdr.rrmt"),
                             doctest::Contains("header"), std::runtime_error);
    }
    SUBCASE("payload size mismatch") {
        std::ofstream out(dir.path() / "short.rrmt", std::ios::binary);
        const char magic[8] = {'R', 'R', 'M', 'T', 0, 0, 0, 1};
        out.write(magic, 8);
        out << "{\"shape\":[4],\"dtype\":\"f32\"}\n";
        const float two[2] = {1, 2};
        out.write(reinterpret_cast<const char*>(two), 8);
        out.close();
        CHECK_THROWS_WITH_AS(read_tensor(dir.path() / "short.rrmt"),
                             doctest::Contains("size mismatch"), std::runtime_error);
    }
    SUBCASE("non-finite payload") {
        std::ofstream out(dir.path() / "nan.rrmt", std::ios::binary);
        const char magic[8] = {'R', 'R', 'M', 'T', 0, 0, 0, 1};
        out.write(magic, 8);
        out << "{\"shape\":[1],\"dtype\":\"f32\"}\n";
        const float v = std::nanf("");
        out.write(reinterpret_cast<const char*>(&v), 4);
        out.close();
        CHECK_THROWS_WITH_AS(read_tensor(dir.path() / "nan.rrmt"),
                             doctest::Contains("non-finite"), std::runtime_error);
    }
}

TEST_CASE("label map round trip and validation") {
    testutil::TempDir dir("labels");

    LabelMap all255(3, 4);
    write_label_map(all255, dir.path() / "u.png");
    LabelMap back = read_label_map(dir.path() / "u.png");
    CHECK(back.height == 3);
    CHECK(back.width == 4);
    for (auto v : back.labels) CHECK(v == kUnlabeled);

    LabelMap zeros(2, 2, 0);
    write_label_map(zeros, dir.path() / "z.png");
    back = read_label_map(dir.path() / "z.png");
    for (auto v : back.labels) CHECK(v == 0);

    Rng rng(99);
    LabelMap random(8, 8);
    for (auto& v : random.labels)
        v = rng.uniform() < 0.3 ? kUnlabeled : std::uint8_t(rng.uniform_int(21));
    write_label_map(random, dir.path() / "r.png");
    back = read_label_map(dir.path() / "r.png", 20);
    CHECK(back.labels == random.labels);

    // 21..254 are invalid for 20 classes
    LabelMap bad(1, 1, 21);
    write_label_map(bad, dir.path() / "bad.png");
    CHECK_THROWS_WITH_AS(read_label_map(dir.path() / "bad.png", 20),
                         doctest::Contains("outside"), std::runtime_error);
    CHECK_NOTHROW(read_label_map(dir.path() / "bad.png", 21));
}

TEST_CASE("malformed png files raise io errors") {
    testutil::TempDir dir("png_err");
    std::ofstream(dir.path() / "garbage.png") << "not a png at all";
    CHECK_THROWS_AS(read_label_map(dir.path() / "garbage.png"), std::runtime_error);

    write_label_map(LabelMap(8, 8, 3), dir.path() / "ok.png");
    std::ifstream in(dir.path() / "ok.png", std::ios::binary);
    const std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream(dir.path() / "cut.png", std::ios::binary) << all.substr(0, all.size() / 2);
    CHECK_THROWS_AS(read_label_map(dir.path() / "cut.png"), std::runtime_error);

    // a gray PNG is not an RGB image
    CHECK_THROWS_WITH_AS(read_image(dir.path() / "ok.png"), doctest::Contains("RGB"),
                         std::runtime_error);
}

TEST_CASE("image png and ppm round trips") {
    testutil::TempDir dir("image");
    Rng rng(5);
    ImageRGB img(5, 7);
    for (auto& v : img.pixels) v = std::uint8_t(rng.uniform_int(256));

    write_image_png(img, dir.path() / "a.png");
    ImageRGB png_back = read_image(dir.path() / "a.png");
    CHECK(png_back.height == img.height);
    CHECK(png_back.width == img.width);
    CHECK(png_back.pixels == img.pixels);

    write_image_ppm(img, dir.path() / "a.ppm");
    ImageRGB ppm_back = read_image(dir.path() / "a.ppm");
    CHECK(ppm_back.pixels == img.pixels);
}

TEST_CASE("resize_bilinear: identity, constants, hand case") {
    TensorF32 t{{1, 2, 2}, {0, 1, 0, 1}};

    SUBCASE("same size is bit-equal") {
        const TensorF32 same = resize_bilinear(t, 2, 2);
        CHECK(same.data == t.data);
    }
    SUBCASE("constant stays constant") {
        TensorF32 c{{1, 3, 3}, std::vector<float>(9, 2.5f)};
        const TensorF32 up = resize_bilinear(c, 7, 5);
        for (float v : up.data) CHECK(v == 2.5f);
    }
    SUBCASE("2x2 -> 2x4 corner-aligned values") {
        // columns [0,1] widen to [0, 1/3, 2/3, 1] on each row
        const TensorF32 wide = resize_bilinear(t, 2, 4);
        REQUIRE(wide.data.size() == 8);
        for (int row = 0; row < 2; ++row) {
            CHECK(wide.data[row * 4 + 0] == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(wide.data[row * 4 + 1] == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
            CHECK(wide.data[row * 4 + 2] == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
            CHECK(wide.data[row * 4 + 3] == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("bad output dims") {
        CHECK_THROWS_AS(resize_bilinear(t, 0, 4), std::invalid_argument);
    }
}

TEST_CASE("resize_bilinear preserves value bounds on random instances") {
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const int h = 1 + rng.uniform_int(8), w = 1 + rng.uniform_int(8);
        TensorF32 t{{2, h, w}, {}};
        t.data.resize(std::size_t(2) * h * w);
        float lo = 1e30f, hi = -1e30f;
        for (auto& v : t.data) {
            v = float(rng.uniform(-50.0, 50.0));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const int oh = 1 + rng.uniform_int(12), ow = 1 + rng.uniform_int(12);
        const TensorF32 r = resize_bilinear(t, oh, ow);
        for (float v : r.data) {
            CHECK(v >= lo);
            CHECK(v <= hi);
        }
    }
}
