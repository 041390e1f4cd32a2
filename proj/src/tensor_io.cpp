#include "rrm/tensor_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace rrm {

namespace {

constexpr char kMagic[8] = {'R', 'R', 'M', 'T', 0, 0, 0, 1};

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts unsupported");

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big)
        return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
    return v;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) throw std::runtime_error("cannot open " + path.string());
    return f;
}

}  // namespace

TensorF32 read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("tensor: cannot open " + path.string());

    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("tensor: bad magic in " + path.string());

    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("tensor: missing header line in " + path.string());

    TensorF32 t;
    try {
        auto j = nlohmann::json::parse(header);
        if (j.at("dtype").get<std::string>() != "f32")
            throw std::runtime_error("unsupported dtype");
        t.shape = j.at("shape").get<std::vector<int>>();
    } catch (const std::exception& e) {
        throw std::runtime_error("tensor: malformed header in " + path.string() + ": " + e.what());
    }
    if (t.shape.empty() || t.shape.size() > 4)
        throw std::runtime_error("tensor: shape must have 1-4 axes in " + path.string());
    for (int d : t.shape)
        if (d < 1) throw std::runtime_error("tensor: bad shape axis in " + path.string());

    const std::size_t n = shape_product(t.shape);
    std::vector<std::uint32_t> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(n * 4));
    if (std::size_t(in.gcount()) != n * 4)
        throw std::runtime_error("tensor: shape/payload size mismatch in " + path.string());
    if (in.peek() != std::ifstream::traits_type::eof())
        throw std::runtime_error("tensor: trailing bytes after payload in " + path.string());

    t.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t bits = to_le(raw[i]);
        t.data[i] = std::bit_cast<float>(bits);
        if (!std::isfinite(t.data[i]))
            throw std::runtime_error("tensor: non-finite value in " + path.string());
    }
    return t;
}

void write_tensor(const TensorF32& t, const std::filesystem::path& path) {
    validate(t);

    std::string header = "{\"shape\":[";
    for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) header += ',';
        header += std::to_string(t.shape[i]);
    }
    header += "],\"dtype\":\"f32\"}\n";

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("tensor: cannot open " + path.string() + " for writing");
    out.write(kMagic, 8);
    out.write(header.data(), std::streamsize(header.size()));
    for (float v : t.data) {
        const std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(v));
        out.write(reinterpret_cast<const char*>(&bits), 4);
    }
    if (!out) throw std::runtime_error("tensor: write failed for " + path.string());
}

namespace {

void png_throw(png_structp, png_const_charp msg) {
    throw std::runtime_error(std::string("png: ") + msg);
}
void png_ignore_warning(png_structp, png_const_charp) {}

// Reads an 8-bit PNG; returns channel count (1 for gray, 3 for RGB).
int read_png(const std::filesystem::path& path, int& height, int& width,
             std::vector<std::uint8_t>& out) {
    FilePtr f = open_file(path, "rb");
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_ignore_warning);
    if (!png) throw std::runtime_error("png: init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("png: init failed");
    }
    try {
        png_init_io(png, f.get());
        png_read_info(png, info);
        const int bit_depth = png_get_bit_depth(png, info);
        const int color_type = png_get_color_type(png, info);
        if (bit_depth != 8)
            throw std::runtime_error("png: expected 8-bit depth in " + path.string());
        int channels;
        if (color_type == PNG_COLOR_TYPE_GRAY)
            channels = 1;
        else if (color_type == PNG_COLOR_TYPE_RGB)
            channels = 3;
        else
            throw std::runtime_error("png: expected grayscale or RGB in " + path.string());

        width = int(png_get_image_width(png, info));
        height = int(png_get_image_height(png, info));
        out.resize(std::size_t(height) * width * channels);
        std::vector<png_bytep> rows(height);
        for (int y = 0; y < height; ++y)
            rows[y] = out.data() + std::size_t(y) * width * channels;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
        png_destroy_read_struct(&png, &info, nullptr);
        return channels;
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
}

void write_png(const std::filesystem::path& path, int height, int width, int channels,
               const std::uint8_t* data) {
    FilePtr f = open_file(path, "wb");
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_ignore_warning);
    if (!png) throw std::runtime_error("png: init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png: init failed");
    }
    try {
        png_init_io(png, f.get());
        png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8,
                     channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        std::vector<png_bytep> rows(height);
        for (int y = 0; y < height; ++y)
            rows[y] = const_cast<std::uint8_t*>(data) + std::size_t(y) * width * channels;
        png_write_image(png, rows.data());
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
}

}  // namespace

LabelMap read_label_map(const std::filesystem::path& path, int num_classes) {
    LabelMap m;
    std::vector<std::uint8_t> data;
    const int channels = read_png(path, m.height, m.width, data);
    if (channels != 1)
        throw std::runtime_error("label map: expected grayscale PNG: " + path.string());
    m.labels = std::move(data);
    try {
        validate(m, num_classes);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(e.what()) + " in " + path.string());
    }
    return m;
}

void write_label_map(const LabelMap& m, const std::filesystem::path& path) {
    if (m.height < 1 || m.width < 1 || m.labels.size() != std::size_t(m.height) * m.width)
        throw std::invalid_argument("label map: invalid dimensions");
    write_png(path, m.height, m.width, 1, m.labels.data());
}

ImageRGB read_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::runtime_error("image: cannot open " + path.string());
    char sig[2] = {0, 0};
    probe.read(sig, 2);
    probe.close();

    ImageRGB img;
    if (sig[0] == 'P' && sig[1] == '6') {
        std::ifstream in(path, std::ios::binary);
        std::string magic;
        int w = 0, h = 0, maxval = 0;
        in >> magic >> w >> h >> maxval;
        if (magic != "P6" || w < 1 || h < 1 || maxval != 255)
            throw std::runtime_error("image: unsupported PPM in " + path.string());
        in.get();  // single whitespace after maxval
        img.height = h;
        img.width = w;
        img.pixels.resize(std::size_t(h) * w * 3);
        in.read(reinterpret_cast<char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
        if (std::size_t(in.gcount()) != img.pixels.size())
            throw std::runtime_error("image: truncated PPM payload in " + path.string());
        return img;
    }

    std::vector<std::uint8_t> data;
    const int channels = read_png(path, img.height, img.width, data);
    if (channels != 3)
        throw std::runtime_error("image: expected 24-bit RGB PNG: " + path.string());
    img.pixels = std::move(data);
    return img;
}

void write_image_png(const ImageRGB& img, const std::filesystem::path& path) {
    validate(img);
    write_png(path, img.height, img.width, 3, img.pixels.data());
}

void write_image_ppm(const ImageRGB& img, const std::filesystem::path& path) {
    validate(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("image: cannot open " + path.string() + " for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              std::streamsize(img.pixels.size()));
    if (!out) throw std::runtime_error("image: write failed for " + path.string());
}

namespace {

// Corner-aligned sample coordinate: out pixel o -> o*(in-1)/(out-1).
template <typename Src, typename Dst>
void resize_plane(const Src* in, int ih, int iw, Dst* out, int oh, int ow) {
    const double sy = oh > 1 ? double(ih - 1) / double(oh - 1) : 0.0;
    const double sx = ow > 1 ? double(iw - 1) / double(ow - 1) : 0.0;
    for (int oy = 0; oy < oh; ++oy) {
        const double fy = sy * oy;
        const int y0 = std::min(int(fy), ih - 1);
        const int y1 = std::min(y0 + 1, ih - 1);
        const double wy = fy - y0;
        for (int ox = 0; ox < ow; ++ox) {
            const double fx = sx * ox;
            const int x0 = std::min(int(fx), iw - 1);
            const int x1 = std::min(x0 + 1, iw - 1);
            const double wx = fx - x0;
            const double v00 = in[std::size_t(y0) * iw + x0];
            const double v01 = in[std::size_t(y0) * iw + x1];
            const double v10 = in[std::size_t(y1) * iw + x0];
            const double v11 = in[std::size_t(y1) * iw + x1];
            const double top = v00 + wx * (v01 - v00);
            const double bot = v10 + wx * (v11 - v10);
            out[std::size_t(oy) * ow + ox] = static_cast<Dst>(top + wy * (bot - top));
        }
    }
}

}  // namespace

TensorF32 resize_bilinear(const TensorF32& t, int out_h, int out_w) {
    validate(t);
    if (t.shape.size() != 3)
        throw std::invalid_argument("resize: expected 3 axes (C,H,W)");
    if (out_h < 1 || out_w < 1)
        throw std::invalid_argument("resize: output dimensions must be >= 1");
    const int c = t.shape[0], ih = t.shape[1], iw = t.shape[2];
    TensorF32 out;
    out.shape = {c, out_h, out_w};
    out.data.resize(std::size_t(c) * out_h * out_w);
    for (int ch = 0; ch < c; ++ch)
        resize_plane(t.data.data() + std::size_t(ch) * ih * iw, ih, iw,
                     out.data.data() + std::size_t(ch) * out_h * out_w, out_h, out_w);
    return out;
}

Grid3 resize_bilinear(const Grid3& g, int out_h, int out_w) {
    if (g.channels < 1 || g.height < 1 || g.width < 1)
        throw std::invalid_argument("resize: empty input");
    if (out_h < 1 || out_w < 1)
        throw std::invalid_argument("resize: output dimensions must be >= 1");
    Grid3 out(g.channels, out_h, out_w);
    for (int ch = 0; ch < g.channels; ++ch)
        resize_plane(g.data.data() + std::size_t(ch) * g.height * g.width, g.height, g.width,
                     out.data.data() + std::size_t(ch) * out_h * out_w, out_h, out_w);
    return out;
}

}  // namespace rrm
