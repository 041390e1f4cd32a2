#pragma once

#include <filesystem>

#include "rrm/tensor.hpp"

namespace rrm {

// Tensor container: 8-byte magic "RRMT\0\0\0\1", one UTF-8 JSON header line
// {"shape":[...],"dtype":"f32"}, newline, then row-major little-endian f32
// payload. Bit-exact round trip.
TensorF32 read_tensor(const std::filesystem::path& path);
void write_tensor(const TensorF32& t, const std::filesystem::path& path);

// 8-bit grayscale PNG; 255 is the unlabeled sentinel. Values in
// num_classes+1..254 are rejected on load.
LabelMap read_label_map(const std::filesystem::path& path, int num_classes = 20);
void write_label_map(const LabelMap& m, const std::filesystem::path& path);

// 24-bit RGB PNG or binary PPM (P6), sniffed by magic bytes.
ImageRGB read_image(const std::filesystem::path& path);
void write_image_png(const ImageRGB& img, const std::filesystem::path& path);
void write_image_ppm(const ImageRGB& img, const std::filesystem::path& path);

// Corner-aligned bilinear resize of a C×H×W stack: output pixel centers map
// linearly onto input pixel centers, so same-size resize is the identity.
TensorF32 resize_bilinear(const TensorF32& t, int out_h, int out_w);
Grid3 resize_bilinear(const Grid3& g, int out_h, int out_w);

}  // namespace rrm
