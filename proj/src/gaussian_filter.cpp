#include "rrm/gaussian_filter.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rrm/permutohedral.hpp"

namespace rrm {

namespace {

void check_filter_args(const Grid3& values, const std::vector<double>& features, int feature_dim,
                       const std::vector<double>& bandwidths) {
    if (values.channels < 1 || values.pixels() < 1)
        throw std::invalid_argument("filter: empty value grid");
    if (feature_dim < 1) throw std::invalid_argument("filter: feature dim must be >= 1");
    if (features.size() != std::size_t(values.pixels()) * feature_dim)
        throw std::invalid_argument("filter: feature buffer size mismatch");
    if (int(bandwidths.size()) != feature_dim)
        throw std::invalid_argument("filter: bandwidth count must equal feature dim");
    for (double s : bandwidths)
        if (!(s > 0.0)) throw std::invalid_argument("filter: bandwidths must be positive");
}

std::vector<double> scaled_features(const std::vector<double>& features, int feature_dim,
                                    const std::vector<double>& bandwidths) {
    std::vector<double> scaled(features.size());
    const std::size_t n = features.size() / feature_dim;
    for (std::size_t i = 0; i < n; ++i)
        for (int d = 0; d < feature_dim; ++d)
            scaled[i * feature_dim + d] = features[i * feature_dim + d] / bandwidths[d];
    return scaled;
}

}  // namespace

std::vector<double> spatial_features(int height, int width) {
    if (height < 1 || width < 1) throw std::invalid_argument("features: empty image");
    std::vector<double> f;
    f.reserve(std::size_t(height) * width * 2);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            f.push_back(double(x));
            f.push_back(double(y));
        }
    return f;
}

std::vector<double> bilateral_features(const ImageRGB& image) {
    validate(image);
    std::vector<double> f;
    f.reserve(std::size_t(image.height) * image.width * 5);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            const PixelFeature p{double(x),
                                 double(y),
                                 double(image.at(y, x, 0)),
                                 double(image.at(y, x, 1)),
                                 double(image.at(y, x, 2))};
            f.push_back(p.x);
            f.push_back(p.y);
            f.push_back(p.r);
            f.push_back(p.g);
            f.push_back(p.b);
        }
    return f;
}

Grid3 gaussian_filter_bruteforce(const Grid3& values, const std::vector<double>& features,
                                 int feature_dim, const std::vector<double>& bandwidths,
                                 int cap) {
    check_filter_args(values, features, feature_dim, bandwidths);
    const int n = values.pixels();
    if (n > cap)
        throw std::invalid_argument("filter: " + std::to_string(n) +
                                    " pixels exceeds brute-force cap " + std::to_string(cap));

    const std::vector<double> f = scaled_features(features, feature_dim, bandwidths);
    const int c_count = values.channels;
    Grid3 out(c_count, values.height, values.width);

    for (int i = 0; i < n; ++i) {
        const double* fi = f.data() + std::size_t(i) * feature_dim;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* fj = f.data() + std::size_t(j) * feature_dim;
            double d2 = 0.0;
            for (int d = 0; d < feature_dim; ++d) {
                const double dd = fi[d] - fj[d];
                d2 += dd * dd;
            }
            const double k = std::exp(-0.5 * d2);
            for (int c = 0; c < c_count; ++c) out.at_flat(c, i) += k * values.at_flat(c, j);
        }
    }
    return out;
}

Grid3 gaussian_filter_fast(const Grid3& values, const std::vector<double>& features,
                           int feature_dim, const std::vector<double>& bandwidths) {
    check_filter_args(values, features, feature_dim, bandwidths);
    const int n = values.pixels();
    const int c_count = values.channels;

    const PermutohedralLattice lattice(scaled_features(features, feature_dim, bandwidths),
                                       feature_dim, n);

    // channel-major -> pixel-major
    std::vector<double> in(std::size_t(n) * c_count), filtered(std::size_t(n) * c_count);
    for (int c = 0; c < c_count; ++c)
        for (int i = 0; i < n; ++i) in[std::size_t(i) * c_count + c] = values.at_flat(c, i);

    lattice.filter(in.data(), filtered.data(), c_count);

    Grid3 out(c_count, values.height, values.width);
    for (int c = 0; c < c_count; ++c)
        for (int i = 0; i < n; ++i)
            out.at_flat(c, i) = filtered[std::size_t(i) * c_count + c] - values.at_flat(c, i);
    return out;
}

}  // namespace rrm
