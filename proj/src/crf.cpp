#include "rrm/crf.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "rrm/gaussian_filter.hpp"
#include "rrm/permutohedral.hpp"

namespace rrm {

void validate(const CrfConfig& cfg) {
    if (cfg.iterations < 1) throw std::invalid_argument("crf: iterations must be >= 1");
    if (!(cfg.sxy_smooth > 0.0) || !(cfg.sxy_appear > 0.0) || !(cfg.srgb_appear > 0.0))
        throw std::invalid_argument("crf: bandwidths must be positive");
    if (!std::isfinite(cfg.w_smooth) || !std::isfinite(cfg.w_appear) || !std::isfinite(cfg.compat))
        throw std::invalid_argument("crf: non-finite parameter");
}

namespace {

// One pairwise kernel; builds its lattice once when the image is too large
// for exact filtering.
struct PairwiseKernel {
    double weight = 0.0;
    std::vector<double> features;
    int dim = 0;
    std::vector<double> sigmas;
    std::unique_ptr<PermutohedralLattice> lattice;

    Grid3 apply(const Grid3& q) const {
        if (!lattice) return gaussian_filter_bruteforce(q, features, dim, sigmas);
        return gaussian_filter_fast_on(*lattice, q);
    }

    static Grid3 gaussian_filter_fast_on(const PermutohedralLattice& lat, const Grid3& q) {
        const int n = q.pixels(), c_count = q.channels;
        std::vector<double> in(std::size_t(n) * c_count), filtered(std::size_t(n) * c_count);
        for (int c = 0; c < c_count; ++c)
            for (int i = 0; i < n; ++i) in[std::size_t(i) * c_count + c] = q.at_flat(c, i);
        lat.filter(in.data(), filtered.data(), c_count);
        Grid3 out(c_count, q.height, q.width);
        for (int c = 0; c < c_count; ++c)
            for (int i = 0; i < n; ++i)
                out.at_flat(c, i) = filtered[std::size_t(i) * c_count + c] - q.at_flat(c, i);
        return out;
    }
};

std::vector<double> scale_features(const std::vector<double>& raw, int dim,
                                   const std::vector<double>& sigmas) {
    std::vector<double> f(raw.size());
    const std::size_t n = raw.size() / dim;
    for (std::size_t i = 0; i < n; ++i)
        for (int d = 0; d < dim; ++d) f[i * dim + d] = raw[i * dim + d] / sigmas[d];
    return f;
}

}  // namespace

ProbMap crf_inference(const ProbMap& unary_probs, const ImageRGB& image, const CrfConfig& cfg) {
    validate(cfg);
    validate(image);
    if (unary_probs.channels < 2)
        throw std::invalid_argument("crf: unary must have background + foreground channels");
    if (unary_probs.height != image.height || unary_probs.width != image.width)
        throw std::invalid_argument("crf: unary/image shape mismatch");

    const int n = unary_probs.pixels();
    const int nc = unary_probs.channels;

    // Normalized unary and its log; a pixel with no class mass is an error.
    Grid3 q(nc, unary_probs.height, unary_probs.width);
    Grid3 log_u(nc, unary_probs.height, unary_probs.width);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int c = 0; c < nc; ++c) {
            const double v = unary_probs.at_flat(c, i);
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument("crf: unary values must be finite and nonnegative");
            sum += v;
        }
        if (sum <= 0.0) throw std::invalid_argument("crf: zero unary row at pixel");
        for (int c = 0; c < nc; ++c) {
            const double p = unary_probs.at_flat(c, i) / sum;
            q.at_flat(c, i) = p;
            log_u.at_flat(c, i) = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
        }
    }

    // Single-pass lattices are plenty for mean-field messages (the softmax
    // renormalizes every pixel) and keep large images cheap.
    const bool exact = n <= kBruteForceCap;
    const double crf_lattice_fineness = 1.0;
    std::vector<PairwiseKernel> kernels;
    if (cfg.w_smooth != 0.0) {
        PairwiseKernel k;
        k.weight = cfg.w_smooth;
        k.features = spatial_features(image.height, image.width);
        k.dim = 2;
        k.sigmas = {cfg.sxy_smooth, cfg.sxy_smooth};
        if (!exact)
            k.lattice = std::make_unique<PermutohedralLattice>(
                scale_features(k.features, k.dim, k.sigmas), k.dim, n, crf_lattice_fineness);
        kernels.push_back(std::move(k));
    }
    if (cfg.w_appear != 0.0) {
        PairwiseKernel k;
        k.weight = cfg.w_appear;
        k.features = bilateral_features(image);
        k.dim = 5;
        k.sigmas = {cfg.sxy_appear, cfg.sxy_appear, cfg.srgb_appear, cfg.srgb_appear,
                    cfg.srgb_appear};
        if (!exact)
            k.lattice = std::make_unique<PermutohedralLattice>(
                scale_features(k.features, k.dim, k.sigmas), k.dim, n, crf_lattice_fineness);
        kernels.push_back(std::move(k));
    }

    std::vector<double> exponent(nc);
    for (int it = 0; it < cfg.iterations; ++it) {
        Grid3 msg(nc, q.height, q.width);
        for (const PairwiseKernel& k : kernels) {
            const Grid3 filtered = k.apply(q);
            for (std::size_t idx = 0; idx < msg.data.size(); ++idx)
                msg.data[idx] += k.weight * filtered.data[idx];
        }

        for (int i = 0; i < n; ++i) {
            double msum = 0.0;
            for (int c = 0; c < nc; ++c) msum += msg.at_flat(c, i);

            // Potts: each class is penalized by the message mass of all
            // other classes.
            double mx = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < nc; ++c) {
                exponent[c] = log_u.at_flat(c, i) - cfg.compat * (msum - msg.at_flat(c, i));
                mx = std::max(mx, exponent[c]);
            }
            double z = 0.0;
            for (int c = 0; c < nc; ++c) z += std::exp(exponent[c] - mx);
            for (int c = 0; c < nc; ++c) q.at_flat(c, i) = std::exp(exponent[c] - mx) / z;
        }
    }
    return q;
}

LabelMap argmax_labels(const ProbMap& probs) {
    // channel index doubles as the label value, so 255 stays reserved
    if (probs.channels < 1 || probs.channels > 255)
        throw std::invalid_argument("argmax: channel count must be 1..255");
    LabelMap out(probs.height, probs.width);
    const int n = probs.pixels();
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double bv = probs.at_flat(0, i);
        for (int c = 1; c < probs.channels; ++c) {
            const double v = probs.at_flat(c, i);
            if (v > bv) {
                bv = v;
                best = c;
            }
        }
        out.labels[i] = static_cast<std::uint8_t>(best);
    }
    return out;
}

LabelMap crf_label(const ProbMap& unary_probs, const ImageRGB& image, const CrfConfig& cfg) {
    return argmax_labels(crf_inference(unary_probs, image, cfg));
}

}  // namespace rrm
