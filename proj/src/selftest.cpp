#include "rrm/selftest.hpp"

#include <algorithm>
#include <cmath>

#include "rrm/gaussian_filter.hpp"

namespace rrm::selftest {

namespace {

double rel_err(double a, double b) {
    const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
    return std::abs(a - b) / denom;
}

double max_grad_rel_err(const Grid3& analytic, const Grid3& fd) {
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.data.size(); ++i)
        worst = std::max(worst, rel_err(analytic.data[i], fd.data[i]));
    return worst;
}

}  // namespace

ProbMap random_prob_map(Rng& rng, int channels, int height, int width) {
    ProbMap p(channels, height, width);
    const int n = p.pixels();
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int c = 0; c < channels; ++c) {
            const double v = rng.uniform(0.1, 1.0);
            p.at_flat(c, i) = v;
            sum += v;
        }
        for (int c = 0; c < channels; ++c) p.at_flat(c, i) /= sum;
    }
    return p;
}

ImageRGB random_image(Rng& rng, int height, int width) {
    ImageRGB img(height, width);
    for (std::uint8_t& v : img.pixels) v = std::uint8_t(rng.uniform_int(256));
    return img;
}

LabelMap random_labels(Rng& rng, int height, int width, int num_classes,
                       double labeled_fraction) {
    LabelMap m(height, width);
    for (std::uint8_t& v : m.labels)
        if (rng.uniform() < labeled_fraction) v = std::uint8_t(rng.uniform_int(num_classes + 1));
    return m;
}

double check_potts_identity(std::uint64_t seed, int instances, const EnergyConfig& cfg) {
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        Rng rng(seed + 0x9e3779b97f4a7c15ull * (k + 1));
        const ProbMap p = random_prob_map(rng, 3, 8, 8);
        const ImageRGB img = random_image(rng, 8, 8);
        const LabelMap labels = random_labels(rng, 8, 8, 2, 0.5);
        const double potts = energy_loss(p, img, labels, cfg).value;
        const double reference = energy_pairwise_reference(p, img, labels, cfg);
        worst = std::max(worst, rel_err(potts, reference));
    }
    return worst;
}

double check_energy_grad_fd(std::uint64_t seed, int instances, const EnergyConfig& cfg) {
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        Rng rng(seed + 0xd1342543de82ef95ull * (k + 1));
        ProbMap p = random_prob_map(rng, 3, 8, 8);
        const ImageRGB img = random_image(rng, 8, 8);
        const LabelMap labels = random_labels(rng, 8, 8, 2, 0.5);

        const LossValueGrad analytic = energy_loss(p, img, labels, cfg);
        const std::vector<double> s = energy_soft_filter(p, labels, cfg);

        Grid3 fd(p.channels, p.height, p.width);
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const double orig = p.data[i];
            p.data[i] = orig + kFdStep;
            const double up = energy_value_pinned_soft_filter(p, img, s, cfg);
            p.data[i] = orig - kFdStep;
            const double down = energy_value_pinned_soft_filter(p, img, s, cfg);
            p.data[i] = orig;
            fd.data[i] = (up - down) / (2.0 * kFdStep);
        }
        worst = std::max(worst, max_grad_rel_err(analytic.grad, fd));
    }
    return worst;
}

double check_ce_grad_fd(std::uint64_t seed, int instances) {
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        Rng rng(seed + 0xaf251af3b0f025b5ull * (k + 1));
        ProbMap p = random_prob_map(rng, 3, 8, 8);
        const LabelMap labels = random_labels(rng, 8, 8, 2, 0.5);

        const LossValueGrad analytic = cross_entropy_masked(p, labels);
        Grid3 fd(p.channels, p.height, p.width);
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const double orig = p.data[i];
            p.data[i] = orig + kFdStep;
            const double up = cross_entropy_masked(p, labels).value;
            p.data[i] = orig - kFdStep;
            const double down = cross_entropy_masked(p, labels).value;
            p.data[i] = orig;
            fd.data[i] = (up - down) / (2.0 * kFdStep);
        }
        worst = std::max(worst, max_grad_rel_err(analytic.grad, fd));
    }
    return worst;
}

double check_filter_fidelity(std::uint64_t seed, int instances, int height, int width,
                             double sigma_d, double sigma_r) {
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        Rng rng(seed + 0x94d049bb133111ebull * (k + 1));
        const ImageRGB img = random_image(rng, height, width);
        Grid3 values(3, height, width);
        for (double& v : values.data) v = rng.uniform(-1.0, 1.0);

        const std::vector<double> feats = bilateral_features(img);
        const std::vector<double> sigmas = {sigma_d, sigma_d, sigma_r, sigma_r, sigma_r};
        const Grid3 brute = gaussian_filter_bruteforce(values, feats, 5, sigmas);
        const Grid3 fast = gaussian_filter_fast(values, feats, 5, sigmas);

        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < brute.data.size(); ++i) {
            const double d = fast.data[i] - brute.data[i];
            num += d * d;
            den += brute.data[i] * brute.data[i];
        }
        worst = std::max(worst, den > 0.0 ? std::sqrt(num / den) : 0.0);
    }
    return worst;
}

double check_crf_normalization(std::uint64_t seed, const CrfConfig& cfg, int max_iterations) {
    Rng rng(seed + 0xbf58476d1ce4e5b9ull);
    const int h = 12, w = 12, nc = 3;
    const ProbMap unary = random_prob_map(rng, nc, h, w);
    const ImageRGB img = random_image(rng, h, w);

    double worst = 0.0;
    for (int iters = 1; iters <= max_iterations; ++iters) {
        CrfConfig c = cfg;
        c.iterations = iters;
        const ProbMap q = crf_inference(unary, img, c);
        for (int i = 0; i < q.pixels(); ++i) {
            double sum = 0.0;
            for (int ch = 0; ch < nc; ++ch) {
                const double v = q.at_flat(ch, i);
                worst = std::max(worst, std::max(-v, v - 1.0));  // [0,1] drift
                sum += v;
            }
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    }
    return worst;
}

double check_crf_zero_weights(std::uint64_t seed) {
    Rng rng(seed + 0x2545f4914f6cdd1dull);
    const int h = 10, w = 10, nc = 4;
    ProbMap unary(nc, h, w);
    for (double& v : unary.data) v = rng.uniform(0.05, 2.0);  // unnormalized on purpose
    const ImageRGB img = random_image(rng, h, w);

    CrfConfig cfg;
    cfg.w_smooth = 0.0;
    cfg.w_appear = 0.0;
    const ProbMap q = crf_inference(unary, img, cfg);

    double worst = 0.0;
    for (int i = 0; i < q.pixels(); ++i) {
        double sum = 0.0;
        for (int c = 0; c < nc; ++c) sum += unary.at_flat(c, i);
        for (int c = 0; c < nc; ++c)
            worst = std::max(worst, std::abs(q.at_flat(c, i) - unary.at_flat(c, i) / sum));
    }
    return worst;
}

double check_crf_uniform_fixed_point(std::uint64_t seed, const CrfConfig& cfg) {
    Rng rng(seed + 0x6c62272e07bb0142ull);
    const int h = 9, w = 9, nc = 3;
    ProbMap unary(nc, h, w);
    for (double& v : unary.data) v = 1.0 / nc;
    const ImageRGB img = random_image(rng, h, w);

    const ProbMap q = crf_inference(unary, img, cfg);
    double worst = 0.0;
    for (double v : q.data) worst = std::max(worst, std::abs(v - 1.0 / nc));
    return worst;
}

std::vector<PropertyResult> run(std::uint64_t seed, const EnergyConfig& energy_cfg,
                                const CrfConfig& crf_cfg) {
    std::vector<PropertyResult> results;
    const auto add = [&](const std::string& name, double metric, double tol,
                         const std::string& what) {
        results.push_back({name, metric <= tol,
                           what + " " + fmt_g9(metric) + " (tol " + fmt_g9(tol) + ")"});
    };

    EnergyConfig brute_cfg = energy_cfg;
    brute_cfg.fast_path = FilterPath::brute;

    add("potts_identity", check_potts_identity(seed, 5, brute_cfg), kPottsTol, "max rel err");
    add("filter_oracle",
        check_filter_fidelity(seed, 3, 16, 16, energy_cfg.sigma_d, energy_cfg.sigma_r),
        kFilterTol, "max rel L2 err");
    add("gradient_energy", check_energy_grad_fd(seed, 3, brute_cfg), kGradTol, "max rel err");
    add("gradient_cross_entropy", check_ce_grad_fd(seed, 3), kGradTol, "max rel err");
    add("crf_normalization", check_crf_normalization(seed, crf_cfg, 5), kCrfNormTol, "max dev");
    add("crf_zero_weights", check_crf_zero_weights(seed), kCrfUnaryTol, "max dev");
    add("crf_uniform_fixed_point", check_crf_uniform_fixed_point(seed, crf_cfg), kCrfUniformTol,
        "max dev");
    return results;
}

}  // namespace rrm::selftest
