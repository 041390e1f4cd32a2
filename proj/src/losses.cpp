#include "rrm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rrm {

void validate(const EnergyConfig& cfg) {
    if (!(cfg.sigma_d > 0.0) || !(cfg.sigma_r > 0.0))
        throw std::invalid_argument("energy: bandwidths must be positive");
    if (cfg.brute_cap < 1) throw std::invalid_argument("energy: brute cap must be >= 1");
}

namespace {

void check_prob_labels(const ProbMap& p, const LabelMap& labels) {
    if (p.channels < 1) throw std::invalid_argument("loss: probability map has no channels");
    if (p.height != labels.height || p.width != labels.width)
        throw std::invalid_argument("loss: probability/label dimensions differ");
    for (std::uint8_t v : labels.labels)
        if (v != kUnlabeled && v >= p.channels)
            throw std::invalid_argument("loss: label " + std::to_string(int(v)) +
                                        " has no probability channel");
}

void check_rows_normalized(const ProbMap& p) {
    const int n = p.pixels();
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int c = 0; c < p.channels; ++c) {
            const double v = p.at_flat(c, i);
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw std::invalid_argument("energy: probabilities must lie in [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-4)
            throw std::invalid_argument("energy: pixel distribution does not sum to 1");
    }
}

// S(i) = 1 - max_c P(i) on labeled pixels, 1 elsewhere (or 1 everywhere when
// the soft filter is disabled). argmax_out, when given, records the channel
// attaining the max for the subgradient route.
std::vector<double> soft_filter_values(const ProbMap& p, const LabelMap& labels,
                                       const EnergyConfig& cfg, std::vector<int>* argmax_out) {
    const int n = p.pixels();
    std::vector<double> s(n, 1.0);
    if (argmax_out) argmax_out->assign(n, 0);
    for (int i = 0; i < n; ++i) {
        double mx = p.at_flat(0, i);
        int arg = 0;
        for (int c = 1; c < p.channels; ++c) {
            const double v = p.at_flat(c, i);
            if (v > mx) {
                mx = v;
                arg = c;
            }
        }
        if (argmax_out) (*argmax_out)[i] = arg;
        if (cfg.soft_filter && labels.labels[i] != kUnlabeled) s[i] = 1.0 - mx;
    }
    return s;
}

}  // namespace

LossValueGrad cross_entropy_masked(const ProbMap& p_net, const LabelMap& labels) {
    check_prob_labels(p_net, labels);
    const int n = p_net.pixels();

    int n_bg = 0, n_fg = 0;
    for (int i = 0; i < n; ++i) {
        const std::uint8_t l = labels.labels[i];
        if (l == kUnlabeled) continue;
        if (l == 0)
            ++n_bg;
        else
            ++n_fg;
    }

    LossValueGrad out;
    out.grad = Grid3(p_net.channels, p_net.height, p_net.width);
    double bg_sum = 0.0, fg_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::uint8_t l = labels.labels[i];
        if (l == kUnlabeled) continue;
        const double pc = p_net.at_flat(l, i);
        if (!(pc > 0.0))
            throw std::invalid_argument("cross entropy: zero probability at a labeled pixel");
        const double group = l == 0 ? double(n_bg) : double(n_fg);
        (l == 0 ? bg_sum : fg_sum) += -std::log(pc);
        out.grad.at_flat(l, i) = -1.0 / (pc * group);
    }
    out.value = (n_bg ? bg_sum / n_bg : 0.0) + (n_fg ? fg_sum / n_fg : 0.0);
    return out;
}

double energy_pairwise_reference(const ProbMap& p_net, const ImageRGB& image,
                                 const LabelMap& labels, const EnergyConfig& cfg) {
    validate(cfg);
    validate(image);
    check_prob_labels(p_net, labels);
    check_rows_normalized(p_net);
    if (p_net.height != image.height || p_net.width != image.width)
        throw std::invalid_argument("energy: probability/image dimensions differ");
    const int n = p_net.pixels();
    if (n > cfg.brute_cap)
        throw std::invalid_argument("energy reference: pixel count exceeds brute cap");

    const std::vector<double> feats = bilateral_features(image);
    const std::vector<double> s = soft_filter_values(p_net, labels, cfg, nullptr);
    const double inv_2sd2 = 1.0 / (2.0 * cfg.sigma_d * cfg.sigma_d);
    const double inv_2sr2 = 1.0 / (2.0 * cfg.sigma_r * cfg.sigma_r);

    double acc = 0.0, kernel_mass = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* fi = feats.data() + std::size_t(i) * 5;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* fj = feats.data() + std::size_t(j) * 5;
            const double dx = fi[0] - fj[0], dy = fi[1] - fj[1];
            const double dr = fi[2] - fj[2], dg = fi[3] - fj[3], db = fi[4] - fj[4];
            const double g = std::exp(-(dx * dx + dy * dy) * inv_2sd2 -
                                      (dr * dr + dg * dg + db * db) * inv_2sr2);
            kernel_mass += g;

            // literal sum over distinct class pairs
            double cross = 0.0;
            for (int ca = 0; ca < p_net.channels; ++ca)
                for (int cb = 0; cb < p_net.channels; ++cb) {
                    if (ca == cb) continue;
                    cross += p_net.at_flat(ca, i) * p_net.at_flat(cb, j);
                }
            acc += s[i] * g * cross;
        }
    }

    const double w =
        cfg.normalization == EnergyNormalization::pixel_count ? double(n) : kernel_mass;
    if (!(w > 0.0)) return 0.0;
    return acc / w;
}

std::vector<double> energy_soft_filter(const ProbMap& p_net, const LabelMap& labels,
                                       const EnergyConfig& cfg) {
    check_prob_labels(p_net, labels);
    return soft_filter_values(p_net, labels, cfg, nullptr);
}

double energy_value_pinned_soft_filter(const ProbMap& p_net, const ImageRGB& image,
                                       const std::vector<double>& soft_filter,
                                       const EnergyConfig& cfg) {
    validate(cfg);
    validate(image);
    check_rows_normalized(p_net);
    if (p_net.height != image.height || p_net.width != image.width)
        throw std::invalid_argument("energy: probability/image dimensions differ");
    const int n = p_net.pixels();
    const int nc = p_net.channels;
    if (soft_filter.size() != std::size_t(n))
        throw std::invalid_argument("energy: soft filter size mismatch");

    Grid3 ones_and_comp(nc + 1, p_net.height, p_net.width);
    for (int c = 0; c < nc; ++c)
        for (int i = 0; i < n; ++i) ones_and_comp.at_flat(c, i) = 1.0 - p_net.at_flat(c, i);
    for (int i = 0; i < n; ++i) ones_and_comp.at_flat(nc, i) = 1.0;

    const std::vector<double> feats = bilateral_features(image);
    const std::vector<double> sigmas = {cfg.sigma_d, cfg.sigma_d, cfg.sigma_r, cfg.sigma_r,
                                        cfg.sigma_r};
    const Grid3 filtered =
        cfg.fast_path == FilterPath::brute
            ? gaussian_filter_bruteforce(ones_and_comp, feats, 5, sigmas, cfg.brute_cap)
            : gaussian_filter_fast(ones_and_comp, feats, 5, sigmas);

    double w;
    if (cfg.normalization == EnergyNormalization::pixel_count) {
        w = double(n);
    } else {
        w = 0.0;
        for (int i = 0; i < n; ++i) w += filtered.at_flat(nc, i);
    }
    if (!(w > 0.0)) return 0.0;

    double value = 0.0;
    for (int i = 0; i < n; ++i) {
        double a = 0.0;
        for (int c = 0; c < nc; ++c) a += p_net.at_flat(c, i) * filtered.at_flat(c, i);
        value += soft_filter[i] * a / w;
    }
    return value;
}

LossValueGrad energy_loss(const ProbMap& p_net, const ImageRGB& image, const LabelMap& labels,
                          const EnergyConfig& cfg) {
    validate(cfg);
    validate(image);
    check_prob_labels(p_net, labels);
    check_rows_normalized(p_net);
    if (p_net.height != image.height || p_net.width != image.width)
        throw std::invalid_argument("energy: probability/image dimensions differ");

    const int n = p_net.pixels();
    const int nc = p_net.channels;

    std::vector<int> argmax;
    const std::vector<double> s = soft_filter_values(p_net, labels, cfg, &argmax);

    // One filtering pass over 2*C+1 stacked channels:
    //   [0..C)    (1 - P^c)           -> value and first gradient term
    //   [C..2C)   (S ⊙ P^c)           -> transported gradient term
    //   [2C]      ones                -> kernel mass for kernel_sum W
    Grid3 stacked(2 * nc + 1, p_net.height, p_net.width);
    for (int c = 0; c < nc; ++c)
        for (int i = 0; i < n; ++i) {
            stacked.at_flat(c, i) = 1.0 - p_net.at_flat(c, i);
            stacked.at_flat(nc + c, i) = s[i] * p_net.at_flat(c, i);
        }
    for (int i = 0; i < n; ++i) stacked.at_flat(2 * nc, i) = 1.0;

    const std::vector<double> feats = bilateral_features(image);
    const std::vector<double> sigmas = {cfg.sigma_d, cfg.sigma_d, cfg.sigma_r, cfg.sigma_r,
                                        cfg.sigma_r};
    const Grid3 filtered =
        cfg.fast_path == FilterPath::brute
            ? gaussian_filter_bruteforce(stacked, feats, 5, sigmas, cfg.brute_cap)
            : gaussian_filter_fast(stacked, feats, 5, sigmas);

    double w;
    if (cfg.normalization == EnergyNormalization::pixel_count) {
        w = double(n);
    } else {
        w = 0.0;
        for (int i = 0; i < n; ++i) w += filtered.at_flat(2 * nc, i);
    }

    LossValueGrad out;
    out.grad = Grid3(nc, p_net.height, p_net.width);
    if (!(w > 0.0)) return out;  // single pixel / degenerate kernel: no pairs
    const double inv_w = 1.0 / w;

    for (int i = 0; i < n; ++i) {
        double a = 0.0;  // sum_c P^c(i) * Ĝ(1-P^c)(i)
        for (int c = 0; c < nc; ++c) a += p_net.at_flat(c, i) * filtered.at_flat(c, i);
        out.value += s[i] * a * inv_w;

        for (int c = 0; c < nc; ++c)
            out.grad.at_flat(c, i) =
                (s[i] * filtered.at_flat(c, i) - filtered.at_flat(nc + c, i)) * inv_w;

        if (cfg.soft_filter && cfg.soft_filter_grad == SoftFilterGrad::subgradient &&
            labels.labels[i] != kUnlabeled)
            out.grad.at_flat(argmax[i], i) -= a * inv_w;
    }
    return out;
}

LossValueGrad joint_seg_loss(const ProbMap& p_net, const ImageRGB& image, const LabelMap& labels,
                             const EnergyConfig& cfg) {
    LossValueGrad ce = cross_entropy_masked(p_net, labels);
    const LossValueGrad en = energy_loss(p_net, image, labels, cfg);
    ce.value += en.value;
    for (std::size_t i = 0; i < ce.grad.data.size(); ++i) ce.grad.data[i] += en.grad.data[i];
    return ce;
}

LossValueGrad classification_loss(const std::vector<double>& scores,
                                  const std::vector<int>& present) {
    const int n = int(scores.size());
    if (n < 1) throw std::invalid_argument("classification: need at least one class");
    std::vector<char> y(n, 0);
    for (int id : present) {
        if (id < 1 || id > n)
            throw std::invalid_argument("classification: present class id outside 1..N");
        y[id - 1] = 1;
    }

    // softplus(x) = log(1 + e^x), computed without overflow
    const auto softplus = [](double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); };

    LossValueGrad out;
    out.grad = Grid3(n, 1, 1);
    for (int c = 0; c < n; ++c) {
        const double sc = scores[c];
        const double sig = 1.0 / (1.0 + std::exp(-sc));
        out.value += (y[c] ? softplus(-sc) : softplus(sc)) / n;
        out.grad.data[c] = (sig - double(y[c])) / n;
    }
    return out;
}

ProbMap softmax(const Grid3& scores) {
    if (scores.channels < 1) throw std::invalid_argument("softmax: no channels");
    ProbMap out(scores.channels, scores.height, scores.width);
    const int n = scores.pixels();
    for (int i = 0; i < n; ++i) {
        double mx = scores.at_flat(0, i);
        for (int c = 1; c < scores.channels; ++c) mx = std::max(mx, scores.at_flat(c, i));
        double z = 0.0;
        for (int c = 0; c < scores.channels; ++c) z += std::exp(scores.at_flat(c, i) - mx);
        for (int c = 0; c < scores.channels; ++c)
            out.at_flat(c, i) = std::exp(scores.at_flat(c, i) - mx) / z;
    }
    return out;
}

}  // namespace rrm
