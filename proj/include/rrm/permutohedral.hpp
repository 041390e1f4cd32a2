#pragma once

#include <vector>

namespace rrm {

// High-dimensional Gaussian convolution on the permutohedral lattice:
// embed features into the hyperplane lattice, splat with barycentric
// weights, blur along each lattice axis, slice back. Approximates
//   out(i) = sum_j exp(-0.5 * ||f_i - f_j||^2) * in(j)
// with the self term j == i included. Features must be pre-scaled to unit
// bandwidth.
//
// fineness k > 1 embeds the points into a roughly k-times finer lattice and
// blurs more times per axis (binomial passes compose toward the same
// Gaussian), cutting the splat/slice interpolation smear at the cost of more
// blur work and halo vertices. k = 1 is the classic single-pass lattice.
class PermutohedralLattice {
public:
    PermutohedralLattice(const std::vector<double>& features, int feature_dim, int n_points,
                         double fineness = 2.35);

    // in/out are pixel-major [point * value_size + channel]; out may not
    // alias in. Safe to call concurrently on the same lattice.
    void filter(const double* in, double* out, int value_size) const;

    int points() const { return n_; }
    int lattice_size() const { return m_; }

private:
    void raw_filter(const double* in, double* out, int value_size) const;
    void calibrate();

    int n_ = 0;  // input points
    int d_ = 0;  // feature dimension
    int m_ = 0;  // occupied lattice vertices
    int blur_passes_ = 1;
    double inv_gain_ = 1.0;

    std::vector<int> offsets_;         // n*(d+1) vertex indices per point
    std::vector<double> barycentric_;  // n*(d+1) interpolation weights
    std::vector<int> blur_n1_;         // (d+1)*m neighbor indices, -1 if absent
    std::vector<int> blur_n2_;
};

}  // namespace rrm
