#include "rrm/permutohedral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rrm {

namespace {

// Open-addressing table over integer keys of fixed size; grows by rehashing
// at 50% load.
class LatticeHashTable {
public:
    LatticeHashTable(int key_size, std::size_t expected_entries) : key_size_(key_size) {
        capacity_ = 16;
        while (capacity_ < expected_entries * 2) capacity_ *= 2;
        slots_.assign(capacity_, -1);
        keys_.reserve(expected_entries * key_size);
    }

    int find_or_insert(const int* key) {
        if (std::size_t(size_) * 2 >= capacity_) grow();
        std::size_t slot = hash(key) & (capacity_ - 1);
        for (;;) {
            int e = slots_[slot];
            if (e < 0) {
                keys_.insert(keys_.end(), key, key + key_size_);
                slots_[slot] = size_;
                return size_++;
            }
            if (equal(e, key)) return e;
            slot = (slot + 1) & (capacity_ - 1);
        }
    }

    int find(const int* key) const {
        std::size_t slot = hash(key) & (capacity_ - 1);
        for (;;) {
            int e = slots_[slot];
            if (e < 0) return -1;
            if (equal(e, key)) return e;
            slot = (slot + 1) & (capacity_ - 1);
        }
    }

    int size() const { return size_; }
    const int* key(int entry) const { return keys_.data() + std::size_t(entry) * key_size_; }

private:
    void grow() {
        capacity_ *= 2;
        slots_.assign(capacity_, -1);
        for (int e = 0; e < size_; ++e) {
            std::size_t slot = hash(key(e)) & (capacity_ - 1);
            while (slots_[slot] >= 0) slot = (slot + 1) & (capacity_ - 1);
            slots_[slot] = e;
        }
    }
    std::uint64_t hash(const int* key) const {
        std::uint64_t h = 14695981039346656037ull;  // FNV-1a
        for (int i = 0; i < key_size_; ++i) {
            h ^= static_cast<std::uint32_t>(key[i]);
            h *= 1099511628211ull;
        }
        return h;
    }
    bool equal(int entry, const int* key) const {
        const int* k = keys_.data() + std::size_t(entry) * key_size_;
        return std::equal(k, k + key_size_, key);
    }

    int key_size_;
    std::size_t capacity_;
    int size_ = 0;
    std::vector<int> slots_;
    std::vector<int> keys_;
};

}  // namespace

PermutohedralLattice::PermutohedralLattice(const std::vector<double>& features, int feature_dim,
                                           int n_points, double fineness)
    : n_(n_points), d_(feature_dim) {
    if (d_ < 1) throw std::invalid_argument("lattice: feature dim must be >= 1");
    if (n_ < 1) throw std::invalid_argument("lattice: need at least one point");
    if (!(fineness >= 1.0)) throw std::invalid_argument("lattice: fineness must be >= 1");
    if (features.size() != std::size_t(n_) * d_)
        throw std::invalid_argument("lattice: feature buffer size mismatch");

    const int d = d_;

    // Per-dimension variance budget in lattice units: each blur pass adds
    // (d+1)^2/2, splat and slice add (d+1)^2/12 each. Scaling features by
    // (d+1)*sqrt((1+3m)/6) makes the composite a unit-variance Gaussian
    // (m = 1 recovers the classic sqrt(2/3)*(d+1)). A fineness of k picks m
    // so the splat/slice smear shrinks about k-fold against the kernel width.
    blur_passes_ = std::max(1, int(std::ceil((4.0 * fineness * fineness - 1.0) / 3.0)));
    std::vector<double> scale(d);
    const double inv_std_dev = (d + 1) * std::sqrt((1.0 + 3.0 * blur_passes_) / 6.0);
    for (int i = 0; i < d; ++i) scale[i] = inv_std_dev / std::sqrt(double(i + 1) * (i + 2));

    // canonical[r][rank] = coordinate of the r-th simplex vertex
    std::vector<int> canonical((d + 1) * (d + 1));
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j) canonical[i * (d + 1) + j] = j <= d - i ? i : i - (d + 1);

    LatticeHashTable table(d, std::size_t(n_) * (d + 1));
    offsets_.assign(std::size_t(n_) * (d + 1), -1);
    barycentric_.assign(std::size_t(n_) * (d + 1), 0.0);

    std::vector<double> elevated(d + 1), bary(d + 3);
    std::vector<int> rem0(d + 1), rank(d + 1), key(d);

    for (int k = 0; k < n_; ++k) {
        const double* f = features.data() + std::size_t(k) * d;

        // Embed into the hyperplane sum(x) = 0 (E matrix applied implicitly).
        double sm = 0.0;
        for (int j = d; j > 0; --j) {
            const double cf = f[j - 1] * scale[j - 1];
            elevated[j] = sm - j * cf;
            sm += cf;
        }
        elevated[0] = sm;

        // Round to the nearest remainder-zero lattice point.
        int coord_sum = 0;
        for (int i = 0; i <= d; ++i) {
            const double v = elevated[i] / (d + 1);
            const double up = std::ceil(v) * (d + 1);
            const double down = std::floor(v) * (d + 1);
            const int rd = (up - elevated[i] < elevated[i] - down) ? int(std::lround(up))
                                                                   : int(std::lround(down));
            rem0[i] = rd;
            coord_sum += rd / (d + 1);
        }

        // rank[i] = position of coordinate i when the residuals are sorted
        // in decreasing order.
        std::fill(rank.begin(), rank.end(), 0);
        for (int i = 0; i < d; ++i) {
            const double di = elevated[i] - rem0[i];
            for (int j = i + 1; j <= d; ++j) {
                if (di < elevated[j] - rem0[j])
                    ++rank[i];
                else
                    ++rank[j];
            }
        }

        // If rounding left the sum-zero plane, walk back onto it.
        for (int i = 0; i <= d; ++i) {
            rank[i] += coord_sum;
            if (rank[i] < 0) {
                rank[i] += d + 1;
                rem0[i] += d + 1;
            } else if (rank[i] > d) {
                rank[i] -= d + 1;
                rem0[i] -= d + 1;
            }
        }

        // Barycentric coordinates within the enclosing simplex.
        std::fill(bary.begin(), bary.end(), 0.0);
        for (int i = 0; i <= d; ++i) {
            const double v = (elevated[i] - rem0[i]) / (d + 1);
            bary[d - rank[i]] += v;
            bary[d - rank[i] + 1] -= v;
        }
        bary[0] += 1.0 + bary[d + 1];

        for (int r = 0; r <= d; ++r) {
            for (int i = 0; i < d; ++i) key[i] = rem0[i] + canonical[r * (d + 1) + rank[i]];
            offsets_[std::size_t(k) * (d + 1) + r] = table.find_or_insert(key.data());
            barycentric_[std::size_t(k) * (d + 1) + r] = bary[r];
        }
    }

    // Halo: the multi-pass blur transports mass up to blur_passes_ steps, so
    // vertices within that graph distance of any splat vertex must exist or
    // the truncation distorts the kernel. BFS layer by layer.
    std::vector<int> nkey(d);
    int layer_begin = 0;
    for (int layer = 0; layer < blur_passes_; ++layer) {
        const int layer_end = table.size();
        for (int m = layer_begin; m < layer_end; ++m) {
            std::vector<int> base(table.key(m), table.key(m) + d);
            for (int j = 0; j <= d; ++j) {
                for (int i = 0; i < d; ++i) nkey[i] = base[i] - 1;
                if (j < d) nkey[j] = base[j] + d;
                table.find_or_insert(nkey.data());
                for (int i = 0; i < d; ++i) nkey[i] = base[i] + 1;
                if (j < d) nkey[j] = base[j] - d;
                table.find_or_insert(nkey.data());
            }
        }
        layer_begin = layer_end;
    }

    m_ = table.size();

    // Neighbor indices along each lattice axis. Keys store the first d
    // coordinates; axis d shifts only the implicit last coordinate.
    blur_n1_.assign(std::size_t(d + 1) * m_, -1);
    blur_n2_.assign(std::size_t(d + 1) * m_, -1);
    for (int j = 0; j <= d; ++j) {
        for (int m = 0; m < m_; ++m) {
            const int* kk = table.key(m);
            for (int i = 0; i < d; ++i) nkey[i] = kk[i] - 1;
            if (j < d) nkey[j] = kk[j] + d;
            blur_n1_[std::size_t(j) * m_ + m] = table.find(nkey.data());
            for (int i = 0; i < d; ++i) nkey[i] = kk[i] + 1;
            if (j < d) nkey[j] = kk[j] - d;
            blur_n2_[std::size_t(j) * m_ + m] = table.find(nkey.data());
        }
    }

    calibrate();
}

void PermutohedralLattice::raw_filter(const double* in, double* out, int value_size) const {
    const int d = d_, m = m_, vs = value_size;

    // Slot 0 is a permanent zero block standing in for absent neighbors.
    std::vector<double> vals(std::size_t(m + 1) * vs, 0.0);
    std::vector<double> next(std::size_t(m + 1) * vs, 0.0);

    // Splat.
    for (int k = 0; k < n_; ++k) {
        const double* src = in + std::size_t(k) * vs;
        for (int r = 0; r <= d; ++r) {
            const int o = offsets_[std::size_t(k) * (d + 1) + r] + 1;
            const double w = barycentric_[std::size_t(k) * (d + 1) + r];
            double* dst = vals.data() + std::size_t(o) * vs;
            for (int c = 0; c < vs; ++c) dst[c] += w * src[c];
        }
    }

    // Blur along each axis with a [1/2, 1, 1/2] stencil, blur_passes_ times.
    for (int pass = 0; pass < blur_passes_; ++pass) {
        for (int j = 0; j <= d; ++j) {
            const int* n1s = blur_n1_.data() + std::size_t(j) * m;
            const int* n2s = blur_n2_.data() + std::size_t(j) * m;
            for (int v = 0; v < m; ++v) {
                const double* c0 = vals.data() + std::size_t(v + 1) * vs;
                const double* c1 = vals.data() + std::size_t(n1s[v] + 1) * vs;
                const double* c2 = vals.data() + std::size_t(n2s[v] + 1) * vs;
                double* dst = next.data() + std::size_t(v + 1) * vs;
                for (int c = 0; c < vs; ++c) dst[c] = c0[c] + 0.5 * (c1[c] + c2[c]);
            }
            std::swap(vals, next);
        }
    }

    // Slice.
    for (int k = 0; k < n_; ++k) {
        double* dst = out + std::size_t(k) * vs;
        std::fill(dst, dst + vs, 0.0);
        for (int r = 0; r <= d; ++r) {
            const int o = offsets_[std::size_t(k) * (d + 1) + r] + 1;
            const double w = barycentric_[std::size_t(k) * (d + 1) + r];
            const double* src = vals.data() + std::size_t(o) * vs;
            for (int c = 0; c < vs; ++c) dst[c] += w * src[c];
        }
    }
}

// The splat/blur/slice composite carries a gain from the unnormalized blur
// stencil plus an interpolation loss that depends only on the lattice
// geometry. Probing the self-response k(i,i) of a few points pins the global
// constant so the filter reproduces exp(0) = 1 on the diagonal.
void PermutohedralLattice::calibrate() {
    inv_gain_ = 1.0;
    const int probes = std::min(n_, 8);
    std::vector<double> in(std::size_t(n_) * probes, 0.0);
    std::vector<double> out(std::size_t(n_) * probes, 0.0);
    std::vector<int> idx(probes);
    for (int s = 0; s < probes; ++s) {
        idx[s] = int((s + 0.5) * double(n_) / probes);
        in[std::size_t(idx[s]) * probes + s] = 1.0;
    }
    raw_filter(in.data(), out.data(), probes);
    double total = 0.0;
    for (int s = 0; s < probes; ++s) total += out[std::size_t(idx[s]) * probes + s];
    const double gain = total / probes;
    if (gain > 0.0) inv_gain_ = 1.0 / gain;
}

void PermutohedralLattice::filter(const double* in, double* out, int value_size) const {
    raw_filter(in, out, value_size);
    for (std::size_t i = 0; i < std::size_t(n_) * value_size; ++i) out[i] *= inv_gain_;
}

}  // namespace rrm
