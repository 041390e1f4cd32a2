#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

namespace rrm {

// Fixed 9-significant-digit formatting for every serialized number, so that
// repeated runs diff cleanly.
inline std::string fmt_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Round a double to its 9-significant-digit decimal representation.
inline double round_g9(double v) {
    return std::strtod(fmt_g9(v).c_str(), nullptr);
}

// Seeded generator with explicitly pinned draw arithmetic; standard
// distributions are implementation-defined, these are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // [0, 1)
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n)
    int uniform_int(int n) { return int(uniform() * n); }

private:
    std::mt19937_64 gen_;
};

}  // namespace rrm
