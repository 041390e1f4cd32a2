#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rrm/crf.hpp"
#include "rrm/losses.hpp"
#include "rrm/util.hpp"

namespace rrm::selftest {

// Tolerances shared by the embedded property suite and the acceptance run.
inline constexpr double kPottsTol = 1e-9;       // relative, energy vs pair-sum reference
inline constexpr double kGradTol = 1e-4;        // max relative error vs central differences
inline constexpr double kFdStep = 1e-5;
inline constexpr double kFilterTol = 0.05;      // relative L2, lattice vs brute force
inline constexpr double kCrfNormTol = 1e-6;     // per-pixel normalization drift
inline constexpr double kCrfUnaryTol = 1e-9;    // zero-weight CRF vs normalized unary
inline constexpr double kCrfUniformTol = 1e-6;  // uniform unary fixed point

// Deterministic instance generators used by all property checks.
ProbMap random_prob_map(Rng& rng, int channels, int height, int width);
ImageRGB random_image(Rng& rng, int height, int width);
LabelMap random_labels(Rng& rng, int height, int width, int num_classes,
                       double labeled_fraction);

// Each check returns the worst observed metric over `instances` seeds.
double check_potts_identity(std::uint64_t seed, int instances, const EnergyConfig& cfg);
double check_energy_grad_fd(std::uint64_t seed, int instances, const EnergyConfig& cfg);
double check_ce_grad_fd(std::uint64_t seed, int instances);
double check_filter_fidelity(std::uint64_t seed, int instances, int height, int width,
                             double sigma_d, double sigma_r);
double check_crf_normalization(std::uint64_t seed, const CrfConfig& cfg, int max_iterations);
double check_crf_zero_weights(std::uint64_t seed);
double check_crf_uniform_fixed_point(std::uint64_t seed, const CrfConfig& cfg);

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// The embedded suite behind `rrm selftest`: small instance counts, full
// property coverage, deterministic output for a fixed seed.
std::vector<PropertyResult> run(std::uint64_t seed, const EnergyConfig& energy_cfg,
                                const CrfConfig& crf_cfg);

}  // namespace rrm::selftest
