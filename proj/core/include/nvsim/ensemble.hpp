#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvsim/vec3.hpp"

namespace nvsim {

inline constexpr double kShellExclusionNm = 5.0;
inline constexpr double kBulkLifetimeNs = 11.6;

struct DipoleSample {
    Vec3 offset;      // from the nanodiamond centre, nm
    Vec3 orientation; // unit
    std::uint64_t sample_index = 0;
    std::uint64_t seed = 0;
};

// Offset uniform in the ball of radius D/2 - 5 nm, orientation uniform on the
// unit sphere; deterministic in (seed, index).
DipoleSample sample_dipole(std::uint64_t seed, std::uint64_t index, double diameter_nm);

// Emitter host region for the non-spherical presets. Extents are the outer
// shape; the 5 nm exclusion shell is applied inside the sampler.
struct SampleRegion {
    enum class Kind { Ball, Cube, Octahedron, Ellipsoid };
    Kind kind = Kind::Ball;
    double size = 54.0; // ball/cube/octahedron: diameter or side length
    double eta = 1.0;   // ellipsoid: semi-axes (size/2*eta, size/2*eta, size/2/eta^2)
};

// Offset uniform in the region eroded by the 5 nm shell (rejection sampling
// from a per-index counter stream, so still deterministic in (seed, index)).
DipoleSample sample_dipole(std::uint64_t seed, std::uint64_t index, const SampleRegion& region);

struct SiteWeights {
    double top = 0.10;
    double interstitial = 0.65;
    double rest = 0.25;
};

struct Histogram {
    std::vector<double> edges; // size bins+1
    std::vector<long> counts;  // size bins
};

enum class SampleUnit { RelativeRate, LifetimeNs };

struct DistStats {
    double mean = 0.0;
    double sem = 0.0;     // standard error of the mean
    double dtau = 0.0;    // central-50% width (25th..75th percentile)
    double w = 0.0;       // dtau / mean
};

struct LifetimeDistribution {
    std::vector<double> samples;
    SampleUnit unit = SampleUnit::RelativeRate;
    std::string scenario;
    std::uint64_t seed = 0;
    long requested_n = 0;
    long failed_n = 0;
    double scale_factor = 1.0; // rate multiplier applied by rescale()

    DistStats stats() const;
    Histogram histogram(int bins) const;
    std::string to_json() const;
    static LifetimeDistribution from_json(const std::string& text);
};

// Linear-interpolation percentile (0 <= p <= 1) over a copy-sorted sample set.
double percentile(std::vector<double> samples, double p);

// tau = tau_b / R per sample; nonpositive rates are dropped and counted.
LifetimeDistribution to_lifetimes(const LifetimeDistribution& rates, double tau_bulk_ns = kBulkLifetimeNs);

struct RescaleResult {
    LifetimeDistribution dist;
    double k;        // rate multiplier: mean lifetime / target
    double k_rate;   // alternative reading: target rate / mean rate
};

// Multiply every rate by one global k so the mean lifetime hits the target;
// apply_rescale reuses a k obtained elsewhere (the coverslip anchor).
RescaleResult rescale(const LifetimeDistribution& dist, double target_mean_lifetime_ns,
                      double tau_bulk_ns = kBulkLifetimeNs);
LifetimeDistribution apply_rescale(const LifetimeDistribution& dist, double k);

// Stratified resample of the three site distributions in proportion
// (top, interstitial, rest).
LifetimeDistribution mix(const LifetimeDistribution& top, const LifetimeDistribution& interstitial,
                         const LifetimeDistribution& rest, const SiteWeights& weights, long n_out,
                         std::uint64_t seed);

} // namespace nvsim
