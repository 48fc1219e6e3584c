#include "nvsim/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "nvsim/rng.hpp"

namespace nvsim {

DipoleSample sample_dipole(std::uint64_t seed, std::uint64_t index, double diameter_nm) {
    if (diameter_nm <= 2.0 * kShellExclusionNm)
        throw std::invalid_argument("nanodiamond too small for the 5 nm exclusion shell");
    CounterRng rng(seed, index);
    const double r_max = diameter_nm / 2.0 - kShellExclusionNm;
    // Inverse transform in radius cubed gives a uniform density in the ball.
    const double r = r_max * std::cbrt(rng.next_double());
    const Vec3 dir = rng.next_unit_vector();
    DipoleSample s;
    s.offset = dir * r;
    s.orientation = rng.next_unit_vector();
    s.sample_index = index;
    s.seed = seed;
    return s;
}

DipoleSample sample_dipole(std::uint64_t seed, std::uint64_t index, const SampleRegion& region) {
    if (region.kind == SampleRegion::Kind::Ball) return sample_dipole(seed, index, region.size);
    CounterRng rng(seed, index);
    const double m = kShellExclusionNm;
    Vec3 offset;
    switch (region.kind) {
        case SampleRegion::Kind::Cube: {
            const double h = region.size / 2.0 - m;
            if (h <= 0.0) throw std::invalid_argument("cube too small for the exclusion shell");
            offset = {h * (2.0 * rng.next_double() - 1.0), h * (2.0 * rng.next_double() - 1.0),
                      h * (2.0 * rng.next_double() - 1.0)};
            break;
        }
        case SampleRegion::Kind::Octahedron: {
            // |x|+|y|+|z| <= R; eroding the faces by 5 nm shrinks R by 5*sqrt(3)
            const double R = region.size / std::sqrt(2.0) - m * std::sqrt(3.0);
            if (R <= 0.0) throw std::invalid_argument("octahedron too small for the exclusion shell");
            do {
                offset = {R * (2.0 * rng.next_double() - 1.0), R * (2.0 * rng.next_double() - 1.0),
                          R * (2.0 * rng.next_double() - 1.0)};
            } while (std::abs(offset.x) + std::abs(offset.y) + std::abs(offset.z) > R);
            break;
        }
        case SampleRegion::Kind::Ellipsoid: {
            const double ae = region.size / 2.0 * region.eta - m;
            const double ce = region.size / 2.0 / (region.eta * region.eta) - m;
            if (ae <= 0.0 || ce <= 0.0)
                throw std::invalid_argument("ellipsoid too small for the exclusion shell");
            Vec3 u;
            do {
                u = {2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0,
                     2.0 * rng.next_double() - 1.0};
            } while (u.norm() > 1.0);
            offset = {ae * u.x, ae * u.y, ce * u.z};
            break;
        }
        default:
            throw std::invalid_argument("unknown sample region");
    }
    DipoleSample s;
    s.offset = offset;
    s.orientation = rng.next_unit_vector();
    s.sample_index = index;
    s.seed = seed;
    return s;
}

double percentile(std::vector<double> v, double p) {
    if (v.empty()) throw std::invalid_argument("percentile of empty sample set");
    std::sort(v.begin(), v.end());
    const double h = p * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

DistStats LifetimeDistribution::stats() const {
    if (samples.size() < 2) throw std::invalid_argument("need at least 2 samples for statistics");
    DistStats s;
    const double n = static_cast<double>(samples.size());
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    s.dtau = percentile(samples, 0.75) - percentile(samples, 0.25);
    s.w = s.mean != 0.0 ? s.dtau / s.mean : 0.0;
    return s;
}

Histogram LifetimeDistribution::histogram(int bins) const {
    if (bins < 1 || samples.empty()) throw std::invalid_argument("histogram needs samples and bins >= 1");
    auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *mn_it, hi = *mx_it;
    if (hi == lo) hi = lo + 1.0;
    Histogram h;
    h.edges.resize(bins + 1);
    h.counts.assign(bins, 0);
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
    for (double x : samples) {
        int b = std::min(bins - 1, static_cast<int>((x - lo) / (hi - lo) * bins));
        ++h.counts[std::max(0, b)];
    }
    return h;
}

LifetimeDistribution to_lifetimes(const LifetimeDistribution& rates, double tau_bulk_ns) {
    if (rates.unit != SampleUnit::RelativeRate)
        throw std::invalid_argument("to_lifetimes expects a relative-rate distribution");
    LifetimeDistribution out = rates;
    out.unit = SampleUnit::LifetimeNs;
    out.samples.clear();
    for (double r : rates.samples) {
        if (r > 0.0)
            out.samples.push_back(tau_bulk_ns / r);
        else
            ++out.failed_n;
    }
    return out;
}

namespace {
double mean_lifetime_of(const LifetimeDistribution& d, double tau_bulk_ns) {
    double acc = 0.0;
    for (double x : d.samples) acc += d.unit == SampleUnit::LifetimeNs ? x : tau_bulk_ns / x;
    return acc / static_cast<double>(d.samples.size());
}
} // namespace

RescaleResult rescale(const LifetimeDistribution& dist, double target, double tau_bulk_ns) {
    if (target <= 0.0) throw std::invalid_argument("rescale target must be positive");
    if (dist.samples.empty()) throw std::invalid_argument("rescale of empty distribution");
    RescaleResult res;
    res.k = mean_lifetime_of(dist, tau_bulk_ns) / target;
    double mean_rate = 0.0;
    for (double x : dist.samples) mean_rate += dist.unit == SampleUnit::RelativeRate ? x : tau_bulk_ns / x;
    mean_rate /= static_cast<double>(dist.samples.size());
    res.k_rate = (tau_bulk_ns / target) / mean_rate;
    res.dist = apply_rescale(dist, res.k);
    return res;
}

LifetimeDistribution apply_rescale(const LifetimeDistribution& dist, double k) {
    LifetimeDistribution out = dist;
    for (double& x : out.samples) x = dist.unit == SampleUnit::RelativeRate ? x * k : x / k;
    out.scale_factor = dist.scale_factor * k;
    return out;
}

LifetimeDistribution mix(const LifetimeDistribution& top, const LifetimeDistribution& interstitial,
                         const LifetimeDistribution& rest, const SiteWeights& w, long n_out,
                         std::uint64_t seed) {
    if (std::abs(w.top + w.interstitial + w.rest - 1.0) > 1e-9)
        throw std::invalid_argument("site weights must sum to 1");
    const LifetimeDistribution* sites[3] = {&top, &interstitial, &rest};
    const double f[3] = {w.top, w.interstitial, w.rest};
    for (const auto* s : sites)
        if (s->samples.empty()) throw std::invalid_argument("mix needs all three site distributions");

    // Largest-remainder apportionment of n_out across the sites.
    long counts[3];
    double rema[3];
    long used = 0;
    for (int i = 0; i < 3; ++i) {
        double exact = f[i] * static_cast<double>(n_out);
        counts[i] = static_cast<long>(std::floor(exact));
        rema[i] = exact - static_cast<double>(counts[i]);
        used += counts[i];
    }
    while (used < n_out) {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (rema[i] > rema[best]) best = i;
        ++counts[best];
        rema[best] = -1.0;
        ++used;
    }

    LifetimeDistribution out;
    out.unit = top.unit;
    out.scenario = "mixture";
    out.seed = seed;
    out.requested_n = n_out;
    for (int i = 0; i < 3; ++i) {
        CounterRng rng(seed, 0x6d69780000ull + i);
        for (long c = 0; c < counts[i]; ++c) {
            std::size_t pick = static_cast<std::size_t>(rng.next_double() *
                                                        static_cast<double>(sites[i]->samples.size()));
            pick = std::min(pick, sites[i]->samples.size() - 1);
            out.samples.push_back(sites[i]->samples[pick]);
        }
    }
    return out;
}

std::string LifetimeDistribution::to_json() const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["N"] = requested_n;
    j["failed"] = failed_n;
    j["seed"] = seed;
    j["unit"] = unit == SampleUnit::RelativeRate ? "relative_rate" : "lifetime_ns";
    j["samples"] = samples;
    if (samples.size() >= 2) {
        DistStats s = stats();
        j["tau_mean"] = s.mean;
        j["sem"] = s.sem;
        j["dtau"] = s.dtau;
        j["w"] = s.w;
    }
    if (scale_factor != 1.0) j["scale_factor"] = scale_factor;
    return j.dump(2);
}

LifetimeDistribution LifetimeDistribution::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LifetimeDistribution d;
    d.scenario = j.value("scenario", "");
    d.requested_n = j.value("N", 0L);
    d.failed_n = j.value("failed", 0L);
    d.seed = j.value("seed", std::uint64_t{0});
    d.unit = j.value("unit", "relative_rate") == "lifetime_ns" ? SampleUnit::LifetimeNs
                                                               : SampleUnit::RelativeRate;
    d.samples = j.value("samples", std::vector<double>{});
    d.scale_factor = j.value("scale_factor", 1.0);
    return d;
}

} // namespace nvsim
