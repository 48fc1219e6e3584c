#pragma once

#include <cstdint>

#include "nvsim/vec3.hpp"

namespace nvsim {

// Counter-based generator (splitmix64 finaliser over key+counter). Draw i of
// stream (seed, index) is a pure function of (seed, index, i), so samples are
// independent of evaluation order and thread schedule.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ 0x9e3779b97f4a7c15ull, stream)) {}

    std::uint64_t next_u64() { return mix(key_, counter_++); }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vec3 next_unit_vector() {
        Vec3 v{next_normal(), next_normal(), next_normal()};
        while (v.norm() < 1e-12) v = {next_normal(), next_normal(), next_normal()};
        return v.normalized();
    }

  private:
    static std::uint64_t mix(std::uint64_t key, std::uint64_t ctr) {
        std::uint64_t z = key + ctr * 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace nvsim
