#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nvsim/ensemble.hpp"
#include "nvsim/oracles.hpp"
#include "nvsim/scene.hpp"

using namespace nvsim;

TEST_CASE("homogeneous rate equals the refractive index") {
    CHECK(homogeneous_rate(1.0) == doctest::Approx(1.0));
    CHECK(homogeneous_rate(2.4) == doctest::Approx(2.4));
    CHECK(homogeneous_rate(1.45) == doctest::Approx(1.45));
    CHECK_THROWS_AS(homogeneous_rate(0.9), OracleError);
}

TEST_CASE("small-sphere suppression values") {
    CHECK(small_sphere_ratio(2.4) == doctest::Approx(0.062).epsilon(0.017));
    CHECK(small_sphere_ratio(1.59) == doctest::Approx(0.276).epsilon(0.004));
    CHECK(small_sphere_ratio(1.0) == doctest::Approx(1.0));
    for (double n = 1.05; n < 3.0; n += 0.05) CHECK(small_sphere_ratio(n) < 1.0);
    // approaches 1 from below as n -> 1
    CHECK(small_sphere_ratio(1.001) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("sphere series: index-matched sphere is no sphere") {
    for (double r : {0.0, 5.0, 15.0, 26.0})
        for (auto o : {SphereOrientation::Radial, SphereOrientation::Tangential}) {
            CHECK(chew_rate({27.0, 1.45, 1.45, r, o, 680.0}) == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(chew_rate({120.0, 2.4, 2.4, r * 4, o, 680.0}) ==
                  doctest::Approx(1.0).epsilon(1e-8));
        }
}

TEST_CASE("sphere series: small-size limit reaches the suppression ratio") {
    for (double r : {0.0, 3.0, 8.0})
        for (auto o : {SphereOrientation::Radial, SphereOrientation::Tangential})
            CHECK(chew_rate({10.0, 2.4, 1.0, r, o, 680.0}) ==
                  doctest::Approx(0.062).epsilon(0.033));
    // cross-check the polystyrene value against the closed form
    CHECK(chew_rate({5.0, 1.59, 1.0, 0.0, SphereOrientation::Radial, 680.0}) ==
          doctest::Approx(small_sphere_ratio(1.59)).epsilon(0.01));
}

TEST_CASE("sphere series: weak position and orientation dependence at 2a/lambda = 0.08") {
    const double a = 0.08 * 680.0 / 2.0;
    double lo = 1e300, hi = 0.0;
    for (double f : {0.0, 0.3, 0.6, 0.9})
        for (auto o : {SphereOrientation::Radial, SphereOrientation::Tangential}) {
            const double v = chew_rate({a, 2.4, 1.0, f * a, o, 680.0});
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    // "very weakly" dependent: the full position/orientation spread stays
    // within ~10%, and well under the order-unity site effects
    CHECK((hi - lo) / lo < 0.12);
}

TEST_CASE("sphere series: continuous in radius and offset") {
    double prev = chew_rate({20.0, 2.4, 1.0, 12.0, SphereOrientation::Radial, 680.0});
    for (double a = 20.5; a <= 170.0; a += 0.5) {
        const double v = chew_rate({a, 2.4, 1.0, 12.0, SphereOrientation::Radial, 680.0});
        CHECK(std::abs(v - prev) < 0.05);
        prev = v;
    }
    CHECK_THROWS_AS(chew_rate({27.0, 2.4, 1.0, 27.0, SphereOrientation::Radial, 680.0}),
                    OracleError);
}

TEST_CASE("interface rate: no interface, far field, near-field ordering") {
    for (double z : {0.0, 13.0, 250.0, 900.0})
        for (auto o : {InterfaceOrientation::Parallel, InterfaceOrientation::Perpendicular})
            CHECK(interface_rate({z, 1.45, 1.45, o, 680.0}) == doctest::Approx(1.0));
    for (auto o : {InterfaceOrientation::Parallel, InterfaceOrientation::Perpendicular})
        CHECK(interface_rate({5 * 680.0, 1.0, 1.45, o, 680.0}) ==
              doctest::Approx(1.0).epsilon(0.02));
    // perpendicular exceeds parallel at contact for n2 > n1
    for (double n2 : {1.45, 2.4})
        CHECK(interface_rate({0.0, 1.0, n2, InterfaceOrientation::Perpendicular, 680.0}) >
              interface_rate({0.0, 1.0, n2, InterfaceOrientation::Parallel, 680.0}));
    CHECK_THROWS_AS(interface_rate({-1.0, 1.0, 1.45, InterfaceOrientation::Parallel, 680.0}),
                    OracleError);
}

TEST_CASE("interface rate oscillates about 1 with decaying amplitude") {
    int sign_changes = 0;
    double prev = interface_rate({0.0, 1.0, 1.45, InterfaceOrientation::Parallel, 680.0}) - 1.0;
    double peak_near = 0.0, peak_far = 0.0;
    for (double z = 10.0; z <= 2040.0; z += 10.0) {
        const double d = interface_rate({z, 1.0, 1.45, InterfaceOrientation::Parallel, 680.0}) - 1.0;
        if (d * prev < 0.0) ++sign_changes;
        if (z < 680.0) peak_near = std::max(peak_near, std::abs(d));
        if (z > 1360.0) peak_far = std::max(peak_far, std::abs(d));
        prev = d;
    }
    CHECK(sign_changes >= 3);
    CHECK(peak_far < peak_near);
}

TEST_CASE("index-averaged lifetime values and monotone decrease") {
    CHECK(naive_lifetime({0.5, 1.45}) == doctest::Approx(22.7).epsilon(0.005));
    CHECK(naive_lifetime({1.0, 2.4}) == doctest::Approx(11.6));
    CHECK(naive_lifetime({0.0, 1.45}) == doctest::Approx(27.84));
    for (double ns : {1.33, 1.45, 1.59, 2.4}) {
        double prev = 1e300;
        for (int i = 0; i <= 50; ++i) {
            const double tau = naive_lifetime({i / 50.0, ns});
            CHECK(tau < prev);
            prev = tau;
        }
    }
    CHECK_THROWS_AS(naive_lifetime({1.2, 1.45}), OracleError);
}

TEST_CASE("composite coverslip model: no index contrast leaves only the sphere factor") {
    std::vector<DipoleSample> samples;
    for (int i = 0; i < 20; ++i) samples.push_back(sample_dipole(7, i, 54.0));
    const auto rates = composite_coverslip_model(samples, 54.0, 1.0, 680.0);
    for (double r : rates) CHECK(r == doctest::Approx(small_sphere_ratio(2.4)));
}

TEST_CASE("composite coverslip model mean sits well below 0.5") {
    std::vector<DipoleSample> samples;
    for (int i = 0; i < 500; ++i) samples.push_back(sample_dipole(11, i, 54.0));
    const auto rates = composite_coverslip_model(samples, 54.0, 1.45, 680.0);
    double mean = 0.0;
    for (double r : rates) mean += r;
    mean /= static_cast<double>(rates.size());
    CHECK(mean < 0.2);
    CHECK(mean > 0.0);
}
