#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nvsim/analysis.hpp"
#include "nvsim/rng.hpp"

using namespace nvsim;

namespace {

G2Trace make_trace(const G2Params& p, double noise_sigma = 0.0, std::uint64_t seed = 0) {
    G2Trace t;
    CounterRng rng(seed, 77);
    for (double tau = -120.0; tau <= 120.0; tau += 2.0) {
        t.tau_ns.push_back(tau);
        t.g2.push_back(g2_model(tau, p) + (noise_sigma > 0.0 ? noise_sigma * rng.next_normal() : 0.0));
    }
    return t;
}

} // namespace

TEST_CASE("g2 model: dip, uncorrelated limit, two-level reduction, symmetry") {
    const G2Params ideal{0.5, 8.0, 60.0, 0.0};
    CHECK(g2_model(0.0, ideal) == doctest::Approx(0.0));
    CHECK(g2_model(1e6, ideal) == doctest::Approx(1.0));
    const G2Params two_level{0.0, 8.0, 60.0, 0.0};
    for (double tau : {0.5, 3.0, 12.0})
        CHECK(g2_model(tau, two_level) == doctest::Approx(1.0 - std::exp(-tau / 8.0)));
    for (double tau : {0.1, 4.0, 33.0, 250.0})
        CHECK(g2_model(tau, ideal) == doctest::Approx(g2_model(-tau, ideal)));
    // background contrast mixes towards 1
    const G2Params dirty{0.5, 8.0, 60.0, 0.3};
    CHECK(g2_model(0.0, dirty) == doctest::Approx(0.3));
}

TEST_CASE("g2 fit: noiseless round-trip within 1e-6 relative") {
    const G2Params truth{0.4, 12.0, 90.0, 0.1};
    const G2Fit fit = fit_g2(make_trace(truth));
    CHECK(fit.params.a == doctest::Approx(truth.a).epsilon(1e-6));
    CHECK(fit.params.tau1 == doctest::Approx(truth.tau1).epsilon(1e-6));
    CHECK(fit.params.tau2 == doctest::Approx(truth.tau2).epsilon(1e-6));
    CHECK(fit.params.contrast == doctest::Approx(truth.contrast).epsilon(1e-5));
    CHECK(fit.rms_residual < 1e-8);
    CHECK(fit.dip_below_half);
}

TEST_CASE("g2 fit: tau1 within 5% under 2% noise over 100 realizations") {
    const G2Params truth{0.5, 10.0, 100.0, 0.0};
    int good = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const G2Fit fit = fit_g2(make_trace(truth, 0.02, s));
        if (std::abs(fit.params.tau1 - truth.tau1) / truth.tau1 < 0.05) ++good;
    }
    // allow a few unlucky noise realizations
    CHECK(good >= 95);
}

TEST_CASE("g2 fit flags a flat trace") {
    G2Trace flat;
    for (double tau = -100.0; tau <= 100.0; tau += 4.0) {
        flat.tau_ns.push_back(tau);
        flat.g2.push_back(1.0);
    }
    const G2Fit fit = fit_g2(flat);
    CHECK(!fit.dip_below_half);
}

TEST_CASE("zero-power extrapolation: constant, exact linear, insufficient data") {
    std::vector<PowerPoint> constant;
    for (double p = 1.0; p <= 4.0; p += 1.0) constant.push_back({p, 20.0, 0.5});
    CHECK(extrapolate_zero_power(constant).lifetime_ns == doctest::Approx(20.0));

    std::vector<PowerPoint> linear;
    for (double p = 1.0; p <= 5.0; p += 1.0) linear.push_back({p, 17.5 - 0.3 * p, 0.4});
    const Extrapolation e = extrapolate_zero_power(linear);
    CHECK(e.lifetime_ns == doctest::Approx(17.5).epsilon(1e-12));
    CHECK(e.slope == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(e.sigma_ns >= 0.0);

    CHECK_THROWS_AS(extrapolate_zero_power({{1.0, 17.0, 0.4}}), AnalysisError);
    // singular design: all powers equal
    CHECK_THROWS_AS(extrapolate_zero_power({{2.0, 17.0, 0.4}, {2.0, 16.0, 0.4}}), AnalysisError);
}

TEST_CASE("KS: identical sets, brute-force case, symmetry") {
    std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
    const KsResult same = ks_two_sample(x, x);
    CHECK(same.d == doctest::Approx(0.0));
    CHECK(same.p_value == doctest::Approx(1.0));

    const KsResult brute = ks_two_sample({1.0, 2.0}, {1.5, 2.5});
    CHECK(brute.d == doctest::Approx(0.5));

    std::vector<double> y{1.2, 2.9, 3.3, 4.8, 6.0, 7.1};
    const KsResult ab = ks_two_sample(x, y);
    const KsResult ba = ks_two_sample(y, x);
    CHECK(ab.d == doctest::Approx(ba.d));
    CHECK(ab.p_value == doctest::Approx(ba.p_value));

    CHECK_THROWS_AS(ks_two_sample({}, y), AnalysisError);
}

TEST_CASE("KS is invariant under a common strictly monotone transform") {
    CounterRng rng(5, 0);
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) x.push_back(rng.next_double());
    for (int i = 0; i < 35; ++i) y.push_back(0.2 + rng.next_double());
    const KsResult raw = ks_two_sample(x, y);
    auto warp = [](std::vector<double> v) {
        for (double& t : v) t = std::exp(3.0 * t) - 0.5;
        return v;
    };
    const KsResult warped = ks_two_sample(warp(x), warp(y));
    CHECK(warped.d == doctest::Approx(raw.d));
    CHECK(warped.p_value == doctest::Approx(raw.p_value));
}

TEST_CASE("KS asymptotic p tracks the exact permutation oracle at small n") {
    CounterRng rng(9, 3);
    std::vector<double> x, y;
    for (int i = 0; i < 9; ++i) x.push_back(rng.next_double());
    for (int i = 0; i < 8; ++i) y.push_back(rng.next_double() + 0.3);
    const KsResult asym = ks_two_sample(x, y);
    const double exact = ks_exact_permutation_p(x, y);
    // the asymptotic series is rough at n ~ 10; agreement to a factor ~2
    CHECK(asym.p_value > 0.25 * exact);
    CHECK(asym.p_value < 4.0 * exact + 0.05);
}

TEST_CASE("KS p-values are roughly uniform under the null (1000 repetitions)") {
    int below_05 = 0, below_50 = 0;
    for (std::uint64_t rep = 0; rep < 1000; ++rep) {
        CounterRng rng(123, rep);
        std::vector<double> x, y;
        for (int i = 0; i < 30; ++i) x.push_back(rng.next_double());
        for (int i = 0; i < 30; ++i) y.push_back(rng.next_double());
        const double p = ks_two_sample(x, y).p_value;
        if (p < 0.05) ++below_05;
        if (p < 0.5) ++below_50;
    }
    // KS p is conservative and discrete at n = 30; loose binomial bounds
    CHECK(below_05 <= 100);
    CHECK(below_50 > 300);
    CHECK(below_50 < 700);
}

TEST_CASE("least-squares engine recovers an exponential decay") {
    std::vector<double> ts, ys;
    for (double t = 0.0; t <= 10.0; t += 0.5) {
        ts.push_back(t);
        ys.push_back(3.0 * std::exp(-t / 2.5));
    }
    auto resid = [&](const std::vector<double>& p) {
        std::vector<double> r(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i)
            r[i] = p[0] * std::exp(-ts[i] / p[1]) - ys[i];
        return r;
    };
    const LeastSquaresResult fit = fit_least_squares(resid, {1.0, 1.0});
    CHECK(fit.converged);
    CHECK(fit.params[0] == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(fit.params[1] == doctest::Approx(2.5).epsilon(1e-6));
}
