#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nvsim/scene.hpp"
#include "nvsim/voxelize.hpp"

using namespace nvsim;

namespace {
constexpr double kEpsDiamond = 5.76;
constexpr double kEpsGlass = 2.1025;
constexpr double kEpsPoly = 1.59 * 1.59;
} // namespace

TEST_CASE("opal-top: apex sphere centre sits a + D/2 below the nanodiamond") {
    const DielectricScene scene = build_scene(PresetId::OpalTop);
    CHECK(scene.permittivity_at({0, 0, 0}) == doctest::Approx(kEpsDiamond));
    // just inside the apex sphere along the axis
    CHECK(scene.permittivity_at({0, 0, -28.0}) == doctest::Approx(kEpsPoly));
    CHECK(scene.permittivity_at({0, 0, -187.0 + 159.0}) == doctest::Approx(kEpsPoly));
    // just above its top surface but outside the diamond: air
    CHECK(scene.permittivity_at({40, 0, -26.0}) == doctest::Approx(1.0));
    // sphere centre itself
    CHECK(scene.permittivity_at({0, 0, -187.0}) == doctest::Approx(kEpsPoly));
    CHECK(scene.domain_size == doctest::Approx(700.0));
}

TEST_CASE("interstitial rest height matches a numeric solve of the tangency equation") {
    const double a = 160.0, D = 54.0;
    // independent bisection on sqrt(d_axis^2 + h^2) = a + D/2
    const double d_axis = 2.0 * a / std::sqrt(3.0);
    double lo = 0.0, hi = a + D / 2;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::hypot(d_axis, mid) < a + D / 2 ? lo : hi) = mid;
    }
    CHECK(interstitial_height(a, D) == doctest::Approx(lo).epsilon(1e-9));
    // h = sqrt((a + D/2)^2 - (2a/sqrt(3))^2)
    CHECK(interstitial_height(a, D) == doctest::Approx(28.908).epsilon(1e-3));
}

TEST_CASE("interstitial: inscribed diamond diameter 49.5 gives zero height") {
    CHECK(interstitial_height(160.0, 49.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(interstitial_height(160.0, 40.0), SceneError);
}

TEST_CASE("opal-interstitial: diamond tangent to the three pocket spheres") {
    const DielectricScene scene = build_scene(PresetId::OpalInterstitial);
    const double h = interstitial_height(160.0, 54.0);
    const double d_axis = 2.0 * 160.0 / std::sqrt(3.0);
    // pocket sphere centres lie in the plane z = -h relative to the diamond centre
    int tangent = 0;
    for (int s = 0; s < 3; ++s) {
        const double phi = 2.0 * std::numbers::pi * s / 3.0 + std::numbers::pi / 6.0;
        for (double rot = 0.0; rot < 2.0 * std::numbers::pi; rot += std::numbers::pi / 24) {
            const Vec3 c{d_axis * std::cos(phi + rot), d_axis * std::sin(phi + rot), -h};
            if (std::abs(scene.permittivity_at(c) - kEpsPoly) < 1e-12 &&
                std::abs(c.norm() - 187.0) < kTangencyTolerance) {
                ++tangent;
                break;
            }
        }
    }
    CHECK(tangent == 3);
}

TEST_CASE("opal-intermediate hovers 20 nm above the interstitial rest position") {
    const DielectricScene inter = build_scene(PresetId::OpalInterstitial);
    const DielectricScene mid = build_scene(PresetId::OpalIntermediate);
    // same substrate: probe a sphere-bulk point, offset by 20 nm in z
    const double h = interstitial_height(160.0, 54.0);
    const Vec3 below{2.0 * 160.0 / std::sqrt(3.0), 0.0, -h};
    const double e_inter = inter.permittivity_at(below);
    const double e_mid = mid.permittivity_at({below.x, below.y, below.z - 20.0});
    CHECK(e_inter == doctest::Approx(e_mid));
}

TEST_CASE("build_scene is pure") {
    const auto a = build_scene(PresetId::OpalInterstitial).to_json();
    const auto b = build_scene(PresetId::OpalInterstitial).to_json();
    CHECK(a == b);
}

TEST_CASE("coverslip: glass half-space tangent to the diamond") {
    const DielectricScene scene = build_scene(PresetId::Coverslip);
    CHECK(scene.domain_size == doctest::Approx(300.0));
    CHECK(scene.permittivity_at({0, 0, 0}) == doctest::Approx(kEpsDiamond));
    CHECK(scene.permittivity_at({100.0, 0, -28.0}) == doctest::Approx(kEpsGlass));
    CHECK(scene.permittivity_at({100.0, 0, -26.0}) == doctest::Approx(1.0));
}

TEST_CASE("voxelize: uniform scenes give constant permittivity") {
    const VoxelGrid g = voxelize(build_scene(PresetId::Homogeneous), 5.0);
    for (int c = 0; c < 3; ++c)
        for (double v : g.eps[c]) CHECK(v == doctest::Approx(kEpsDiamond));
}

TEST_CASE("voxelize: cells strictly below the coverslip interface are glass") {
    const VoxelGrid g = voxelize(build_scene(PresetId::Coverslip), 5.0);
    // interface at z = -27; component cells fully below z = -32 are pure glass
    const int dims = g.dims;
    int checked = 0;
    for (int k = 0; k < dims; ++k) {
        const double z_hi = g.origin() + (k + 1) * g.dx;
        if (z_hi > -32.0) continue;
        for (int i = 0; i < dims; i += 7)
            for (int j = 0; j < dims; j += 7) {
                CHECK(g.eps[0][g.idx(i, j, k)] == doctest::Approx(kEpsGlass));
                ++checked;
            }
    }
    CHECK(checked > 0);
}

TEST_CASE("voxelize: sphere mass conservation within 2% at dx = 2.5") {
    const DielectricScene scene = build_scene(PresetId::IsolatedSphere);
    const VoxelGrid g = voxelize(scene, 2.5);
    double excess = 0.0; // sum of (eps - background) * cell volume
    for (double v : g.eps[0]) excess += (v - 1.0) * g.dx * g.dx * g.dx;
    const double analytic = (kEpsDiamond - 1.0) * 4.0 / 3.0 * std::numbers::pi * 27.0 * 27.0 * 27.0;
    CHECK(excess == doctest::Approx(analytic).epsilon(0.02));
}

TEST_CASE("voxelize rejects a non-divisible domain") {
    CHECK_THROWS_AS(voxelize(build_scene(PresetId::Coverslip), 7.0), SceneError);
}

TEST_CASE("interstitial scene is invariant under 120 degree rotation") {
    const DielectricScene scene = build_scene(PresetId::OpalInterstitial);
    const double c = std::cos(2.0 * std::numbers::pi / 3.0);
    const double s = std::sin(2.0 * std::numbers::pi / 3.0);
    int mismatches = 0, total = 0;
    for (double x = -330.0; x <= 330.0; x += 12.5)
        for (double y = -330.0; y <= 330.0; y += 12.5)
            for (double z = -330.0; z <= 330.0; z += 37.5) {
                const Vec3 p{x, y, z};
                const Vec3 r{c * x - s * y, s * x + c * y, z};
                ++total;
                if (std::abs(scene.permittivity_at(p) - scene.permittivity_at(r)) > 1e-9)
                    ++mismatches;
            }
    // exact geometry, so only floating-point boundary points may disagree
    CHECK(mismatches <= total / 1000);
}

TEST_CASE("volume fractions within a cubic wavelength match the stated values") {
    const double f_top = volume_fraction(build_scene(PresetId::OpalTop), {0, 0, 0}, 680.0);
    const double f_int = volume_fraction(build_scene(PresetId::OpalInterstitial), {0, 0, 0}, 680.0);
    CHECK(f_top == doctest::Approx(0.36).epsilon(0.09));
    CHECK(f_int == doctest::Approx(0.46).epsilon(0.09));
    CHECK(f_int > f_top);
    // background-only scene
    DielectricScene empty;
    empty.background = {materials::n_air};
    empty.nanodiamond = {Sphere{{0, 0, 0}, 27.0}, Material{materials::n_diamond}};
    CHECK(volume_fraction(empty, {0, 0, 0}, 680.0) == doctest::Approx(0.0));
}

TEST_CASE("shape presets rest on the glass surface") {
    SceneParams p;
    const DielectricScene cube = build_scene(PresetId::ShapeCube, p);
    CHECK(cube.permittivity_at({0, 0, 0}) == doctest::Approx(kEpsDiamond));
    CHECK(cube.permittivity_at({100, 0, -31.0}) == doctest::Approx(kEpsGlass));
    CHECK(cube.permittivity_at({29.0, 29.0, -29.0}) == doctest::Approx(kEpsDiamond));
    CHECK(cube.permittivity_at({31.0, 0, 0}) == doctest::Approx(1.0));

    const DielectricScene octa = build_scene(PresetId::ShapeOctahedron, p);
    const double vertex = 60.0 / std::sqrt(2.0);
    CHECK(octa.permittivity_at({0, 0, -vertex + 1.0}) == doctest::Approx(kEpsDiamond));
    CHECK(octa.permittivity_at({100, 0, -vertex - 1.0}) == doctest::Approx(kEpsGlass));
    CHECK(octa.permittivity_at({20.0, 20.0, 20.0}) == doctest::Approx(1.0));

    p.ellipsoid_eta = 1.2;
    const DielectricScene ell = build_scene(PresetId::ShapeEllipsoid, p);
    const double az = 30.0 / (1.2 * 1.2); // short vertical semi-axis
    CHECK(ell.permittivity_at({0, 0, -az + 0.5}) == doctest::Approx(kEpsDiamond));
    CHECK(ell.permittivity_at({100, 0, -az - 1.0}) == doctest::Approx(kEpsGlass));
    CHECK(ell.permittivity_at({30.0 * 1.2 - 0.5, 0, 0}) == doctest::Approx(kEpsDiamond));
    CHECK(ell.permittivity_at({0, 0, az + 0.5}) == doctest::Approx(1.0));
}

TEST_CASE("preset names round-trip") {
    for (PresetId id : {PresetId::Coverslip, PresetId::OpalInterstitial, PresetId::OpalIntermediate,
                        PresetId::OpalTop, PresetId::IsolatedSphere, PresetId::Homogeneous,
                        PresetId::ShapeSphere, PresetId::ShapeCube, PresetId::ShapeOctahedron,
                        PresetId::ShapeEllipsoid}) {
        const auto back = preset_from_string(to_string(id));
        REQUIRE(back.has_value());
        CHECK(*back == id);
    }
    CHECK(!preset_from_string("no-such-preset").has_value());
}
