#include "nvsim/scene.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace nvsim {

namespace {

struct ContainsVisitor {
    const Vec3& p;
    bool operator()(const HalfSpace& h) const { return p.dot(h.normal) <= h.offset; }
    bool operator()(const Sphere& s) const { return (p - s.center).dot(p - s.center) <= s.radius * s.radius; }
    bool operator()(const Cube& c) const {
        Vec3 d = p - c.center;
        double h = c.side / 2.0;
        return std::abs(d.x) <= h && std::abs(d.y) <= h && std::abs(d.z) <= h;
    }
    bool operator()(const Octahedron& o) const {
        Vec3 d = p - o.center;
        return std::abs(d.x) + std::abs(d.y) + std::abs(d.z) <= o.side / std::sqrt(2.0);
    }
    bool operator()(const Ellipsoid& e) const {
        Vec3 d = p - e.center;
        double u = d.x / e.semi_axes.x, v = d.y / e.semi_axes.y, w = d.z / e.semi_axes.z;
        return u * u + v * v + w * w <= 1.0;
    }
};

// Vertical extent of a shape below its centre (resting conventions: cube on a
// face, octahedron on a vertex, ellipsoid short axis vertical).
double bottom_depth(const Primitive& prim) {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>) return s.radius;
            else if constexpr (std::is_same_v<T, Cube>) return s.side / 2.0;
            else if constexpr (std::is_same_v<T, Octahedron>) return s.side / std::sqrt(2.0);
            else if constexpr (std::is_same_v<T, Ellipsoid>) return s.semi_axes.z;
            else return 0.0;
        },
        prim.shape);
}

constexpr double kRoot3 = 1.7320508075688772;

// Triangular (111) surface lattice with nearest-neighbour spacing 2a.
std::vector<Vec3> opal_layer(Vec3 base, double a, double L, int rings, double z) {
    std::vector<Vec3> out;
    const Vec3 a1{2 * a, 0, 0}, a2{a, a * kRoot3, 0};
    const double reach = std::min(L / 2.0 + a, rings * 2.0 * a + 1.0);
    for (int i = -2 * rings; i <= 2 * rings; ++i) {
        for (int j = -2 * rings; j <= 2 * rings; ++j) {
            Vec3 c = base + a1 * i + a2 * j;
            if (std::abs(c.x) <= reach && std::abs(c.y) <= reach &&
                std::hypot(c.x, c.y) <= rings * 2.0 * a + 1.0) {
                out.push_back({c.x, c.y, z});
            }
        }
    }
    return out;
}

void add_opal(DielectricScene& scene, const SceneParams& p, double plane_z, bool sphere_under_origin) {
    const double a = p.opal_sphere_radius;
    const double L = scene.domain_size;
    const double pocket = 2.0 * a / kRoot3; // sphere-centre distance from a pocket axis
    // Surface layer: lattice through the origin for the top site, or arranged so
    // three spheres surround the origin for interstitial sites.
    Vec3 base = sphere_under_origin ? Vec3{0, 0, 0} : Vec3{0, pocket, 0};
    Material poly{materials::n_polystyrene};
    for (const Vec3& c : opal_layer(base, a, L, p.opal_rings, plane_z))
        scene.primitives.push_back({Sphere{c, a}, poly});
    // fcc stacking: each deeper layer shifts into the hollows of the one above.
    const double dz = 2.0 * a * std::sqrt(2.0 / 3.0);
    for (int layer = 1; layer < p.opal_layers; ++layer) {
        Vec3 shifted = base + Vec3{a, a / kRoot3, 0} * layer;
        // Wrap back near the origin so the lattice window stays centred.
        if (layer % 3 == 0) shifted = base;
        for (const Vec3& c : opal_layer(shifted, a, L, p.opal_rings, plane_z - layer * dz))
            scene.primitives.push_back({Sphere{c, a}, poly});
    }
}

void check_tangency(const DielectricScene& scene, double expected_gap = 0.0) {
    if (scene.primitives.empty()) return;
    const double nd_depth = bottom_depth(scene.nanodiamond);
    const Vec3 nd_center{0, 0, 0};
    double min_gap = 1e30;
    for (const auto& prim : scene.primitives) {
        if (const auto* s = std::get_if<Sphere>(&prim.shape)) {
            const auto* nd = std::get_if<Sphere>(&scene.nanodiamond.shape);
            if (!nd) continue; // shape-study diamonds only rest on planes
            min_gap = std::min(min_gap, (nd_center - s->center).norm() - (s->radius + nd->radius));
        } else if (const auto* h = std::get_if<HalfSpace>(&prim.shape)) {
            min_gap = std::min(min_gap, nd_center.dot(h->normal) - h->offset - nd_depth);
        }
    }
    if (min_gap - expected_gap < -kTangencyTolerance)
        throw SceneError("nanodiamond overlaps the substrate by " +
                         std::to_string(expected_gap - min_gap) + " nm");
    if (min_gap - expected_gap > kTangencyTolerance)
        throw SceneError("nanodiamond is not tangent to the substrate (gap " + std::to_string(min_gap) + " nm)");
}

} // namespace

bool Primitive::contains(const Vec3& p) const { return std::visit(ContainsVisitor{p}, shape); }

double DielectricScene::permittivity_at(const Vec3& p) const {
    if (nanodiamond.contains(p)) return nanodiamond.material.permittivity();
    for (auto it = primitives.rbegin(); it != primitives.rend(); ++it)
        if (it->contains(p)) return it->material.permittivity();
    return background.permittivity();
}

std::optional<PresetId> preset_from_string(const std::string& name) {
    if (name == "coverslip") return PresetId::Coverslip;
    if (name == "opal-interstitial") return PresetId::OpalInterstitial;
    if (name == "opal-intermediate") return PresetId::OpalIntermediate;
    if (name == "opal-top") return PresetId::OpalTop;
    if (name == "isolated-sphere") return PresetId::IsolatedSphere;
    if (name == "homogeneous") return PresetId::Homogeneous;
    if (name == "shape-sphere") return PresetId::ShapeSphere;
    if (name == "shape-cube") return PresetId::ShapeCube;
    if (name == "shape-octahedron") return PresetId::ShapeOctahedron;
    if (name == "shape-ellipsoid") return PresetId::ShapeEllipsoid;
    return std::nullopt;
}

std::string to_string(PresetId id) {
    switch (id) {
        case PresetId::Coverslip: return "coverslip";
        case PresetId::OpalInterstitial: return "opal-interstitial";
        case PresetId::OpalIntermediate: return "opal-intermediate";
        case PresetId::OpalTop: return "opal-top";
        case PresetId::IsolatedSphere: return "isolated-sphere";
        case PresetId::Homogeneous: return "homogeneous";
        case PresetId::ShapeSphere: return "shape-sphere";
        case PresetId::ShapeCube: return "shape-cube";
        case PresetId::ShapeOctahedron: return "shape-octahedron";
        case PresetId::ShapeEllipsoid: return "shape-ellipsoid";
    }
    return "?";
}

double interstitial_height(double a, double D) {
    const double pocket = 2.0 * a / kRoot3;
    const double reach = a + D / 2.0;
    const double h2 = reach * reach - pocket * pocket;
    // inscribed within tolerance: the diamond sits exactly in the pocket
    if (h2 < 0.0 && pocket - reach <= kTangencyTolerance) return 0.0;
    if (h2 < 0.0)
        throw SceneError("nanodiamond too small for the interstitial pocket (D < " +
                         std::to_string(2.0 * (pocket - a)) + " nm)");
    return std::sqrt(h2);
}

DielectricScene build_scene(PresetId preset, const SceneParams& p) {
    if (p.opal_sphere_radius <= 0 || p.nanodiamond_diameter <= 0 || p.shape_size <= 0 ||
        p.ellipsoid_eta <= 0)
        throw SceneError("geometric parameters must be positive");

    DielectricScene scene;
    scene.background = {materials::n_air};
    const double rd = p.nanodiamond_diameter / 2.0;
    const Material diamond{materials::n_diamond};
    scene.nanodiamond = {Sphere{{0, 0, 0}, rd}, diamond};

    const bool opal = preset == PresetId::OpalInterstitial || preset == PresetId::OpalIntermediate ||
                      preset == PresetId::OpalTop;
    scene.domain_size = p.domain_size.value_or(opal ? 700.0 : 300.0);

    switch (preset) {
        case PresetId::Homogeneous:
            scene.background = diamond;
            break;
        case PresetId::IsolatedSphere:
            break;
        case PresetId::Coverslip:
            scene.primitives.push_back({HalfSpace{{0, 0, 1}, -rd}, Material{materials::n_glass}});
            break;
        case PresetId::OpalTop:
            add_opal(scene, p, -(p.opal_sphere_radius + rd), true);
            break;
        case PresetId::OpalInterstitial:
            add_opal(scene, p, -interstitial_height(p.opal_sphere_radius, p.nanodiamond_diameter), false);
            break;
        case PresetId::OpalIntermediate:
            // The rest position translated 20 nm along the surface normal.
            add_opal(scene, p,
                     -interstitial_height(p.opal_sphere_radius, p.nanodiamond_diameter) - 20.0, false);
            break;
        case PresetId::ShapeSphere:
        case PresetId::ShapeCube:
        case PresetId::ShapeOctahedron:
        case PresetId::ShapeEllipsoid: {
            const double s = p.shape_size;
            if (preset == PresetId::ShapeSphere)
                scene.nanodiamond = {Sphere{{0, 0, 0}, s / 2.0}, diamond};
            else if (preset == PresetId::ShapeCube)
                scene.nanodiamond = {Cube{{0, 0, 0}, s}, diamond};
            else if (preset == PresetId::ShapeOctahedron)
                scene.nanodiamond = {Octahedron{{0, 0, 0}, s}, diamond};
            else {
                const double a = s / 2.0, eta = p.ellipsoid_eta;
                scene.nanodiamond = {Ellipsoid{{0, 0, 0}, {a * eta, a * eta, a / (eta * eta)}}, diamond};
            }
            scene.primitives.push_back(
                {HalfSpace{{0, 0, 1}, -bottom_depth(scene.nanodiamond)}, Material{materials::n_glass}});
            break;
        }
    }

    if (preset != PresetId::Homogeneous && preset != PresetId::IsolatedSphere) {
        double expected_gap = 0.0;
        if (preset == PresetId::OpalIntermediate) {
            // Raising the diamond 20 nm vertically opens a smaller gap along
            // the line to the tilted pocket-sphere centres.
            const double h = interstitial_height(p.opal_sphere_radius, p.nanodiamond_diameter);
            const double pocket = 2.0 * p.opal_sphere_radius / kRoot3;
            expected_gap =
                std::hypot(pocket, h + 20.0) - (p.opal_sphere_radius + rd);
        }
        check_tangency(scene, expected_gap);
    }
    return scene;
}

double volume_fraction(const DielectricScene& scene, const Vec3& center, double cube_side) {
    const int n = std::max(32, static_cast<int>(std::ceil(cube_side / 4.0)));
    const double step = cube_side / n;
    long long hits = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Vec3 q = center + Vec3{(i + 0.5) * step, (j + 0.5) * step, (k + 0.5) * step} -
                         Vec3{cube_side, cube_side, cube_side} / 2.0;
                if (scene.nanodiamond.contains(q)) continue;
                for (auto it = scene.primitives.rbegin(); it != scene.primitives.rend(); ++it)
                    if (it->contains(q)) {
                        ++hits;
                        break;
                    }
            }
    return static_cast<double>(hits) / (static_cast<double>(n) * n * n);
}

std::string DielectricScene::to_json() const {
    nlohmann::json j;
    j["background_index"] = background.refractive_index;
    j["domain_size_nm"] = domain_size;
    auto dump = [](const Primitive& prim) {
        nlohmann::json e;
        e["index"] = prim.material.refractive_index;
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, HalfSpace>) {
                    e["shape"] = "half-space";
                    e["normal"] = {s.normal.x, s.normal.y, s.normal.z};
                    e["offset_nm"] = s.offset;
                } else if constexpr (std::is_same_v<T, Sphere>) {
                    e["shape"] = "sphere";
                    e["center_nm"] = {s.center.x, s.center.y, s.center.z};
                    e["radius_nm"] = s.radius;
                } else if constexpr (std::is_same_v<T, Cube>) {
                    e["shape"] = "cube";
                    e["center_nm"] = {s.center.x, s.center.y, s.center.z};
                    e["side_nm"] = s.side;
                } else if constexpr (std::is_same_v<T, Octahedron>) {
                    e["shape"] = "octahedron";
                    e["center_nm"] = {s.center.x, s.center.y, s.center.z};
                    e["side_nm"] = s.side;
                } else {
                    e["shape"] = "ellipsoid";
                    e["center_nm"] = {s.center.x, s.center.y, s.center.z};
                    e["semi_axes_nm"] = {s.semi_axes.x, s.semi_axes.y, s.semi_axes.z};
                }
            },
            prim.shape);
        return e;
    };
    j["nanodiamond"] = dump(nanodiamond);
    nlohmann::json prims = nlohmann::json::array();
    for (const auto& prim : primitives) prims.push_back(dump(prim));
    j["primitives"] = prims;
    return j.dump(2);
}

} // namespace nvsim
