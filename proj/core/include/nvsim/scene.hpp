#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nvsim/vec3.hpp"

namespace nvsim {

// All lengths are in nanometres throughout.

struct Material {
    double refractive_index = 1.0;

    double permittivity() const { return refractive_index * refractive_index; }
};

namespace materials {
inline constexpr double n_diamond = 2.4;
inline constexpr double n_glass = 1.45;
inline constexpr double n_polystyrene = 1.59;
inline constexpr double n_air = 1.0;
} // namespace materials

// Shapes. The octahedron rests on a vertex (vertices on the coordinate axes);
// the oblate ellipsoid has semi-axes (a*eta, a*eta, a/eta^2), short axis vertical.
struct HalfSpace {
    Vec3 normal;   // unit, points away from the filled side
    double offset; // filled region: r . normal <= offset
};
struct Sphere {
    Vec3 center;
    double radius;
};
struct Cube {
    Vec3 center;
    double side;
};
struct Octahedron {
    Vec3 center;
    double side; // edge length; vertex distance side/sqrt(2)
};
struct Ellipsoid {
    Vec3 center;
    Vec3 semi_axes;
};

struct Primitive {
    std::variant<HalfSpace, Sphere, Cube, Octahedron, Ellipsoid> shape;
    Material material;

    bool contains(const Vec3& p) const;
    // Signed distance from the nanodiamond surface is only needed for spheres
    // and half-spaces (the tangency check); exact for those, conservative otherwise.
};

enum class PresetId {
    Coverslip,
    OpalInterstitial,
    OpalIntermediate,
    OpalTop,
    IsolatedSphere,
    Homogeneous,
    ShapeSphere,
    ShapeCube,
    ShapeOctahedron,
    ShapeEllipsoid,
};

std::optional<PresetId> preset_from_string(const std::string& name);
std::string to_string(PresetId id);

struct SceneParams {
    double opal_sphere_radius = 160.0; // a
    double nanodiamond_diameter = 54.0; // D
    double shape_size = 60.0;           // side / diameter for shape-study presets
    double ellipsoid_eta = 1.2;
    int opal_rings = 3;   // lattice extent: include spheres within this many rings
    int opal_layers = 2;  // surface (111) layer plus layers beneath
    std::optional<double> domain_size; // override; defaults per preset
};

struct DielectricScene {
    Material background;
    std::vector<Primitive> primitives; // substrate; later entries override earlier
    Primitive nanodiamond;             // emitter host, centred at the origin
    double domain_size = 300.0;        // cube side, centred at the origin

    // Permittivity at a point; the nanodiamond takes precedence, then the
    // primitive list back-to-front, then background.
    double permittivity_at(const Vec3& p) const;

    std::string to_json() const;
};

class SceneError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Tangency tolerance between the nanodiamond and substrate primitives (nm).
inline constexpr double kTangencyTolerance = 0.5;

DielectricScene build_scene(PresetId preset, const SceneParams& params = {});

// Interstitial rest height above the sphere-centre plane; negative radicand
// means the diamond sinks below the plane (inscribed case gives 0).
double interstitial_height(double a, double D);

// Fraction of a cube (side cube_side, centred at `center`) occupied by
// substrate material (non-background, non-diamond), integrated by midpoint
// subdivision to about +-0.01. Outside the domain the background continues.
double volume_fraction(const DielectricScene& scene, const Vec3& center, double cube_side);

} // namespace nvsim
