#include "nvsim/crossval.hpp"

#include <cmath>
#include <cstdio>

#include "nvsim/campaign.hpp"
#include "nvsim/oracles.hpp"
#include "nvsim/voxelize.hpp"

namespace nvsim {

namespace {

std::string point_key(const char* what, const SolverConfig& cfg, double domain_nm, double p1,
                      double p2, const char* orient) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s p1=%.9g p2=%.9g orient=%s dx=%.9g S=%.9g pml=%d L=%.9g lambda=%.9g",
                  what, p1, p2, orient, cfg.dx_nm, cfg.courant, cfg.pml_cells, domain_nm,
                  cfg.lambda_nm);
    return buf;
}

} // namespace

std::vector<SphereCheckPoint> sphere_cross_check(const std::vector<double>& size_parameters,
                                                 const std::string& cache_dir,
                                                 const SolverConfig& cfg) {
    std::vector<SphereCheckPoint> out;
    for (double sp : size_parameters) {
        const double diameter = sp * cfg.lambda_nm;
        const double a = diameter / 2.0;
        SphereCheckPoint pt{};
        pt.size_parameter = sp;
        pt.oracle_radial = chew_rate(
            {a, materials::n_diamond, 1.0, 0.6 * a, SphereOrientation::Radial, cfg.lambda_nm});
        pt.oracle_tangential = chew_rate(
            {a, materials::n_diamond, 1.0, 0.6 * a, SphereOrientation::Tangential, cfg.lambda_nm});
        SceneParams params;
        params.nanodiamond_diameter = diameter;
        const DielectricScene scene = build_scene(PresetId::IsolatedSphere, params);
        auto run = [&](const Vec3& ori) {
            return relative_rate(scene, {{0.0, 0.0, 0.6 * a}, ori}, cfg).relative_rate;
        };
        pt.fdtd_radial = cached_value(cache_dir,
                                      point_key("sphere06a", cfg, scene.domain_size, sp, 0, "radial"),
                                      [&] { return run({0, 0, 1}); });
        pt.fdtd_tangential =
            cached_value(cache_dir, point_key("sphere06a", cfg, scene.domain_size, sp, 0, "tangential"),
                         [&] { return run({1, 0, 0}); });
        out.push_back(pt);
    }
    return out;
}

std::vector<InterfaceCheckPoint> interface_cross_check(const std::vector<double>& heights_nm,
                                                       const std::vector<double>& n_lower_values,
                                                       const std::string& cache_dir,
                                                       const SolverConfig& cfg, double domain_nm) {
    std::vector<InterfaceCheckPoint> out;
    const double plane_z = -0.45 * domain_nm; // interface near the bottom of the box
    for (double nl : n_lower_values)
        for (double z : heights_nm) {
            InterfaceCheckPoint pt{};
            pt.z_nm = z;
            pt.n_lower = nl;
            pt.oracle_parallel =
                interface_rate({z, 1.0, nl, InterfaceOrientation::Parallel, cfg.lambda_nm});
            pt.oracle_perpendicular =
                interface_rate({z, 1.0, nl, InterfaceOrientation::Perpendicular, cfg.lambda_nm});

            DielectricScene scene;
            scene.background = {materials::n_air};
            scene.domain_size = domain_nm;
            scene.primitives.push_back({HalfSpace{{0, 0, 1}, plane_z}, Material{nl}});
            // token emitter host; air, so it does not disturb the field
            scene.nanodiamond = {Sphere{{0, 0, plane_z + z}, 0.5}, Material{materials::n_air}};
            // The vacuum reference only depends on the source's sub-cell
            // alignment, so one small-box run per orientation and residue
            // serves every height.
            const double src_z = plane_z + z;
            const double residue = src_z - cfg.dx_nm * std::floor(src_z / cfg.dx_nm);
            auto run = [&](const Vec3& ori, const char* orient) {
                const double p_scene =
                    radiated_power(voxelize(scene, cfg.dx_nm), {{0.0, 0.0, src_z}, ori}, cfg).p_flux;
                const double p_vac = cached_value(
                    cache_dir, point_key("vacuum reference", cfg, 300.0, residue, ori.z, orient),
                    [&] {
                        const int dims = static_cast<int>(std::lround(300.0 / cfg.dx_nm));
                        return radiated_power(VoxelGrid::uniform(dims, cfg.dx_nm, 1.0),
                                              {{0.0, 0.0, residue}, ori}, cfg)
                            .p_flux;
                    });
                return p_scene / p_vac;
            };
            pt.fdtd_parallel =
                cached_value(cache_dir, point_key("interface", cfg, domain_nm, nl, z, "parallel"),
                             [&] { return run({1, 0, 0}, "parallel"); });
            pt.fdtd_perpendicular =
                cached_value(cache_dir, point_key("interface", cfg, domain_nm, nl, z, "perpendicular"),
                             [&] { return run({0, 0, 1}, "perpendicular"); });
            out.push_back(pt);
        }
    return out;
}

double homogeneous_ratio_check(const std::string& cache_dir, const SolverConfig& cfg,
                               double domain_nm) {
    return cached_value(cache_dir, point_key("homogeneous", cfg, domain_nm, 0, 0, "z"), [&] {
        const int dims = static_cast<int>(std::lround(domain_nm / cfg.dx_nm));
        const VoxelGrid dia = VoxelGrid::uniform(dims, cfg.dx_nm, 5.76);
        const VoxelGrid vac = VoxelGrid::uniform(dims, cfg.dx_nm, 1.0);
        const DipoleSource src{{0, 0, 0}, {0, 0, 1}};
        return radiated_power(dia, src, cfg).p_flux / radiated_power(vac, src, cfg).p_flux;
    });
}

} // namespace nvsim
