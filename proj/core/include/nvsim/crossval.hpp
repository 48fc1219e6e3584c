#pragma once

#include <string>
#include <vector>

#include "nvsim/fdtd.hpp"

namespace nvsim {

// Solver-vs-oracle comparison points. All results are memoized under
// <cache_dir>/singles so repeated invocations (CLI, tests) reuse them.

struct SphereCheckPoint {
    double size_parameter; // 2a / lambda
    double fdtd_radial, fdtd_tangential;     // relative to bulk diamond
    double oracle_radial, oracle_tangential; // multipole series, same normalization
};

// Dipole displaced to 0.6a inside an isolated diamond sphere in vacuum.
std::vector<SphereCheckPoint> sphere_cross_check(const std::vector<double>& size_parameters,
                                                 const std::string& cache_dir,
                                                 const SolverConfig& cfg);

struct InterfaceCheckPoint {
    double z_nm;
    double n_lower;
    double fdtd_parallel, fdtd_perpendicular;     // relative to vacuum
    double oracle_parallel, oracle_perpendicular; // plane-wave-spectrum integral
};

// Dipole in air at height z above a half-space of index n_lower.
std::vector<InterfaceCheckPoint> interface_cross_check(const std::vector<double>& heights_nm,
                                                       const std::vector<double>& n_lower_values,
                                                       const std::string& cache_dir,
                                                       const SolverConfig& cfg,
                                                       double domain_nm = 800.0);

// Power ratio of identical sources in uniform diamond vs uniform vacuum.
double homogeneous_ratio_check(const std::string& cache_dir, const SolverConfig& cfg,
                               double domain_nm = 300.0);

} // namespace nvsim
