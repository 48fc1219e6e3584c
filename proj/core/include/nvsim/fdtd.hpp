#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nvsim/scene.hpp"
#include "nvsim/vec3.hpp"
#include "nvsim/voxelize.hpp"

namespace nvsim {

class FdtdError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    double dx_nm = 5.0;
    double courant = 0.5;        // S; 3D stability needs S <= 1/sqrt(3)
    int pml_cells = 10;          // per face, >= 8
    int warmup_cycles = 10;
    int measure_cycles = 5;
    int max_cycles = 40;         // hard cap before reporting non-convergence
    double lambda_nm = 680.0;
    double convergence_tol = 1e-3; // successive cycle-power relative change
    long long cell_budget = 64'000'000;
    std::string cycle_csv_path;  // when set, per-cycle (cycle, P_flux, P_work) dump

    void validate() const;
};

struct DipoleSource {
    Vec3 position_nm;  // continuous, not grid-snapped
    Vec3 orientation;  // unit
    double amplitude = 1.0;
};

struct PowerResult {
    double p_flux = 0.0;
    double p_work = 0.0;
    int cycles_run = 0;
    bool converged = false;
    double lambda_effective_nm = 0.0; // after rounding the period to whole steps
};

// Time-steps Maxwell's equations to CW steady state and returns the radiated
// power measured by the Poynting-box flux and by the source work.
PowerResult radiated_power(const VoxelGrid& grid, const DipoleSource& src, const SolverConfig& cfg);

struct SimulationResult {
    double p_flux = 0.0;
    double p_work = 0.0;
    double p_bulk_flux = 0.0;
    double p_bulk_work = 0.0;
    double relative_rate = 0.0; // P_flux / P_bulk_flux (flux is authoritative)
    bool converged = false;
    int cycles_run = 0;
};

// Structure run plus a bulk reference run (uniform diamond, same grid dims,
// same source) on a prebuilt grid pair; the scene overload voxelizes both.
SimulationResult relative_rate(const VoxelGrid& scene_grid, const VoxelGrid& bulk_grid,
                               const DipoleSource& src, const SolverConfig& cfg);
SimulationResult relative_rate(const DielectricScene& scene, const DipoleSource& src,
                               const SolverConfig& cfg);

struct ConvergenceRow {
    double dx_nm;
    double rate;
    double rel_change_vs_prev; // |R - R_prev| / R, NaN for the first row
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    bool monotone = true;
};

ConvergenceTable convergence_probe(const DielectricScene& scene, const DipoleSource& src,
                                   const std::vector<double>& dx_list, SolverConfig cfg);

} // namespace nvsim
