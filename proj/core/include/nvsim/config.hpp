#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "nvsim/ensemble.hpp"
#include "nvsim/fdtd.hpp"
#include "nvsim/scene.hpp"

namespace nvsim {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ExtrapolationModel { Linear, Saturating };

// Everything a campaign needs, parsed from flat key=value text. Unknown keys
// are hard errors; every key has a default so an empty file is a valid config.
struct ScenarioConfig {
    PresetId preset = PresetId::Coverslip;

    // geometry (nm)
    double opal_sphere_radius_nm = 160.0;
    double nanodiamond_diameter_nm = 54.0;
    double shape_size_nm = 60.0;
    double ellipsoid_eta = 1.2;
    int opal_rings = 3;
    int opal_layers = 2;
    double domain_size_nm = 0.0; // 0 = preset default

    // solver
    double dx_nm = 5.0;
    double courant = 0.5;
    int pml_cells = 10;
    int warmup_cycles = 10;
    int measure_cycles = 5;
    int max_cycles = 40;
    double lambda_nm = 680.0;
    double convergence_tol = 1e-3;

    // ensemble
    int samples = 100;
    std::uint64_t seed = 1;
    double weight_top = 0.10;
    double weight_interstitial = 0.65;
    double weight_intermediate = 0.25;
    double rescale_target_ns = 25.4;
    double tau_bulk_ns = 11.6;

    ExtrapolationModel extrapolation = ExtrapolationModel::Linear;

    // plumbing, excluded from the canonical form and hash
    std::string output_dir = "out";
    std::string cache_dir = "cache";

    bool operator==(const ScenarioConfig&) const = default;

    void validate() const;
    SceneParams scene_params() const;
    SolverConfig solver_config() const;
    SiteWeights site_weights() const;

    // Full round-trippable form (all keys, sorted).
    std::string serialize() const;
    // Physics keys only, fixed order and formatting; its FNV-1a hash keys the
    // per-sample cache.
    std::string canonical_text() const;
    std::uint64_t hash() const;
};

// Parses key=value lines ('#' comments, blank lines allowed). Errors carry
// line and column. Unknown keys are rejected.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

std::string to_string(ExtrapolationModel m);

} // namespace nvsim
