#pragma once

#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "nvsim/config.hpp"
#include "nvsim/ensemble.hpp"

namespace nvsim {

class CampaignError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.1.0";

struct CampaignResult {
    LifetimeDistribution dist; // relative rates, one per successful sample
    int computed = 0;          // solved this run
    int cached = 0;            // reused from the cache
    int failed = 0;
    double wall_seconds = 0.0;
    std::uint64_t config_hash = 0;
    std::string cache_path;    // <cache_dir>/<hash hex>
    std::string manifest_path;
};

// Runs (or resumes) an N-sample FDTD ensemble for the configured preset.
// Per-sample results live at <cache_dir>/<hash>/sample_<i>.json, written
// atomically; reruns recompute only missing samples. Throws if more than 5%
// of samples fail.
CampaignResult run_campaign(const ScenarioConfig& cfg, std::ostream* log = nullptr);

// Memoized scalar for expensive cross-validation sweeps (oracle vs solver
// points). Keyed by a descriptive string; stored under <cache_dir>/singles/.
double cached_value(const std::string& cache_dir, const std::string& key,
                    const std::function<double()>& compute);

} // namespace nvsim
