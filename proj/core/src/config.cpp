#include "nvsim/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace nvsim {

std::string to_string(ExtrapolationModel m) {
    return m == ExtrapolationModel::Linear ? "linear" : "saturating";
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Setter {
    std::function<void(ScenarioConfig&, const std::string&, int, int)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

[[noreturn]] void fail(const std::string& msg, int line, int col) {
    throw ConfigError(msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ")");
}

double parse_double(const std::string& v, int line, int col) {
    double out;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
        fail("expected a number, got '" + v + "'", line, col);
    return out;
}

long long parse_int(const std::string& v, int line, int col) {
    long long out;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
        fail("expected an integer, got '" + v + "'", line, col);
    return out;
}

std::uint64_t parse_u64(const std::string& v, int line, int col) {
    std::uint64_t out;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
        fail("expected an unsigned integer, got '" + v + "'", line, col);
    return out;
}

const std::map<std::string, Setter>& schema() {
    static const std::map<std::string, Setter> s = [] {
        std::map<std::string, Setter> m;
        auto dbl = [&m](const std::string& key, double ScenarioConfig::*field) {
            m[key] = {[field](ScenarioConfig& c, const std::string& v, int ln, int col) {
                          c.*field = parse_double(v, ln, col);
                      },
                      [field](const ScenarioConfig& c) { return fmt(c.*field); }};
        };
        auto intf = [&m](const std::string& key, int ScenarioConfig::*field) {
            m[key] = {[field](ScenarioConfig& c, const std::string& v, int ln, int col) {
                          const long long x = parse_int(v, ln, col);
                          if (x < -(1LL << 31) || x > (1LL << 31)) fail("integer out of range", ln, col);
                          c.*field = static_cast<int>(x);
                      },
                      [field](const ScenarioConfig& c) { return std::to_string(c.*field); }};
        };
        auto str = [&m](const std::string& key, std::string ScenarioConfig::*field) {
            m[key] = {[field](ScenarioConfig& c, const std::string& v, int, int) { c.*field = v; },
                      [field](const ScenarioConfig& c) { return c.*field; }};
        };
        m["preset"] = {[](ScenarioConfig& c, const std::string& v, int ln, int col) {
                           const auto p = preset_from_string(v);
                           if (!p) fail("unknown preset '" + v + "'", ln, col);
                           c.preset = *p;
                       },
                       [](const ScenarioConfig& c) { return to_string(c.preset); }};
        dbl("opal_sphere_radius_nm", &ScenarioConfig::opal_sphere_radius_nm);
        dbl("nanodiamond_diameter_nm", &ScenarioConfig::nanodiamond_diameter_nm);
        dbl("shape_size_nm", &ScenarioConfig::shape_size_nm);
        dbl("ellipsoid_eta", &ScenarioConfig::ellipsoid_eta);
        intf("opal_rings", &ScenarioConfig::opal_rings);
        intf("opal_layers", &ScenarioConfig::opal_layers);
        dbl("domain_size_nm", &ScenarioConfig::domain_size_nm);
        dbl("dx_nm", &ScenarioConfig::dx_nm);
        dbl("courant", &ScenarioConfig::courant);
        intf("pml_cells", &ScenarioConfig::pml_cells);
        intf("warmup_cycles", &ScenarioConfig::warmup_cycles);
        intf("measure_cycles", &ScenarioConfig::measure_cycles);
        intf("max_cycles", &ScenarioConfig::max_cycles);
        dbl("lambda_nm", &ScenarioConfig::lambda_nm);
        dbl("convergence_tol", &ScenarioConfig::convergence_tol);
        intf("samples", &ScenarioConfig::samples);
        m["seed"] = {[](ScenarioConfig& c, const std::string& v, int ln, int col) {
                         c.seed = parse_u64(v, ln, col);
                     },
                     [](const ScenarioConfig& c) { return std::to_string(c.seed); }};
        dbl("weight_top", &ScenarioConfig::weight_top);
        dbl("weight_interstitial", &ScenarioConfig::weight_interstitial);
        dbl("weight_intermediate", &ScenarioConfig::weight_intermediate);
        dbl("rescale_target_ns", &ScenarioConfig::rescale_target_ns);
        dbl("tau_bulk_ns", &ScenarioConfig::tau_bulk_ns);
        m["extrapolation"] = {[](ScenarioConfig& c, const std::string& v, int ln, int col) {
                                  if (v == "linear") c.extrapolation = ExtrapolationModel::Linear;
                                  else if (v == "saturating")
                                      c.extrapolation = ExtrapolationModel::Saturating;
                                  else
                                      fail("extrapolation must be 'linear' or 'saturating'", ln, col);
                              },
                              [](const ScenarioConfig& c) { return to_string(c.extrapolation); }};
        str("output_dir", &ScenarioConfig::output_dir);
        str("cache_dir", &ScenarioConfig::cache_dir);
        return m;
    }();
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

SiteWeights ScenarioConfig::site_weights() const {
    return {weight_top, weight_interstitial, weight_intermediate};
}

void ScenarioConfig::validate() const {
    solver_config().validate();
    if (samples < 1) throw ConfigError("samples must be >= 1");
    if (nanodiamond_diameter_nm <= 10.0)
        throw ConfigError("nanodiamond diameter must exceed 10 nm (5 nm surface shell both sides)");
    if (opal_sphere_radius_nm <= 0.0 || shape_size_nm <= 0.0)
        throw ConfigError("geometry lengths must be positive");
    if (ellipsoid_eta <= 0.0) throw ConfigError("ellipsoid aspect ratio must be positive");
    if (opal_rings < 1 || opal_layers < 1) throw ConfigError("opal_rings and opal_layers must be >= 1");
    if (domain_size_nm < 0.0) throw ConfigError("domain_size_nm must be >= 0 (0 = preset default)");
    if (weight_interstitial < 0.0 || weight_intermediate < 0.0 || weight_top < 0.0)
        throw ConfigError("site weights must be non-negative");
    const double wsum = weight_interstitial + weight_intermediate + weight_top;
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ConfigError("site weights must sum to 1, got " + fmt(wsum));
    if (rescale_target_ns <= 0.0 || tau_bulk_ns <= 0.0)
        throw ConfigError("lifetimes must be positive");
}

SceneParams ScenarioConfig::scene_params() const {
    SceneParams p;
    p.opal_sphere_radius = opal_sphere_radius_nm;
    p.nanodiamond_diameter = nanodiamond_diameter_nm;
    p.shape_size = shape_size_nm;
    p.ellipsoid_eta = ellipsoid_eta;
    p.opal_rings = opal_rings;
    p.opal_layers = opal_layers;
    if (domain_size_nm > 0.0) p.domain_size = domain_size_nm;
    return p;
}

SolverConfig ScenarioConfig::solver_config() const {
    SolverConfig s;
    s.dx_nm = dx_nm;
    s.courant = courant;
    s.pml_cells = pml_cells;
    s.warmup_cycles = warmup_cycles;
    s.measure_cycles = measure_cycles;
    s.max_cycles = max_cycles;
    s.lambda_nm = lambda_nm;
    s.convergence_tol = convergence_tol;
    return s;
}

std::string ScenarioConfig::serialize() const {
    std::ostringstream out;
    for (const auto& [key, setter] : schema()) out << key << " = " << setter.get(*this) << "\n";
    return out.str();
}

std::string ScenarioConfig::canonical_text() const {
    std::ostringstream out;
    for (const auto& [key, setter] : schema()) {
        if (key == "output_dir" || key == "cache_dir") continue;
        out << key << "=" << setter.get(*this) << "\n";
    }
    return out.str();
}

std::uint64_t ScenarioConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical_text()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash_pos = line.find('#'); hash_pos != std::string::npos)
            line = line.substr(0, hash_pos);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail("expected 'key = value'", line_no, static_cast<int>(trim(line).size()));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const int key_col = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
        if (key.empty()) fail("missing key before '='", line_no, 1);
        const auto it = schema().find(key);
        if (it == schema().end()) fail("unknown key '" + key + "'", line_no, key_col);
        const int val_col = static_cast<int>(eq) + 2;
        it->second.set(cfg, value, line_no, val_col);
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace nvsim
