#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace nvsim {

class AnalysisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ---- three-level photon-correlation model ----

struct G2Params {
    double a = 0.0;    // bunching amplitude, >= 0
    double tau1 = 10.0; // antibunching time, ns
    double tau2 = 100.0; // bunching time, ns
    double contrast = 0.0; // background contrast c in [0, 1]
};

// g2(tau) = 1 - (1+a) exp(-|tau|/tau1) + a exp(-|tau|/tau2), mixed towards 1
// by the background contrast: value -> c + (1-c) * model.
double g2_model(double tau_ns, const G2Params& p);

struct G2Trace {
    std::vector<double> tau_ns;
    std::vector<double> g2;
};

struct G2Fit {
    G2Params params;
    double rms_residual = 0.0;
    bool dip_below_half = false; // single-emitter criterion: dip depth > 50%
    int iterations = 0;
};

G2Fit fit_g2(const G2Trace& trace, const G2Params& initial = {0.5, 10.0, 100.0, 0.0});

// ---- zero-power lifetime extrapolation ----

struct PowerPoint {
    double power = 0.0;       // arbitrary units, > 0
    double decay_time_ns = 0.0;
    double sigma_ns = 1.0;    // uncertainty
};

struct Extrapolation {
    double lifetime_ns = 0.0; // intercept at zero power
    double sigma_ns = 0.0;
    double slope = 0.0;
};

// Weighted linear fit of decay time vs power; intercept is the lifetime.
Extrapolation extrapolate_zero_power(const std::vector<PowerPoint>& series);

// ---- two-sample Kolmogorov-Smirnov ----

struct KsResult {
    double d = 0.0;
    double p_value = 1.0;
};

// Asymptotic Kolmogorov distribution with the standard effective-size
// correction.
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

// Exact permutation p-value (all C(n+m,n) splits); oracle for n, m <= 12.
double ks_exact_permutation_p(std::vector<double> x, std::vector<double> y);

// ---- damped Gauss-Newton least squares (numerical Jacobian) ----

struct LeastSquaresResult {
    std::vector<double> params;
    double rms = 0.0;
    int iterations = 0;
    bool converged = false;
};

LeastSquaresResult fit_least_squares(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> initial, int max_iterations = 200);

} // namespace nvsim
