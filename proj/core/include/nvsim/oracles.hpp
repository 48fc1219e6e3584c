#pragma once

#include <stdexcept>
#include <vector>

#include "nvsim/ensemble.hpp"

namespace nvsim {

class OracleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Emission rate in a homogeneous medium relative to free space: Gamma = n * Gamma0.
double homogeneous_rate(double n);

// Quasistatic limit for a dipole in a small dielectric sphere (index n, vacuum
// outside), relative to the bulk interior rate: (1/n) * (3/(n^2+2))^2.
// The Lorentz-Lorenz local-field factor squared over the bulk index.
double small_sphere_ratio(double n);

enum class SphereOrientation { Radial, Tangential };

struct SphereQuery {
    double radius_nm = 27.0;        // a
    double n_inside = 2.4;
    double n_outside = 1.0;
    double dipole_offset_nm = 0.0;  // r, 0 <= r < a
    SphereOrientation orientation = SphereOrientation::Radial;
    double lambda_nm = 680.0;
};

// Multipole-series rate for a dipole inside a dielectric sphere, relative to
// the unbounded interior medium. Adaptive truncation (relative term < 1e-8,
// order cap 60).
double chew_rate(const SphereQuery& q);

enum class InterfaceOrientation { Parallel, Perpendicular };

struct InterfaceQuery {
    double z_nm = 0.0;   // dipole height above the interface
    double n_upper = 1.0; // dipole side
    double n_lower = 1.45;
    InterfaceOrientation orientation = InterfaceOrientation::Parallel;
    double lambda_nm = 680.0;
};

// Plane-wave-spectrum rate for a dipole above a dielectric half-space,
// relative to the unbounded upper medium (propagating plus evanescent branch).
double interface_rate(const InterfaceQuery& q);

struct NaiveModelParams {
    double surround_fraction = 0.5; // f_s
    double n_surround = 1.45;
    double n_diamond = 2.4;
    double tau_bulk_ns = 11.6;
};

// Volume-fraction index-averaging lifetime estimate:
// tau = n_d * tau_b / ((1 - f) + n_s * f).
double naive_lifetime(const NaiveModelParams& p);

// Point-dipole-above-plane stand-in for the sphere-on-coverslip system: bulk
// rate reduced by the small-sphere factor, times the interface factor at the
// sample's height, with cos^2/sin^2 orientation weighting.
std::vector<double> composite_coverslip_model(const std::vector<DipoleSample>& samples,
                                              double nanodiamond_diameter_nm = 54.0,
                                              double n_substrate = 1.45, double lambda_nm = 680.0);

} // namespace nvsim
