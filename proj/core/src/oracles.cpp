#include "nvsim/oracles.hpp"

#include "nvsim/scene.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace nvsim {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Spherical Bessel j_0..j_nmax. Downward (Miller) recurrence when the order
// exceeds the argument, upward otherwise.
std::vector<double> sph_jn(int nmax, double x) {
    std::vector<double> j(nmax + 1, 0.0);
    if (x < 1e-10) {
        j[0] = 1.0;
        double df = 1.0; // (2n+1)!!
        for (int n = 1; n <= nmax; ++n) {
            df *= 2 * n + 1;
            j[n] = std::pow(x, n) / df;
        }
        return j;
    }
    j[0] = std::sin(x) / x;
    if (nmax == 0) return j;
    if (x > nmax) {
        j[1] = std::sin(x) / (x * x) - std::cos(x) / x;
        for (int n = 2; n <= nmax; ++n) j[n] = (2 * n - 1) / x * j[n - 1] - j[n - 2];
        return j;
    }
    const int start = nmax + 16 + static_cast<int>(x);
    double jp = 0.0, jc = 1e-30;
    for (int n = start; n >= 0; --n) {
        double jm = (2 * n + 3) / x * jc - jp;
        jp = jc;
        jc = jm;
        if (n <= nmax) j[n] = jc;
        if (std::abs(jc) > 1e250) { // rescale to avoid overflow
            for (int m = n; m <= nmax; ++m) j[m] *= 1e-250;
            jp *= 1e-250;
            jc *= 1e-250;
        }
    }
    const double scale = (std::sin(x) / x) / j[0];
    for (double& v : j) v *= scale;
    return j;
}

std::vector<double> sph_yn(int nmax, double x) {
    std::vector<double> y(nmax + 1, 0.0);
    y[0] = -std::cos(x) / x;
    if (nmax >= 1) y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
    for (int n = 2; n <= nmax; ++n) y[n] = (2 * n - 1) / x * y[n - 1] - y[n - 2];
    return y;
}

// Channel power-transmission factors through the sphere boundary, from the
// Riccati-Bessel matching of interior outgoing waves to exterior radiation.
struct ChannelFactors {
    double tm, te;
};

ChannelFactors transmission(int n, double n1, double n2, double x1, double x2,
                            const std::vector<double>& j1, const std::vector<double>& j2,
                            const std::vector<double>& y2) {
    // psi(x) = x j(x); xi(x) = x h1(x); f'(x) denotes d/dx of the Riccati form.
    const double psi1 = x1 * j1[n];
    const double dpsi1 = x1 * j1[n - 1] - n * j1[n];
    const cplx h2{j2[n], y2[n]}, h2m{j2[n - 1], y2[n - 1]};
    const cplx xi2 = x2 * h2;
    const cplx dxi2 = x2 * h2m - static_cast<double>(n) * h2;
    const cplx dtm = n1 * psi1 * dxi2 - n2 * xi2 * dpsi1;
    const cplx dte = n1 * dpsi1 * xi2 - n2 * psi1 * dxi2;
    return {n1 * n2 / std::norm(dtm), n2 * n2 * n2 / (n1 * std::norm(dte))};
}

// Composite Gauss-Legendre (8-point per panel).
double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
    static const double xg[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double wg[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    double sum = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        for (int g = 0; g < 4; ++g)
            sum += wg[g] * (f(c + 0.5 * h * xg[g]) + f(c - 0.5 * h * xg[g]));
    }
    return sum * 0.5 * h;
}

double integrate_checked(const std::function<double(double)>& f, double a, double b, int panels,
                         const char* what) {
    const double coarse = integrate(f, a, b, panels);
    const double fine = integrate(f, a, b, 2 * panels);
    if (std::abs(fine - coarse) > 1e-6 * (1.0 + std::abs(fine)))
        throw OracleError(std::string("quadrature not converged: ") + what);
    return fine;
}

} // namespace

double homogeneous_rate(double n) {
    if (n < 1.0) throw OracleError("refractive index must be >= 1");
    return n;
}

double small_sphere_ratio(double n) {
    if (n <= 0.0) throw OracleError("refractive index must be positive");
    const double lorentz = 3.0 / (n * n + 2.0);
    return lorentz * lorentz / n;
}

double chew_rate(const SphereQuery& q) {
    if (q.dipole_offset_nm < 0.0 || q.dipole_offset_nm >= q.radius_nm)
        throw OracleError("dipole offset must satisfy 0 <= r < a");
    const double k0 = 2.0 * kPi / q.lambda_nm;
    const double n1 = q.n_inside, n2 = q.n_outside;
    const double x1 = n1 * k0 * q.radius_nm;
    const double x2 = n2 * k0 * q.radius_nm;
    const double rho = n1 * k0 * q.dipole_offset_nm;

    constexpr int kMaxOrder = 60;
    constexpr double kRelTol = 1e-8;
    const auto j1v = sph_jn(kMaxOrder + 1, x1);
    const auto j2v = sph_jn(kMaxOrder + 1, x2);
    const auto y2v = sph_yn(kMaxOrder + 1, x2);
    const auto jrv = sph_jn(kMaxOrder + 1, rho);

    double sum = 0.0, term = 0.0;
    for (int n = 1; n <= kMaxOrder; ++n) {
        const auto t = transmission(n, n1, n2, x1, x2, j1v, j2v, y2v);
        // j_n(rho)/rho and psi'_n(rho)/rho have finite centre limits.
        double j_over, dpsi_over, jn;
        if (rho < 1e-9) {
            j_over = n == 1 ? 1.0 / 3.0 : 0.0;
            dpsi_over = n == 1 ? 2.0 / 3.0 : 0.0;
            jn = 0.0;
        } else {
            j_over = jrv[n] / rho;
            dpsi_over = (rho * jrv[n - 1] - n * jrv[n]) / rho;
            jn = jrv[n];
        }
        if (q.orientation == SphereOrientation::Radial)
            term = 1.5 * n * (n + 1.0) * (2 * n + 1.0) * j_over * j_over * t.tm;
        else
            term = 0.75 * (2 * n + 1.0) * (dpsi_over * dpsi_over * t.tm + jn * jn * t.te);
        sum += term;
        if (n >= 4 && std::abs(term) < kRelTol * std::abs(sum)) return sum;
    }
    if (std::abs(term) > 1e-6 * std::abs(sum))
        throw OracleError("multipole series not converged at order 60; last term " +
                          std::to_string(term));
    return sum;
}

double interface_rate(const InterfaceQuery& q) {
    if (q.z_nm < 0.0) throw OracleError("dipole height must be >= 0");
    if (q.n_upper < 1.0 || q.n_lower < 1.0) throw OracleError("indices must be >= 1");
    if (q.n_upper == q.n_lower) return 1.0;

    const double n = q.n_lower / q.n_upper;
    const double k1z = 2.0 * kPi * q.n_upper / q.lambda_nm * q.z_nm;

    auto rs = [&](cplx sz, cplx s2z) { return (sz - s2z) / (sz + s2z); };
    auto rp = [&](cplx sz, cplx s2z) { return (n * n * sz - s2z) / (n * n * sz + s2z); };
    auto s2z_of = [&](double s) { return std::sqrt(cplx(n * n - s * s, 0.0)); }; // Im >= 0 branch

    const bool perp = q.orientation == InterfaceOrientation::Perpendicular;

    // Propagating branch, s = sin(theta): the 1/s_z weight cancels.
    auto f_prop = [&](double th) {
        const double s = std::sin(th), sz = std::cos(th);
        const cplx s2z = s2z_of(s);
        const cplx phase = std::exp(cplx(0.0, 2.0 * k1z * sz));
        if (perp) return (s * s * s * rp(sz, s2z) * phase).real();
        return (s * (rs(sz, s2z) - sz * sz * rp(sz, s2z)) * phase).real();
    };
    // Evanescent branch, s = cosh(u): only Im(r) survives for lossless media,
    // and it vanishes beyond s = n, so the integral support is finite.
    auto f_evan = [&](double u) {
        const double s = std::cosh(u), sh = std::sinh(u);
        const cplx sz(0.0, sh);
        const cplx s2z = s2z_of(s);
        const double damp = std::exp(-2.0 * k1z * sh);
        if (perp) return s * s * s * rp(sz, s2z).imag() * damp;
        return s * (rs(sz, s2z) + sh * sh * rp(sz, s2z)).imag() * damp;
    };

    const int panels = 24 + static_cast<int>(k1z * 2.0);
    double integral = integrate_checked(f_prop, 0.0, kPi / 2.0, panels, "propagating branch");
    if (n > 1.0) {
        // substitute u = umax - t^2 to flatten the sqrt endpoint at s = n
        const double umax = std::acosh(n);
        auto f_sub = [&](double t) { return 2.0 * t * f_evan(umax - t * t); };
        integral += integrate_checked(f_sub, 0.0, std::sqrt(umax), panels, "evanescent branch");
    }
    return perp ? 1.0 + 1.5 * integral : 1.0 + 0.75 * integral;
}

double naive_lifetime(const NaiveModelParams& p) {
    if (p.surround_fraction < 0.0 || p.surround_fraction > 1.0)
        throw OracleError("volume fraction must lie in [0, 1]");
    if (p.n_surround < 1.0 || p.tau_bulk_ns <= 0.0) throw OracleError("invalid naive-model parameters");
    return p.n_diamond * p.tau_bulk_ns / ((1.0 - p.surround_fraction) + p.n_surround * p.surround_fraction);
}

std::vector<double> composite_coverslip_model(const std::vector<DipoleSample>& samples,
                                              double nanodiamond_diameter_nm, double n_substrate,
                                              double lambda_nm) {
    const double suppression = small_sphere_ratio(materials::n_diamond);
    std::vector<double> rates;
    rates.reserve(samples.size());
    for (const auto& s : samples) {
        const double z = nanodiamond_diameter_nm / 2.0 + s.offset.z;
        const double cos2 = s.orientation.z * s.orientation.z;
        InterfaceQuery q{z, 1.0, n_substrate, InterfaceOrientation::Perpendicular, lambda_nm};
        const double perp = interface_rate(q);
        q.orientation = InterfaceOrientation::Parallel;
        const double par = interface_rate(q);
        rates.push_back(suppression * (cos2 * perp + (1.0 - cos2) * par));
    }
    return rates;
}

} // namespace nvsim
