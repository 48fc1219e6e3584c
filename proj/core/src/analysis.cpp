#include "nvsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace nvsim {

double g2_model(double tau_ns, const G2Params& p) {
    const double t = std::abs(tau_ns);
    const double model = 1.0 - (1.0 + p.a) * std::exp(-t / p.tau1) + p.a * std::exp(-t / p.tau2);
    return p.contrast + (1.0 - p.contrast) * model;
}

namespace {

// Solves A x = b in place (small dense systems, partial pivoting).
bool solve_dense(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-300) return false;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        for (std::size_t k = c + 1; k < n; ++k) b[c] -= a[c][k] * b[k];
        b[c] /= a[c][c];
    }
    return true;
}

double sum_sq(const std::vector<double>& r) {
    return std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
}

} // namespace

LeastSquaresResult fit_least_squares(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> p, int max_iterations) {
    constexpr double kRelStep = 1e-6;
    double lambda = 1e-3;
    std::vector<double> r = residuals(p);
    double cost = sum_sq(r);
    const std::size_t np = p.size(), nr = r.size();

    LeastSquaresResult out;
    for (int it = 0; it < max_iterations; ++it) {
        out.iterations = it + 1;
        // Forward-difference Jacobian.
        std::vector<std::vector<double>> jac(nr, std::vector<double>(np));
        for (std::size_t c = 0; c < np; ++c) {
            const double h = kRelStep * std::max(1.0, std::abs(p[c]));
            std::vector<double> q = p;
            q[c] += h;
            const std::vector<double> rq = residuals(q);
            for (std::size_t i = 0; i < nr; ++i) jac[i][c] = (rq[i] - r[i]) / h;
        }
        std::vector<std::vector<double>> jtj(np, std::vector<double>(np, 0.0));
        std::vector<double> jtr(np, 0.0);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t c = 0; c < np; ++c) {
                jtr[c] += jac[i][c] * r[i];
                for (std::size_t d = 0; d <= c; ++d) jtj[c][d] += jac[i][c] * jac[i][d];
            }
        for (std::size_t c = 0; c < np; ++c)
            for (std::size_t d = c + 1; d < np; ++d) jtj[c][d] = jtj[d][c];

        bool stepped = false;
        for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
            auto a = jtj;
            for (std::size_t c = 0; c < np; ++c) a[c][c] += lambda * (1.0 + jtj[c][c]);
            std::vector<double> step(jtr);
            for (double& v : step) v = -v;
            if (!solve_dense(a, step)) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> q(np);
            for (std::size_t c = 0; c < np; ++c) q[c] = p[c] + step[c];
            std::vector<double> rq = residuals(q);
            const double cq = sum_sq(rq);
            if (cq <= cost) {
                double move = 0.0;
                for (std::size_t c = 0; c < np; ++c)
                    move = std::max(move, std::abs(step[c]) / std::max(1.0, std::abs(p[c])));
                p = std::move(q);
                r = std::move(rq);
                const double improvement = cost - cq;
                cost = cq;
                lambda = std::max(1e-12, lambda * 0.3);
                stepped = true;
                if (move < 1e-10 || improvement < 1e-16 * (1.0 + cost)) {
                    out.converged = true;
                    out.params = p;
                    out.rms = std::sqrt(cost / static_cast<double>(nr));
                    return out;
                }
            } else {
                lambda *= 10.0;
            }
        }
        if (!stepped) {
            out.converged = true; // no downhill step exists at machine scale
            break;
        }
    }
    out.params = p;
    out.rms = std::sqrt(cost / static_cast<double>(nr));
    return out;
}

G2Fit fit_g2(const G2Trace& trace, const G2Params& initial) {
    if (trace.tau_ns.size() != trace.g2.size() || trace.tau_ns.size() < 8)
        throw AnalysisError("fit_g2 needs at least 8 (tau, g2) points");
    auto resid = [&trace](const std::vector<double>& p) {
        G2Params g{p[0], std::abs(p[1]), std::abs(p[2]), p[3]};
        std::vector<double> r(trace.tau_ns.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = g2_model(trace.tau_ns[i], g) - trace.g2[i];
        return r;
    };
    auto res = fit_least_squares(resid, {initial.a, initial.tau1, initial.tau2, initial.contrast});
    if (!res.converged) throw AnalysisError("g2 fit did not converge");
    G2Fit fit;
    fit.params = {res.params[0], std::abs(res.params[1]), std::abs(res.params[2]), res.params[3]};
    fit.rms_residual = res.rms;
    fit.iterations = res.iterations;
    fit.dip_below_half = g2_model(0.0, fit.params) <= 0.5;
    return fit;
}

Extrapolation extrapolate_zero_power(const std::vector<PowerPoint>& series) {
    if (series.size() < 2) throw AnalysisError("extrapolation needs at least 2 points");
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (const auto& pt : series) {
        if (pt.power <= 0.0) throw AnalysisError("powers must be strictly positive");
        const double w = pt.sigma_ns > 0 ? 1.0 / (pt.sigma_ns * pt.sigma_ns) : 1.0;
        sw += w;
        swx += w * pt.power;
        swy += w * pt.decay_time_ns;
        swxx += w * pt.power * pt.power;
        swxy += w * pt.power * pt.decay_time_ns;
    }
    const double det = sw * swxx - swx * swx;
    if (std::abs(det) < 1e-12 * sw * swxx || det == 0.0)
        throw AnalysisError("singular design: powers must be distinct");
    Extrapolation e;
    e.lifetime_ns = (swxx * swy - swx * swxy) / det;
    e.slope = (sw * swxy - swx * swy) / det;
    e.sigma_ns = std::sqrt(swxx / det);
    return e;
}

namespace {

double ks_statistic(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double n = static_cast<double>(xs.size()), m = static_cast<double>(ys.size());
    while (i < xs.size() && j < ys.size()) {
        const double v = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] <= v) ++i;
        while (j < ys.size() && ys[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = (j % 2 ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace

KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
    if (x.empty() || y.empty()) throw AnalysisError("KS test needs non-empty sample sets");
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    KsResult res;
    res.d = ks_statistic(x, y);
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    const double ne = std::sqrt(n * m / (n + m));
    res.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * res.d);
    return res;
}

double ks_exact_permutation_p(std::vector<double> x, std::vector<double> y) {
    const std::size_t n = x.size(), m = y.size();
    if (n == 0 || m == 0 || n > 12 || m > 12)
        throw AnalysisError("exact permutation p restricted to 1..12 per side");
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double d_obs = ks_statistic(x, y) - 1e-12;

    std::vector<double> pool(x);
    pool.insert(pool.end(), y.begin(), y.end());
    std::sort(pool.begin(), pool.end());
    const std::size_t total = n + m;

    // Iterate all C(n+m, n) assignments of pooled values to sample x.
    std::vector<int> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    std::uint64_t hits = 0, count = 0;
    std::vector<double> xs(n), ys(m);
    while (true) {
        std::size_t pi = 0, xi = 0, yi = 0;
        for (std::size_t t = 0; t < total; ++t) {
            if (pi < n && pick[pi] == static_cast<int>(t)) {
                xs[xi++] = pool[t];
                ++pi;
            } else {
                ys[yi++] = pool[t];
            }
        }
        ++count;
        if (ks_statistic(xs, ys) >= d_obs) ++hits;
        // next combination
        int k = static_cast<int>(n) - 1;
        while (k >= 0 && pick[k] == static_cast<int>(total - n + k)) --k;
        if (k < 0) break;
        ++pick[k];
        for (std::size_t t = k + 1; t < n; ++t) pick[t] = pick[t - 1] + 1;
    }
    return static_cast<double>(hits) / static_cast<double>(count);
}

} // namespace nvsim
