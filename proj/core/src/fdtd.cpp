#include "nvsim/fdtd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

namespace nvsim {

void SolverConfig::validate() const {
    if (dx_nm <= 0.0) throw FdtdError("grid step must be positive");
    if (courant <= 0.0 || courant > 1.0 / std::sqrt(3.0) + 1e-12)
        throw FdtdError("courant factor must satisfy 0 < S <= 1/sqrt(3)");
    if (pml_cells < 8) throw FdtdError("pml_cells must be >= 8");
    if (warmup_cycles < 1 || measure_cycles < 1 || max_cycles < warmup_cycles + 1)
        throw FdtdError("invalid cycle counts");
    if (lambda_nm <= 0.0) throw FdtdError("wavelength must be positive");
}

namespace {

constexpr double kFluxBoxMarginNm = 15.0; // box side = domain - 30 nm

struct SourceNode {
    std::size_t index;
    int comp;
    float weight; // trilinear weight times orientation component
};

// All quantities in grid units: dx = 1, c = 1, eps0 = mu0 = 1.
class Solver {
  public:
    Solver(const VoxelGrid& grid, const DipoleSource& src, const SolverConfig& cfg)
        : cfg_(cfg), n_(grid.dims), npml_(cfg.pml_cells), N_(n_ + 2 * npml_), nn_(N_ + 1) {
        const long long cells = static_cast<long long>(nn_) * nn_ * nn_;
        if (cells > cfg.cell_budget) throw FdtdError("grid exceeds the configured cell budget");
        dt_ = static_cast<float>(cfg.courant);

        const std::size_t sz = static_cast<std::size_t>(nn_) * nn_ * nn_;
        for (int c = 0; c < 3; ++c) {
            e_[c].assign(sz, 0.0f);
            h_[c].assign(sz, 0.0f);
            ce_[c].resize(sz);
        }
        for (auto& p : psi_e_) p.assign(sz, 0.0f);
        for (auto& p : psi_h_) p.assign(sz, 0.0f);

        // dt/eps per E node; the scene continues into the PML by clamping.
        for (int c = 0; c < 3; ++c) {
            std::size_t id = 0;
            for (int i = 0; i < nn_; ++i)
                for (int j = 0; j < nn_; ++j)
                    for (int k = 0; k < nn_; ++k, ++id)
                        ce_[c][id] =
                            dt_ / static_cast<float>(grid.eps[c][grid.idx(i - npml_, j - npml_, k - npml_)]);
        }

        build_pml_coefficients();
        build_source(grid, src);
        setup_timing();
        setup_flux_box(src, grid);
    }

    PowerResult run() {
        PowerResult res;
        res.lambda_effective_nm = lambda_eff_nm_;
        double prev_flux = 0.0;
        std::FILE* csv = nullptr;
        if (!cfg_.cycle_csv_path.empty()) {
            csv = std::fopen(cfg_.cycle_csv_path.c_str(), "w");
            if (csv) std::fprintf(csv, "cycle_index,P_flux,P_work\n");
        }
        for (int cycle = 0; cycle < cfg_.max_cycles; ++cycle) {
            double flux_acc = 0.0, work_acc = 0.0;
            for (int s = 0; s < steps_per_cycle_; ++s) {
                step();
                flux_acc += instant_flux();
                work_acc += work_last_step_;
            }
            res.p_flux = flux_acc / steps_per_cycle_;
            res.p_work = work_acc / steps_per_cycle_;
            res.cycles_run = cycle + 1;
            if (csv) std::fprintf(csv, "%d,%.9e,%.9e\n", cycle, res.p_flux, res.p_work);
            if (!std::isfinite(res.p_flux) || std::abs(res.p_flux) > 1e30) {
                if (csv) std::fclose(csv);
                throw FdtdError("field divergence detected at cycle " + std::to_string(cycle));
            }
            if (cycle + 1 > cfg_.warmup_cycles) {
                const double change = std::abs(res.p_flux - prev_flux) / std::max(1e-300, std::abs(res.p_flux));
                if (change < cfg_.convergence_tol) {
                    res.converged = true;
                    const int measured = cycle + 1 - cfg_.warmup_cycles;
                    if (measured >= 1) break;
                }
                if (cycle + 1 >= cfg_.warmup_cycles + cfg_.measure_cycles && res.converged) break;
            }
            prev_flux = res.p_flux;
        }
        if (csv) std::fclose(csv);
        return res;
    }

  private:
    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * nn_ + j) * nn_ + k;
    }

    void build_pml_coefficients() {
        // Polynomial-graded conductivity, order 3; b/c per Roden-Gedney with
        // kappa = 1, alpha = 0.
        const int m = 3;
        const double smax = 0.8 * (m + 1);
        be_.assign(nn_, 1.0f);
        ce_pml_.assign(nn_, 0.0f);
        bh_.assign(nn_, 1.0f);
        ch_.assign(nn_, 0.0f);
        auto sigma_at = [&](double pos) {
            double d = 0.0;
            if (pos < npml_) d = (npml_ - pos) / npml_;
            else if (pos > N_ - npml_) d = (pos - (N_ - npml_)) / npml_;
            return smax * d * d * d;
        };
        for (int i = 0; i < nn_; ++i) {
            const double se = sigma_at(i);
            if (se > 0.0) {
                be_[i] = static_cast<float>(std::exp(-se * dt_));
                ce_pml_[i] = be_[i] - 1.0f;
            }
            const double sh = sigma_at(i + 0.5);
            if (sh > 0.0) {
                bh_[i] = static_cast<float>(std::exp(-sh * dt_));
                ch_[i] = bh_[i] - 1.0f;
            }
        }
    }

    void build_source(const VoxelGrid& grid, const DipoleSource& src) {
        if (std::abs(src.orientation.norm() - 1.0) > 1e-9)
            throw FdtdError("dipole orientation must be a unit vector");
        const double L = grid.dims * grid.dx;
        const Vec3 g{(src.position_nm.x + L / 2) / grid.dx + npml_,
                     (src.position_nm.y + L / 2) / grid.dx + npml_,
                     (src.position_nm.z + L / 2) / grid.dx + npml_};
        const double ori[3] = {src.orientation.x, src.orientation.y, src.orientation.z};
        amplitude_ = src.amplitude;
        for (int c = 0; c < 3; ++c) {
            if (ori[c] == 0.0) continue;
            double fx = g.x - (c == 0 ? 0.5 : 0.0);
            double fy = g.y - (c == 1 ? 0.5 : 0.0);
            double fz = g.z - (c == 2 ? 0.5 : 0.0);
            const int i0 = static_cast<int>(std::floor(fx));
            const int j0 = static_cast<int>(std::floor(fy));
            const int k0 = static_cast<int>(std::floor(fz));
            if (i0 < 1 || j0 < 1 || k0 < 1 || i0 + 1 > N_ - 1 || j0 + 1 > N_ - 1 || k0 + 1 > N_ - 1)
                throw FdtdError("dipole position outside the solvable region");
            const double wx = fx - i0, wy = fy - j0, wz = fz - k0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int d = 0; d < 2; ++d) {
                        const double w = (a ? wx : 1 - wx) * (b ? wy : 1 - wy) * (d ? wz : 1 - wz);
                        if (w < 1e-12) continue;
                        sources_.push_back(
                            {idx(i0 + a, j0 + b, k0 + d), c, static_cast<float>(w * ori[c])});
                    }
        }
        if (sources_.empty()) throw FdtdError("dipole source has no injection nodes");
    }

    void setup_timing() {
        const double lambda_grid = cfg_.lambda_nm / cfg_.dx_nm;
        steps_per_cycle_ = std::max(8, static_cast<int>(std::lround(lambda_grid / dt_)));
        omega_ = 2.0 * std::numbers::pi / (steps_per_cycle_ * static_cast<double>(dt_));
        lambda_eff_nm_ = steps_per_cycle_ * static_cast<double>(dt_) * cfg_.dx_nm;
        ramp_steps_ = 2 * steps_per_cycle_;
    }

    void setup_flux_box(const DipoleSource& src, const VoxelGrid& grid) {
        const int margin = std::max(1, static_cast<int>(std::lround(kFluxBoxMarginNm / cfg_.dx_nm)));
        lo_ = npml_ + margin;
        hi_ = npml_ + n_ - margin;
        if (hi_ - lo_ < 4) throw FdtdError("flux box too small for this domain");
        const double L = grid.dims * grid.dx;
        const double guard = 2.0 * cfg_.dx_nm;
        for (double p : {src.position_nm.x, src.position_nm.y, src.position_nm.z})
            if (std::abs(p) > L / 2 - kFluxBoxMarginNm - guard)
                throw FdtdError("source must lie at least 2 cells inside the flux box");
    }

    double source_current(int c_unused, double t) const {
        (void)c_unused;
        const double ramp = t < ramp_steps_ * static_cast<double>(dt_)
                                ? 0.5 * (1.0 - std::cos(std::numbers::pi * t /
                                                        (ramp_steps_ * static_cast<double>(dt_))))
                                : 1.0;
        return amplitude_ * ramp * std::sin(omega_ * t);
    }

    void step() {
        update_h();
        // E^n at the injection nodes, for the discrete source-work average
        src_prev_.resize(sources_.size());
        for (std::size_t s = 0; s < sources_.size(); ++s)
            src_prev_[s] = e_[sources_[s].comp][sources_[s].index];
        update_e();
        inject_and_work();
        ++step_count_;
    }

    void update_h() {
        const float dt = dt_;
        const int nn = nn_;
        auto id = [nn](int i, int j, int k) {
            return (static_cast<std::size_t>(i) * nn + j) * nn + k;
        };
        float* __restrict__ Hx = h_[0].data();
        float* __restrict__ Hy = h_[1].data();
        float* __restrict__ Hz = h_[2].data();
        const float* __restrict__ Ex = e_[0].data();
        const float* __restrict__ Ey = e_[1].data();
        const float* __restrict__ Ez = e_[2].data();
        const std::size_t sj = nn, si = static_cast<std::size_t>(nn) * nn;

        for (int i = 0; i <= N_; ++i)
            for (int j = 0; j < N_; ++j) {
                std::size_t b = id(i, j, 0);
                for (int k = 0; k < N_; ++k) {
                    const std::size_t q = b + k;
                    Hx[q] -= dt * ((Ez[q + sj] - Ez[q]) - (Ey[q + 1] - Ey[q]));
                }
            }
        for (int i = 0; i < N_; ++i)
            for (int j = 0; j <= N_; ++j) {
                std::size_t b = id(i, j, 0);
                for (int k = 0; k < N_; ++k) {
                    const std::size_t q = b + k;
                    Hy[q] -= dt * ((Ex[q + 1] - Ex[q]) - (Ez[q + si] - Ez[q]));
                }
            }
        for (int i = 0; i < N_; ++i)
            for (int j = 0; j < N_; ++j) {
                std::size_t b = id(i, j, 0);
                for (int k = 0; k <= N_; ++k) {
                    const std::size_t q = b + k;
                    Hz[q] -= dt * ((Ey[q + si] - Ey[q]) - (Ex[q + sj] - Ex[q]));
                }
            }

        // CPML corrections, half-position coefficients along the derivative
        // axis; only the two absorbing slabs of that axis are touched.
        auto slabs = [&](auto&& body) {
            body(0, npml_ - 1);
            body(N_ - npml_, N_ - 1);
        };
        // Hx: + dEz/dy (y-graded), - dEy/dz (z-graded)
        slabs([&](int j0, int j1) {
            for (int i = 0; i <= N_; ++i)
                for (int j = j0; j <= j1; ++j) {
                    const float bj = bh_[j], cj = ch_[j];
                    const std::size_t b = id(i, j, 0);
                    for (int k = 0; k < N_; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_h_[0][q];
                        p = bj * p + cj * (Ez[q + sj] - Ez[q]);
                        Hx[q] -= dt * p;
                    }
                }
        });
        slabs([&](int k0, int k1) {
            for (int i = 0; i <= N_; ++i)
                for (int j = 0; j < N_; ++j) {
                    const std::size_t b = id(i, j, 0);
                    for (int k = k0; k <= k1; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_h_[1][q];
                        p = bh_[k] * p + ch_[k] * (Ey[q + 1] - Ey[q]);
                        Hx[q] += dt * p;
                    }
                }
        });
        // Hy: + dEx/dz (z-graded), - dEz/dx (x-graded)
        slabs([&](int k0, int k1) {
            for (int i = 0; i < N_; ++i)
                for (int j = 0; j <= N_; ++j) {
                    const std::size_t b = id(i, j, 0);
                    for (int k = k0; k <= k1; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_h_[2][q];
                        p = bh_[k] * p + ch_[k] * (Ex[q + 1] - Ex[q]);
                        Hy[q] -= dt * p;
                    }
                }
        });
        slabs([&](int i0, int i1) {
            for (int i = i0; i <= i1; ++i) {
                const float bi = bh_[i], ci = ch_[i];
                for (int j = 0; j <= N_; ++j) {
                    const std::size_t b = id(i, j, 0);
                    for (int k = 0; k < N_; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_h_[3][q];
                        p = bi * p + ci * (Ez[q + si] - Ez[q]);
                        Hy[q] += dt * p;
                    }
                }
            }
        });
        // Hz: + dEy/dx (x-graded), - dEx/dy (y-graded)
        slabs([&](int i0, int i1) {
            for (int i = i0; i <= i1; ++i) {
                const float bi = bh_[i], ci = ch_[i];
                for (int j = 0; j < N_; ++j) {
                    const std::size_t b = id(i, j, 0);
                    for (int k = 0; k <= N_; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_h_[4][q];
                        p = bi * p + ci * (Ey[q + si] - Ey[q]);
                        Hz[q] -= dt * p;
                    }
                }
            }
        });
        slabs([&](int j0, int j1) {
            for (int i = 0; i < N_; ++i)
                for (int j = j0; j <= j1; ++j) {
                    const float bj = bh_[j], cj = ch_[j];
                    const std::size_t b = id(i, j, 0);
                    for (int k = 0; k <= N_; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_h_[5][q];
                        p = bj * p + cj * (Ex[q + sj] - Ex[q]);
                        Hz[q] += dt * p;
                    }
                }
        });
    }

    void update_e() {
        const int nn = nn_;
        auto id = [nn](int i, int j, int k) {
            return (static_cast<std::size_t>(i) * nn + j) * nn + k;
        };
        float* __restrict__ Ex = e_[0].data();
        float* __restrict__ Ey = e_[1].data();
        float* __restrict__ Ez = e_[2].data();
        const float* __restrict__ Hx = h_[0].data();
        const float* __restrict__ Hy = h_[1].data();
        const float* __restrict__ Hz = h_[2].data();
        const float* __restrict__ Cx = ce_[0].data();
        const float* __restrict__ Cy = ce_[1].data();
        const float* __restrict__ Cz = ce_[2].data();
        const std::size_t sj = nn, si = static_cast<std::size_t>(nn) * nn;

        for (int i = 0; i < N_; ++i)
            for (int j = 1; j < N_; ++j) {
                std::size_t b = id(i, j, 0);
                for (int k = 1; k < N_; ++k) {
                    const std::size_t q = b + k;
                    Ex[q] += Cx[q] * ((Hz[q] - Hz[q - sj]) - (Hy[q] - Hy[q - 1]));
                }
            }
        for (int i = 1; i < N_; ++i)
            for (int j = 0; j < N_; ++j) {
                std::size_t b = id(i, j, 0);
                for (int k = 1; k < N_; ++k) {
                    const std::size_t q = b + k;
                    Ey[q] += Cy[q] * ((Hx[q] - Hx[q - 1]) - (Hz[q] - Hz[q - si]));
                }
            }
        for (int i = 1; i < N_; ++i)
            for (int j = 1; j < N_; ++j) {
                std::size_t b = id(i, j, 0);
                for (int k = 0; k < N_; ++k) {
                    const std::size_t q = b + k;
                    Ez[q] += Cz[q] * ((Hy[q] - Hy[q - si]) - (Hx[q] - Hx[q - sj]));
                }
            }

        // CPML corrections, integer-position coefficients along the derivative
        // axis; only the two absorbing slabs of that axis are touched.
        auto slabs = [&](auto&& body) {
            body(1, npml_);
            body(N_ - npml_, N_ - 1);
        };
        // Ex: + dHz/dy (y-graded), - dHy/dz (z-graded)
        slabs([&](int j0, int j1) {
            for (int i = 0; i < N_; ++i)
                for (int j = j0; j <= j1; ++j) {
                    const float bj = be_[j], cj = ce_pml_[j];
                    const std::size_t b = id(i, j, 0);
                    for (int k = 1; k < N_; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_e_[0][q];
                        p = bj * p + cj * (Hz[q] - Hz[q - sj]);
                        Ex[q] += ce_[0][q] * p;
                    }
                }
        });
        slabs([&](int k0, int k1) {
            for (int i = 0; i < N_; ++i)
                for (int j = 1; j < N_; ++j) {
                    const std::size_t b = id(i, j, 0);
                    for (int k = k0; k <= k1; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_e_[1][q];
                        p = be_[k] * p + ce_pml_[k] * (Hy[q] - Hy[q - 1]);
                        Ex[q] -= ce_[0][q] * p;
                    }
                }
        });
        // Ey: + dHx/dz (z-graded), - dHz/dx (x-graded)
        slabs([&](int k0, int k1) {
            for (int i = 1; i < N_; ++i)
                for (int j = 0; j < N_; ++j) {
                    const std::size_t b = id(i, j, 0);
                    for (int k = k0; k <= k1; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_e_[2][q];
                        p = be_[k] * p + ce_pml_[k] * (Hx[q] - Hx[q - 1]);
                        Ey[q] += ce_[1][q] * p;
                    }
                }
        });
        slabs([&](int i0, int i1) {
            for (int i = i0; i <= i1; ++i) {
                const float bi = be_[i], ci = ce_pml_[i];
                for (int j = 0; j < N_; ++j) {
                    const std::size_t b = id(i, j, 0);
                    for (int k = 1; k < N_; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_e_[3][q];
                        p = bi * p + ci * (Hz[q] - Hz[q - si]);
                        Ey[q] -= ce_[1][q] * p;
                    }
                }
            }
        });
        // Ez: + dHy/dx (x-graded), - dHx/dy (y-graded)
        slabs([&](int i0, int i1) {
            for (int i = i0; i <= i1; ++i) {
                const float bi = be_[i], ci = ce_pml_[i];
                for (int j = 1; j < N_; ++j) {
                    const std::size_t b = id(i, j, 0);
                    for (int k = 0; k < N_; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_e_[4][q];
                        p = bi * p + ci * (Hy[q] - Hy[q - si]);
                        Ez[q] += ce_[2][q] * p;
                    }
                }
            }
        });
        slabs([&](int j0, int j1) {
            for (int i = 1; i < N_; ++i)
                for (int j = j0; j <= j1; ++j) {
                    const float bj = be_[j], cj = ce_pml_[j];
                    const std::size_t b = id(i, j, 0);
                    for (int k = 0; k < N_; ++k) {
                        const std::size_t q = b + k;
                        float& p = psi_e_[5][q];
                        p = bj * p + cj * (Hx[q] - Hx[q - sj]);
                        Ez[q] -= ce_[2][q] * p;
                    }
                }
        });
    }

    void inject_and_work() {
        const double t_half = (step_count_ + 0.5) * static_cast<double>(dt_);
        const double j_amp = source_current(0, t_half);
        double work = 0.0;
        for (std::size_t si = 0; si < sources_.size(); ++si) {
            const auto& s = sources_[si];
            float& e = e_[s.comp][s.index];
            const float j = static_cast<float>(j_amp) * s.weight;
            e -= ce_[s.comp][s.index] * j;
            work -= j * 0.5 * (src_prev_[si] + e);
        }
        work_last_step_ = work;
    }

    // Outward Poynting flux over the six box faces (E at n+1, H at n+1/2;
    // the half-step phase bias cancels in rate ratios).
    double instant_flux() const {
        const int nn = nn_;
        auto id = [nn](int i, int j, int k) {
            return (static_cast<std::size_t>(i) * nn + j) * nn + k;
        };
        const float* Ex = e_[0].data();
        const float* Ey = e_[1].data();
        const float* Ez = e_[2].data();
        const float* Hx = h_[0].data();
        const float* Hy = h_[1].data();
        const float* Hz = h_[2].data();
        const std::size_t sj = nn, si = static_cast<std::size_t>(nn) * nn;
        auto trap = [&](int p) { return (p == lo_ || p == hi_) ? 0.5 : 1.0; };

        double total = 0.0;
        for (int side = 0; side < 2; ++side) {
            const int i0 = side ? hi_ : lo_;
            const double sgn = side ? 1.0 : -1.0;
            // x-faces: S.x = Ey*Hz - Ez*Hy
            double acc = 0.0;
            for (int j = lo_; j < hi_; ++j)
                for (int k = lo_; k <= hi_; ++k) {
                    const std::size_t q = id(i0, j, k);
                    acc += trap(k) * Ey[q] * 0.5 * (Hz[q] + Hz[q - si]);
                }
            for (int j = lo_; j <= hi_; ++j)
                for (int k = lo_; k < hi_; ++k) {
                    const std::size_t q = id(i0, j, k);
                    acc -= trap(j) * Ez[q] * 0.5 * (Hy[q] + Hy[q - si]);
                }
            total += sgn * acc;
            // y-faces: S.y = Ez*Hx - Ex*Hz
            const int j0 = side ? hi_ : lo_;
            acc = 0.0;
            for (int i = lo_; i <= hi_; ++i)
                for (int k = lo_; k < hi_; ++k) {
                    const std::size_t q = id(i, j0, k);
                    acc += trap(i) * Ez[q] * 0.5 * (Hx[q] + Hx[q - sj]);
                }
            for (int i = lo_; i < hi_; ++i)
                for (int k = lo_; k <= hi_; ++k) {
                    const std::size_t q = id(i, j0, k);
                    acc -= trap(k) * Ex[q] * 0.5 * (Hz[q] + Hz[q - sj]);
                }
            total += sgn * acc;
            // z-faces: S.z = Ex*Hy - Ey*Hx
            const int k0 = side ? hi_ : lo_;
            acc = 0.0;
            for (int i = lo_; i < hi_; ++i)
                for (int j = lo_; j <= hi_; ++j) {
                    const std::size_t q = id(i, j, k0);
                    acc += trap(j) * Ex[q] * 0.5 * (Hy[q] + Hy[q - 1]);
                }
            for (int i = lo_; i <= hi_; ++i)
                for (int j = lo_; j < hi_; ++j) {
                    const std::size_t q = id(i, j, k0);
                    acc -= trap(i) * Ey[q] * 0.5 * (Hx[q] + Hx[q - 1]);
                }
            total += sgn * acc;
        }
        return total;
    }

    SolverConfig cfg_;
    int n_, npml_, N_, nn_;
    float dt_;
    std::vector<float> e_[3], h_[3], ce_[3];
    std::vector<float> psi_e_[6], psi_h_[6];
    std::vector<float> be_, ce_pml_, bh_, ch_;
    std::vector<SourceNode> sources_;
    std::vector<float> src_prev_;
    double amplitude_ = 1.0, omega_ = 0.0, lambda_eff_nm_ = 0.0;
    int steps_per_cycle_ = 0, ramp_steps_ = 0, lo_ = 0, hi_ = 0;
    long step_count_ = 0;
    double work_last_step_ = 0.0;
};

} // namespace

PowerResult radiated_power(const VoxelGrid& grid, const DipoleSource& src, const SolverConfig& cfg) {
    cfg.validate();
    Solver solver(grid, src, cfg);
    return solver.run();
}

SimulationResult relative_rate(const VoxelGrid& scene_grid, const VoxelGrid& bulk_grid,
                               const DipoleSource& src, const SolverConfig& cfg) {
    const PowerResult scene = radiated_power(scene_grid, src, cfg);
    const PowerResult bulk = radiated_power(bulk_grid, src, cfg);
    SimulationResult res;
    res.p_flux = scene.p_flux;
    res.p_work = scene.p_work;
    res.p_bulk_flux = bulk.p_flux;
    res.p_bulk_work = bulk.p_work;
    res.relative_rate = scene.p_flux / bulk.p_flux;
    res.converged = scene.converged && bulk.converged;
    res.cycles_run = std::max(scene.cycles_run, bulk.cycles_run);
    return res;
}

SimulationResult relative_rate(const DielectricScene& scene, const DipoleSource& src,
                               const SolverConfig& cfg) {
    const VoxelGrid grid = voxelize(scene, cfg.dx_nm);
    const VoxelGrid bulk =
        VoxelGrid::uniform(grid.dims, grid.dx, scene.nanodiamond.material.permittivity());
    return relative_rate(grid, bulk, src, cfg);
}

ConvergenceTable convergence_probe(const DielectricScene& scene, const DipoleSource& src,
                                   const std::vector<double>& dx_list, SolverConfig cfg) {
    ConvergenceTable table;
    double prev_rate = 0.0, prev_change = 0.0;
    bool first = true;
    for (double dx : dx_list) {
        cfg.dx_nm = dx;
        const SimulationResult r = relative_rate(scene, src, cfg);
        ConvergenceRow row{dx, r.relative_rate, std::numeric_limits<double>::quiet_NaN()};
        if (!first) {
            row.rel_change_vs_prev = std::abs(r.relative_rate - prev_rate) / std::abs(r.relative_rate);
            if (prev_change > 0.0 && row.rel_change_vs_prev > prev_change) table.monotone = false;
            prev_change = row.rel_change_vs_prev;
        }
        prev_rate = r.relative_rate;
        first = false;
        table.rows.push_back(row);
    }
    return table;
}

} // namespace nvsim
