#include "decoh/quantum_dynamics.hpp"

#include "fft_plan.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace decoh::quantum {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> potential_grid(const Grid2D& g, const HamiltonianModel& model) {
    std::vector<double> v(g.size());
    std::visit(
        [&](const auto& f) {
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i) {
                    v[static_cast<std::size_t>(j) * g.nx + i] = f.V({g.x(i), g.y(j)}, model.mass());
                }
            }
        },
        model.family());
    return v;
}

struct Moments {
    double norm{0.0};
    double mqx{0.0}, mqy{0.0}, vqx{0.0}, vqy{0.0};
    double mpx{0.0}, mpy{0.0}, vpx{0.0}, vpy{0.0};
    double energy{0.0};
    double edge{0.0};
};

// `scratch` and `fwd` are only touched when momentum moments are requested; `fwd` must be
// an in-place forward plan bound to `scratch`.
Moments compute_moments(const Grid2D& g, const std::vector<cplx>& psi, const std::vector<double>& v,
                        double mass, int edge_cells, std::vector<cplx>* scratch,
                        const detail::FftPlan2D* fwd) {
    Moments m;
    const double dA = g.cell_area();
    double sum = 0.0, sx = 0.0, sy = 0.0, sv = 0.0, edge = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const bool edge_row = j < edge_cells || j >= g.ny - edge_cells;
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
            const double rho = std::norm(psi[k]);
            sum += rho;
            sx += rho * g.x(i);
            sy += rho * g.y(j);
            sv += rho * v[k];
            if (edge_row || i < edge_cells || i >= g.nx - edge_cells) edge += rho;
        }
    }
    m.norm = sum * dA;
    m.edge = edge * dA;
    m.mqx = sx / sum;
    m.mqy = sy / sum;
    double vx = 0.0, vy = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double ddy = g.y(j) - m.mqy;
        for (int i = 0; i < g.nx; ++i) {
            const double rho = std::norm(psi[static_cast<std::size_t>(j) * g.nx + i]);
            const double ddx = g.x(i) - m.mqx;
            vx += rho * ddx * ddx;
            vy += rho * ddy * ddy;
        }
    }
    m.vqx = vx / sum;
    m.vqy = vy / sum;
    const double potential_energy = sv / sum;

    if (scratch == nullptr) {
        m.energy = potential_energy;
        return m;
    }
    std::copy(psi.begin(), psi.end(), scratch->begin());
    fwd->execute();
    const double hb = g.hbar;
    double ksum = 0.0, kx = 0.0, ky = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double rho = std::norm((*scratch)[static_cast<std::size_t>(j) * g.nx + i]);
            ksum += rho;
            kx += rho * g.kx(i);
            ky += rho * g.ky(j);
        }
    }
    m.mpx = hb * kx / ksum;
    m.mpy = hb * ky / ksum;
    double wx = 0.0, wy = 0.0, kin = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double py = hb * g.ky(j);
        for (int i = 0; i < g.nx; ++i) {
            const double rho = std::norm((*scratch)[static_cast<std::size_t>(j) * g.nx + i]);
            const double px = hb * g.kx(i);
            wx += rho * (px - m.mpx) * (px - m.mpx);
            wy += rho * (py - m.mpy) * (py - m.mpy);
            kin += rho * (px * px + py * py);
        }
    }
    m.vpx = wx / ksum;
    m.vpy = wy / ksum;
    m.energy = kin / ksum / (2.0 * mass) + potential_energy;
    return m;
}

void append(ExpectationSeries& s, double t, const Moments& m, bool with_momentum) {
    s.t.push_back(t);
    s.mean_qx.push_back(m.mqx);
    s.mean_qy.push_back(m.mqy);
    s.var_qx.push_back(m.vqx);
    s.var_qy.push_back(m.vqy);
    if (with_momentum) {
        s.mean_px.push_back(m.mpx);
        s.mean_py.push_back(m.mpy);
        s.var_px.push_back(m.vpx);
        s.var_py.push_back(m.vpy);
        s.energy.push_back(m.energy);
    }
    s.norm.push_back(m.norm);
    s.edge_probability.push_back(m.edge);
}

std::pair<double, double> classical_position(const classical::Trajectory& traj, double mass, double t) {
    const double t0 = traj.t.front();
    const double h = traj.sample_dt();
    if (traj.t.size() == 1 || h <= 0.0) {
        if (std::abs(t - t0) > 1e-12) throw GridMismatchError("classical trajectory has a single sample");
        return {traj.z.front().qx, traj.z.front().qy};
    }
    const double tol = 1e-9 * h;
    if (t < t0 - tol || t > traj.t.back() + tol) {
        throw GridMismatchError("quantum sample time lies outside the classical trajectory");
    }
    auto i = static_cast<std::size_t>(std::floor((t - t0) / h));
    if (i >= traj.t.size() - 1) i = traj.t.size() - 2;
    const double s = std::clamp((t - traj.t[i]) / h, 0.0, 1.0);
    const auto& a = traj.z[i];
    const auto& b = traj.z[i + 1];
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    const double qx = h00 * a.qx + h10 * h * a.px / mass + h01 * b.qx + h11 * h * b.px / mass;
    const double qy = h00 * a.qy + h10 * h * a.py / mass + h01 * b.qy + h11 * h * b.py / mass;
    return {qx, qy};
}

std::vector<double> deviations(const ExpectationSeries& q, const classical::Trajectory& traj, double mass) {
    if (q.t.empty() || traj.t.empty()) throw GridMismatchError("empty series in Ehrenfest comparison");
    std::vector<double> d(q.t.size());
    for (std::size_t k = 0; k < q.t.size(); ++k) {
        const auto [x, y] = classical_position(traj, mass, q.t[k]);
        d[k] = std::hypot(q.mean_qx[k] - x, q.mean_qy[k] - y);
    }
    return d;
}

}  // namespace

double Grid2D::kx(int i) const {
    const int n = i < nx / 2 ? i : i - nx;
    return 2.0 * std::numbers::pi * n / Lx;
}

double Grid2D::ky(int j) const {
    const int n = j < ny / 2 ? j : j - ny;
    return 2.0 * std::numbers::pi * n / Ly;
}

void Grid2D::validate() const {
    if (!power_of_two(nx) || !power_of_two(ny) || nx < 64 || ny < 64) {
        throw DomainError("grid point counts must be powers of two and at least 64");
    }
    if (!(Lx > 0.0 && Ly > 0.0 && std::isfinite(Lx) && std::isfinite(Ly))) {
        throw DomainError("grid box lengths must be positive");
    }
    if (!(hbar > 0.0 && std::isfinite(hbar))) throw DomainError("hbar_eff must be positive");
    if (!std::isfinite(cx) || !std::isfinite(cy)) throw DomainError("grid centre must be finite");
}

double WavepacketState::norm() const {
    double s = 0.0;
    for (const auto& a : psi) s += std::norm(a);
    return s * grid.cell_area();
}

WavepacketState init_gaussian(const Grid2D& grid, const PhasePoint& z, double sigma_x, double sigma_y) {
    grid.validate();
    if (!z.finite()) throw DomainError("packet centre must be finite");
    if (!(sigma_x > 2.0 * grid.dx() && sigma_y > 2.0 * grid.dy())) {
        throw DomainError("packet widths must exceed two grid cells");
    }
    if (!(sigma_x < grid.Lx / 10.0 && sigma_y < grid.Ly / 10.0)) {
        throw DomainError("packet widths must be below a tenth of the box");
    }
    if (std::abs(z.qx - grid.cx) > 0.5 * grid.Lx || std::abs(z.qy - grid.cy) > 0.5 * grid.Ly) {
        throw DomainError("packet centre lies outside the box");
    }

    WavepacketState st;
    st.grid = grid;
    st.psi.resize(grid.size());
    const double hb = grid.hbar;
    for (int j = 0; j < grid.ny; ++j) {
        const double dy = grid.y(j) - z.qy;
        for (int i = 0; i < grid.nx; ++i) {
            const double dx = grid.x(i) - z.qx;
            const double amp = std::exp(-dx * dx / (4.0 * sigma_x * sigma_x) - dy * dy / (4.0 * sigma_y * sigma_y));
            const double phase = (z.px * dx + z.py * dy) / hb;
            st.psi[static_cast<std::size_t>(j) * grid.nx + i] = std::polar(amp, phase);
        }
    }
    const double scale = 1.0 / std::sqrt(st.norm());
    for (auto& a : st.psi) a *= scale;
    return st;
}

ExpectationSeries measure(const WavepacketState& state, const HamiltonianModel& model, bool with_momentum) {
    state.grid.validate();
    const auto v = potential_grid(state.grid, model);
    ExpectationSeries s;
    s.hbar = state.grid.hbar;
    std::vector<cplx> scratch;
    std::optional<detail::FftPlan2D> fwd;
    if (with_momentum) {
        scratch.resize(state.grid.size());
        fwd.emplace(state.grid.ny, state.grid.nx, scratch.data(), FFTW_FORWARD);
    }
    const auto m = compute_moments(state.grid, state.psi, v, model.mass(), 4,
                                   with_momentum ? &scratch : nullptr, with_momentum ? &*fwd : nullptr);
    append(s, state.t, m, with_momentum);
    return s;
}

ExpectationSeries propagate_wavepacket(WavepacketState& state, const HamiltonianModel& model, double dt,
                                       long n_steps, int sample_every, const WavepacketOptions& opts) {
    const Grid2D& g = state.grid;
    g.validate();
    if (state.psi.size() != g.size()) throw DomainError("wavefunction size does not match the grid");
    if (!(dt > 0.0 && std::isfinite(dt))) throw DomainError("dt must be positive");
    if (n_steps < 1) throw DomainError("n_steps must be at least 1");
    const int every = std::max(1, sample_every);

    const double hb = g.hbar;
    const double m = model.mass();
    const auto v = potential_grid(g, model);
    const double inv_n = 1.0 / static_cast<double>(g.size());

    std::vector<cplx> half_v(g.size()), full_v(g.size()), kin(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        half_v[k] = std::polar(1.0, -0.5 * v[k] * dt / hb);
        full_v[k] = std::polar(1.0, -v[k] * dt / hb);
    }
    for (int j = 0; j < g.ny; ++j) {
        const double ky = g.ky(j);
        for (int i = 0; i < g.nx; ++i) {
            const double kx = g.kx(i);
            kin[static_cast<std::size_t>(j) * g.nx + i] =
                std::polar(inv_n, -hb * (kx * kx + ky * ky) * dt / (2.0 * m));
        }
    }

    detail::FftPlan2D fwd(g.ny, g.nx, state.psi.data(), FFTW_FORWARD);
    detail::FftPlan2D bwd(g.ny, g.nx, state.psi.data(), FFTW_BACKWARD);
    std::vector<cplx> scratch;
    std::optional<detail::FftPlan2D> scratch_fwd;
    if (opts.sample_momentum) {
        scratch.resize(g.size());
        scratch_fwd.emplace(g.ny, g.nx, scratch.data(), FFTW_FORWARD);
    }

    ExpectationSeries series;
    series.hbar = hb;
    auto sample = [&]() {
        const auto mo = compute_moments(g, state.psi, v, m, opts.edge_cells,
                                        opts.sample_momentum ? &scratch : nullptr,
                                        opts.sample_momentum ? &*scratch_fwd : nullptr);
        append(series, state.t, mo, opts.sample_momentum);
        return mo;
    };
    const double norm0 = sample().norm;
    const double t0 = state.t;

    auto mul = [](std::vector<cplx>& a, const std::vector<cplx>& b) {
        for (std::size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
    };

    // Adjacent potential half-steps are fused unless a sample sits between them.
    mul(state.psi, half_v);
    for (long n = 1; n <= n_steps; ++n) {
        fwd.execute();
        mul(state.psi, kin);
        bwd.execute();
        const bool take = n % every == 0;
        if (take || n == n_steps) {
            mul(state.psi, half_v);
            state.t = t0 + static_cast<double>(n) * dt;
            if (take) {
                const auto mo = sample();
                if (std::abs(mo.norm - norm0) > opts.norm_tolerance) {
                    throw NormDriftError("wavefunction norm drifted beyond tolerance", std::move(series));
                }
                if (mo.edge > opts.edge_tolerance) {
                    throw BoundaryLeakError("probability reached the box boundary", std::move(series));
                }
            }
            if (n < n_steps) mul(state.psi, half_v);
        } else {
            mul(state.psi, full_v);
        }
    }
    return series;
}

std::optional<double> ehrenfest_break_time(const ExpectationSeries& qseries,
                                           const classical::Trajectory& traj, double mass,
                                           double threshold) {
    if (!(threshold > 0.0)) throw DomainError("break-time threshold must be positive");
    const auto d = deviations(qseries, traj, mass);
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (d[k] > threshold) {
            if (k == 0) return qseries.t[0];
            const double f = (threshold - d[k - 1]) / (d[k] - d[k - 1]);
            return qseries.t[k - 1] + f * (qseries.t[k] - qseries.t[k - 1]);
        }
    }
    return std::nullopt;
}

double max_ehrenfest_deviation(const ExpectationSeries& qseries, const classical::Trajectory& traj,
                               double mass) {
    double worst = 0.0;
    for (double d : deviations(qseries, traj, mass)) worst = std::max(worst, d);
    return worst;
}

void write_snapshot(const WavepacketState& state, const std::filesystem::path& base) {
    auto bin_path = base;
    bin_path += ".bin";
    auto hdr_path = base;
    hdr_path += ".hdr";
    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) throw Error("cannot open snapshot file " + bin_path.string());
    for (const auto& a : state.psi) {
        for (double part : {a.real(), a.imag()}) {
            auto bits = std::bit_cast<std::uint64_t>(part);
            if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
            char bytes[8];
            std::memcpy(bytes, &bits, 8);
            bin.write(bytes, 8);
        }
    }
    std::ofstream hdr(hdr_path);
    if (!hdr) throw Error("cannot open snapshot header " + hdr_path.string());
    hdr.precision(17);
    hdr << "nx " << state.grid.nx << "\nny " << state.grid.ny << "\nLx " << state.grid.Lx << "\nLy "
        << state.grid.Ly << "\nt " << state.t << "\n";
}

}  // namespace decoh::quantum
