#include "decoh/classical_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>

namespace decoh::classical {

namespace {

// McLachlan's SB3A coefficients: drift, kick, drift, ... with a vanishing last kick,
// which makes the composition symmetric and hence time-reversible.
constexpr double kA0 = 0.40518861839525227722;
constexpr double kA1 = -0.28714404081652408900;
constexpr double kA2 = 0.5 - (kA0 + kA1);
constexpr double kB0 = -3.0 / 73.0;
constexpr double kB1 = 17.0 / 59.0;
constexpr double kB2 = 1.0 - 2.0 * (kB0 + kB1);

constexpr std::array<double, 6> kDrift = {kA0, kA1, kA2, kA2, kA1, kA0};
constexpr std::array<double, 6> kKick = {kB0, kB1, kB2, kB1, kB0, 0.0};

template <class F>
void advance(const F& f, double m, double dt, PhasePoint& z) {
    for (std::size_t s = 0; s < kDrift.size(); ++s) {
        const double h = kDrift[s] * dt / m;
        z.qx += h * z.px;
        z.qy += h * z.py;
        if (kKick[s] != 0.0) {
            const Vec2 g = f.grad(z.q(), m);
            z.px -= kKick[s] * dt * g.x;
            z.py -= kKick[s] * dt * g.y;
        }
    }
}

// Same map plus its linearization applied to every tangent vector.
template <class F>
void advance(const F& f, double m, double dt, PhasePoint& z, std::span<PhasePoint> tangents) {
    for (std::size_t s = 0; s < kDrift.size(); ++s) {
        const double h = kDrift[s] * dt / m;
        z.qx += h * z.px;
        z.qy += h * z.py;
        for (auto& v : tangents) {
            v.qx += h * v.px;
            v.qy += h * v.py;
        }
        if (kKick[s] != 0.0) {
            const Vec2 g = f.grad(z.q(), m);
            z.px -= kKick[s] * dt * g.x;
            z.py -= kKick[s] * dt * g.y;
            const models::Sym2 H = f.hess(z.q(), m);
            for (auto& v : tangents) {
                const Vec2 Hv = H * v.q();
                v.px -= kKick[s] * dt * Hv.x;
                v.py -= kKick[s] * dt * Hv.y;
            }
        }
    }
}

bool escaped(const PhasePoint& z, double radius) {
    return !z.finite() || std::hypot(z.qx, z.qy) > radius;
}

void check_step_args(double dt, long n_steps) {
    if (!(std::isfinite(dt) && dt > 0.0)) throw DomainError("dt must be positive and finite");
    if (n_steps < 1) throw DomainError("n_steps must be at least 1");
}

void check_start(const PhasePoint& z0) {
    if (!z0.finite()) throw DomainError("initial phase point is not finite");
}

double relative_drift(double e, double e0) {
    const double scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
    return std::abs(e - e0) / scale;
}

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

}  // namespace

double Trajectory::max_relative_energy_drift() const {
    double worst = 0.0;
    if (energy.empty()) return worst;
    for (double e : energy) worst = std::max(worst, relative_drift(e, energy.front()));
    return worst;
}

PhasePoint step(const HamiltonianModel& model, const PhasePoint& z, double dt) {
    PhasePoint out = z;
    std::visit([&](const auto& f) { advance(f, model.mass(), dt, out); }, model.family());
    return out;
}

Trajectory propagate(const HamiltonianModel& model, const PhasePoint& z0, double dt, long n_steps,
                     const PropagateOptions& opts) {
    check_step_args(dt, n_steps);
    check_start(z0);
    const int every = std::max(1, opts.sample_every);

    Trajectory traj;
    const auto n_samples = static_cast<std::size_t>(n_steps / every + 1);
    traj.t.reserve(n_samples);
    traj.z.reserve(n_samples);
    traj.energy.reserve(n_samples);

    const double e0 = models::total_energy(model, z0);
    traj.t.push_back(0.0);
    traj.z.push_back(z0);
    traj.energy.push_back(e0);

    std::visit(
        [&](const auto& f) {
            const double m = model.mass();
            PhasePoint z = z0;
            for (long n = 1; n <= n_steps; ++n) {
                const PhasePoint prev = z;
                advance(f, m, dt, z);
                if (escaped(z, opts.escape_radius)) {
                    throw EscapeError("orbit escaped the domain radius", static_cast<double>(n - 1) * dt,
                                      prev, std::move(traj));
                }
                if (n % every == 0) {
                    const double e = (z.px * z.px + z.py * z.py) / (2.0 * m) + f.V(z.q(), m);
                    traj.t.push_back(static_cast<double>(n) * dt);
                    traj.z.push_back(z);
                    traj.energy.push_back(e);
                    if (opts.energy_drift_bound && relative_drift(e, e0) > *opts.energy_drift_bound) {
                        throw EnergyDriftError("relative energy drift exceeded the configured bound");
                    }
                }
            }
        },
        model.family());
    return traj;
}

TangentSeries propagate_tangent(const HamiltonianModel& model, const PhasePoint& z0,
                                const PhasePoint& v0, double dt, long n_steps,
                                const PropagateOptions& opts) {
    check_step_args(dt, n_steps);
    check_start(z0);
    if (!(v0.finite() && v0.norm() > 0.0)) throw DomainError("tangent vector must be finite and non-zero");
    const int every = std::max(1, opts.sample_every);

    TangentSeries out;
    out.t.push_back(0.0);
    out.z.push_back(z0);
    out.v.push_back(v0);
    std::visit(
        [&](const auto& f) {
            PhasePoint z = z0;
            std::array<PhasePoint, 1> v{v0};
            for (long n = 1; n <= n_steps; ++n) {
                const PhasePoint prev = z;
                advance(f, model.mass(), dt, z, v);
                if (escaped(z, opts.escape_radius)) {
                    throw EscapeError("orbit escaped the domain radius", static_cast<double>(n - 1) * dt,
                                      prev);
                }
                if (n % every == 0) {
                    out.t.push_back(static_cast<double>(n) * dt);
                    out.z.push_back(z);
                    out.v.push_back(v[0]);
                }
            }
        },
        model.family());
    return out;
}

Matrix4 monodromy(const HamiltonianModel& model, const PhasePoint& z0, double dt, long n_steps) {
    check_step_args(dt, n_steps);
    check_start(z0);
    std::array<PhasePoint, 4> basis{PhasePoint{1, 0, 0, 0}, PhasePoint{0, 1, 0, 0},
                                    PhasePoint{0, 0, 1, 0}, PhasePoint{0, 0, 0, 1}};
    std::visit(
        [&](const auto& f) {
            PhasePoint z = z0;
            for (long n = 0; n < n_steps; ++n) advance(f, model.mass(), dt, z, basis);
        },
        model.family());

    Matrix4 m{};
    for (int c = 0; c < 4; ++c) {
        const auto& v = basis[static_cast<std::size_t>(c)];
        m[0][c] = v.qx;
        m[1][c] = v.qy;
        m[2][c] = v.px;
        m[3][c] = v.py;
    }
    return m;
}

double determinant(const Matrix4& in) {
    // Gaussian elimination with partial pivoting.
    Matrix4 a = in;
    double det = 1.0;
    for (int c = 0; c < 4; ++c) {
        int pivot = c;
        for (int r = c + 1; r < 4; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
        }
        if (a[pivot][c] == 0.0) return 0.0;
        if (pivot != c) {
            std::swap(a[pivot], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < 4; ++r) {
            const double factor = a[r][c] / a[c][c];
            for (int k = c; k < 4; ++k) a[r][k] -= factor * a[c][k];
        }
    }
    return det;
}

LyapunovEstimate max_lyapunov(const HamiltonianModel& model, const PhasePoint& z0, double dt,
                              double total_time, double renorm_interval, std::uint64_t seed,
                              double escape_radius) {
    check_step_args(dt, 1);
    check_start(z0);
    if (!(renorm_interval >= dt && total_time >= renorm_interval)) {
        throw DomainError("max_lyapunov requires total_time >= renorm_interval >= dt");
    }
    const long steps_per_renorm = std::max(1L, std::lround(renorm_interval / dt));
    const long n_renorm = std::max(1L, std::lround(total_time / (static_cast<double>(steps_per_renorm) * dt)));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    PhasePoint v0{normal(rng), normal(rng), normal(rng), normal(rng)};
    v0 = (1.0 / v0.norm()) * v0;

    LyapunovEstimate est;
    est.renorm_interval = static_cast<double>(steps_per_renorm) * dt;
    est.total_time = static_cast<double>(n_renorm) * est.renorm_interval;
    est.t.reserve(static_cast<std::size_t>(n_renorm));
    est.convergence.reserve(static_cast<std::size_t>(n_renorm));

    std::visit(
        [&](const auto& f) {
            PhasePoint z = z0;
            std::array<PhasePoint, 1> v{v0};
            double log_sum = 0.0;
            for (long r = 1; r <= n_renorm; ++r) {
                const PhasePoint prev = z;
                for (long n = 0; n < steps_per_renorm; ++n) advance(f, model.mass(), dt, z, v);
                if (escaped(z, escape_radius)) {
                    throw EscapeError("orbit escaped during Lyapunov estimation",
                                      static_cast<double>(r - 1) * est.renorm_interval, prev);
                }
                const double stretch = v[0].norm();
                log_sum += std::log(stretch);
                v[0] = (1.0 / stretch) * v[0];
                const double t = static_cast<double>(r) * est.renorm_interval;
                est.t.push_back(t);
                est.convergence.push_back(log_sum / t);
            }
        },
        model.family());
    est.lambda_max = est.convergence.back();
    return est;
}

DivergenceSeries divergence_integral(const HamiltonianModel& model, const PhasePoint& z0,
                                     const PhasePoint& delta_z, double dt, long n_steps,
                                     const PropagateOptions& opts) {
    check_step_args(dt, n_steps);
    check_start(z0);
    if (!delta_z.finite()) throw DomainError("delta_z must be finite");
    const int every = std::max(1, opts.sample_every);
    const double m = model.mass();

    DivergenceSeries s;
    s.mass = m;
    const auto n_samples = static_cast<std::size_t>(n_steps / every + 1);
    s.t.reserve(n_samples);
    s.D.reserve(n_samples);
    s.separation.reserve(n_samples);
    s.energy_drift.reserve(n_samples);
    s.delta.reserve(n_samples);
    s.reference.reserve(n_samples);

    std::visit(
        [&](const auto& f) {
            auto energy = [&](const PhasePoint& z) {
                return (z.px * z.px + z.py * z.py) / (2.0 * m) + f.V(z.q(), m);
            };
            PhasePoint a = z0;
            PhasePoint b = z0 + delta_z;
            const double ea0 = energy(a);
            const double eb0 = energy(b);

            auto sep2 = [](const PhasePoint& d) { return d.qx * d.qx + d.qy * d.qy; };
            auto dsep2 = [m](const PhasePoint& d) { return 2.0 * dot(d.q(), d.p()) / m; };

            PhasePoint d = b - a;
            double D = 0.0;
            s.t.push_back(0.0);
            s.D.push_back(0.0);
            s.separation.push_back(std::sqrt(sep2(d)));
            s.energy_drift.push_back(0.0);
            s.delta.push_back(d);
            s.reference.push_back(a);

            for (long n = 1; n <= n_steps; ++n) {
                const PhasePoint prev_a = a;
                advance(f, m, dt, a);
                advance(f, m, dt, b);
                if (escaped(a, opts.escape_radius) || escaped(b, opts.escape_radius)) {
                    throw EscapeError("orbit escaped during divergence integration",
                                      static_cast<double>(n - 1) * dt, prev_a);
                }
                const PhasePoint dn = b - a;
                const double inc = 0.5 * dt * (sep2(d) + sep2(dn)) +
                                   dt * dt / 12.0 * (dsep2(d) - dsep2(dn));
                D += std::max(inc, 0.0);
                d = dn;
                if (n % every == 0) {
                    const double drift =
                        std::max(relative_drift(energy(a), ea0), relative_drift(energy(b), eb0));
                    s.t.push_back(static_cast<double>(n) * dt);
                    s.D.push_back(D);
                    s.separation.push_back(std::sqrt(sep2(d)));
                    s.energy_drift.push_back(drift);
                    s.delta.push_back(d);
                    s.reference.push_back(a);
                    if (opts.energy_drift_bound && drift > *opts.energy_drift_bound) {
                        throw EnergyDriftError("relative energy drift exceeded the configured bound");
                    }
                }
            }
        },
        model.family());
    return s;
}

double tangent_crosscheck(const HamiltonianModel& model, const PhasePoint& z0,
                          const PhasePoint& delta_z, double dt, long n_steps, double scale,
                          double linear_fraction) {
    check_step_args(dt, n_steps);
    check_start(z0);
    if (!(delta_z.finite() && delta_z.norm() > 0.0)) throw DomainError("delta_z must be non-zero");
    double worst = 0.0;
    std::visit(
        [&](const auto& f) {
            PhasePoint a = z0;
            PhasePoint b = z0 + delta_z;
            std::array<PhasePoint, 1> v{delta_z};
            for (long n = 1; n <= n_steps; ++n) {
                advance(f, model.mass(), dt, a, v);
                advance(f, model.mass(), dt, b);
                const PhasePoint d = b - a;
                if (std::hypot(d.qx, d.qy) >= linear_fraction * scale) break;
                worst = std::max(worst, (d - v[0]).norm() / v[0].norm());
            }
        },
        model.family());
    return worst;
}

double position_extent(const Trajectory& traj) {
    if (traj.z.empty()) return 0.0;
    double xmin = traj.z.front().qx, xmax = xmin;
    double ymin = traj.z.front().qy, ymax = ymin;
    for (const auto& z : traj.z) {
        xmin = std::min(xmin, z.qx);
        xmax = std::max(xmax, z.qx);
        ymin = std::min(ymin, z.qy);
        ymax = std::max(ymax, z.qy);
    }
    return std::hypot(xmax - xmin, ymax - ymin);
}

double estimate_period(const Trajectory& traj) {
    auto crossings = [&](auto coord) {
        double mean = 0.0;
        for (const auto& z : traj.z) mean += coord(z);
        mean /= static_cast<double>(traj.z.size());
        std::vector<double> up;
        for (std::size_t i = 1; i < traj.z.size(); ++i) {
            const double a = coord(traj.z[i - 1]) - mean;
            const double b = coord(traj.z[i]) - mean;
            if (a < 0.0 && b >= 0.0) {
                up.push_back(traj.t[i - 1] + (traj.t[i] - traj.t[i - 1]) * (-a) / (b - a));
            }
        }
        return up;
    };
    auto up = crossings([](const PhasePoint& z) { return z.qx; });
    if (up.size() < 2) up = crossings([](const PhasePoint& z) { return z.qy; });
    if (up.size() < 2) throw DomainError("trajectory too short to estimate a period");
    return (up.back() - up.front()) / static_cast<double>(up.size() - 1);
}

}  // namespace decoh::classical

namespace decoh::classical {

EnsembleDivergence ensemble_divergence(const HamiltonianModel& model, const PhasePoint& z0,
                                       const PhasePoint& delta_z, double dt, long n_steps,
                                       int members, double spacing, const PropagateOptions& opts) {
    if (members < 1) throw DomainError("ensemble needs at least one member");
    if (!(spacing >= 0.0) || !std::isfinite(spacing)) throw DomainError("member spacing must be >= 0");
    check_step_args(dt, n_steps);

    EnsembleDivergence out;
    out.delta_norm = delta_z.norm();
    const long stride = std::lround(spacing / dt);
    PhasePoint start = z0;
    for (int k = 0; k < members; ++k) {
        if (k > 0) {
            for (long n = 0; n < stride; ++n) start = step(model, start, dt);
        }
        out.starts.push_back(start);
        const DivergenceSeries s = divergence_integral(model, start, delta_z, dt, n_steps, opts);
        if (k == 0) {
            out.t = s.t;
            out.mean_log_D.assign(s.t.size(), 0.0);
            out.mean_log_separation.assign(s.t.size(), 0.0);
            out.max_separation.assign(s.t.size(), 0.0);
        }
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            out.mean_log_D[i] += s.D[i] > 0.0 ? std::log(s.D[i]) : 0.0;
            out.mean_log_separation[i] += std::log(s.separation[i]);
            out.max_separation[i] = std::max(out.max_separation[i], s.separation[i]);
        }
    }
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        out.mean_log_D[i] /= members;
        out.mean_log_separation[i] /= members;
    }
    return out;
}

}  // namespace decoh::classical
