#include "decoh/bath.hpp"

#include <cmath>
#include <numbers>

namespace decoh::bath {

namespace {

// h ∫₀¹ e^{iθs} [(1−s) f0 + s f1] ds = h (A f0 + B f1)
struct FilonWeights {
    cplx A;
    cplx B;
};

FilonWeights filon(double theta) {
    if (std::abs(theta) < 0.1) {
        // power series; 12 terms are far below roundoff for |θ| < 0.1
        cplx e0{0.0, 0.0}, b{0.0, 0.0}, ak{1.0, 0.0};
        double fact = 1.0;
        for (int k = 0; k < 12; ++k) {
            if (k > 0) {
                ak *= cplx{0.0, theta};
                fact *= k;
            }
            e0 += ak / (fact * (k + 1));
            b += ak / (fact * (k + 2));
        }
        return {e0 - b, b};
    }
    const cplx a{0.0, theta};
    const cplx ea = std::exp(a);
    const cplx e0 = (ea - 1.0) / a;
    const cplx b = ea / a - (ea - 1.0) / (a * a);
    return {e0 - b, b};
}

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

void SpectralDensity::validate() const {
    require(std::isfinite(C) && C > 0.0, "bath coupling C must be > 0");
    require(std::isfinite(omega_max) && omega_max > 0.0, "bath cutoff omega_max must be > 0");
}

double spectral_weight(const SpectralDensity& sd, double omega) {
    if (!(omega > 0.0) || omega > sd.omega_max) return 0.0;
    return sd.C / (2.0 * std::numbers::pi) * omega;
}

double BathDiscretization::total_weight() const {
    double s = 0.0;
    for (const auto& m : modes) s += m.weight;
    return s;
}

BathDiscretization discretize_bath(const SpectralDensity& sd, long n_modes) {
    sd.validate();
    if (n_modes < 2) throw DomainError("bath needs at least 2 modes");
    BathDiscretization b;
    b.density = sd;
    b.modes.reserve(static_cast<std::size_t>(n_modes));
    const double dw = sd.omega_max / static_cast<double>(n_modes);
    for (long j = 1; j <= n_modes; ++j) {
        const double w = (static_cast<double>(j) - 0.5) * dw;
        b.modes.push_back({w, spectral_weight(sd, w) * dw});
    }
    return b;
}

bool DriveDifference::is_zero() const {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (df_x[i] != 0.0 || df_y[i] != 0.0) return false;
    }
    return true;
}

double DriveDifference::uniform_step() const {
    const std::size_t n = t.size();
    if (df_x.size() != n || df_y.size() != n) throw GridMismatchError("drive columns differ in length");
    if (has_derivatives() && (ddf_x.size() != n || ddf_y.size() != n)) {
        throw GridMismatchError("drive derivative columns differ in length");
    }
    if (n < 2) throw GridMismatchError("drive needs at least two samples");
    if (t.front() != 0.0) throw GridMismatchError("drive grid must start at t = 0");
    const double h = t[1] - t[0];
    if (!(h > 0.0)) throw GridMismatchError("drive grid must increase");
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * h + 1e-12 * std::abs(t[i])) {
            throw GridMismatchError("drive grid is not uniform");
        }
    }
    return h;
}

DriveDifference drive_difference(const classical::Trajectory& first, const classical::Trajectory& second,
                                 double mass) {
    if (first.t != second.t) throw GridMismatchError("trajectories are sampled on different grids");
    DriveDifference d;
    d.t = first.t;
    const std::size_t n = first.t.size();
    d.df_x.resize(n);
    d.df_y.resize(n);
    d.ddf_x.resize(n);
    d.ddf_y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto dz = second.z[i] - first.z[i];
        d.df_x[i] = dz.qx;
        d.df_y[i] = dz.qy;
        d.ddf_x[i] = dz.px / mass;
        d.ddf_y[i] = dz.py / mass;
    }
    return d;
}

DriveDifference drive_difference(const classical::DivergenceSeries& series) {
    DriveDifference d;
    d.t = series.t;
    const std::size_t n = series.t.size();
    if (series.delta.size() != n) throw GridMismatchError("divergence series lacks separation vectors");
    d.df_x.resize(n);
    d.df_y.resize(n);
    d.ddf_x.resize(n);
    d.ddf_y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.df_x[i] = series.delta[i].qx;
        d.df_y[i] = series.delta[i].qy;
        d.ddf_x[i] = series.delta[i].px / series.mass;
        d.ddf_y[i] = series.delta[i].py / series.mass;
    }
    return d;
}

DriveDifference drive_difference(const quantum::ExpectationSeries& first,
                                 const quantum::ExpectationSeries& second, double mass) {
    if (first.t != second.t) throw GridMismatchError("expectation series are sampled on different grids");
    DriveDifference d;
    d.t = first.t;
    const std::size_t n = first.t.size();
    d.df_x.resize(n);
    d.df_y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.df_x[i] = second.mean_qx[i] - first.mean_qx[i];
        d.df_y[i] = second.mean_qy[i] - first.mean_qy[i];
    }
    if (first.has_momentum() && second.has_momentum()) {
        d.ddf_x.resize(n);
        d.ddf_y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            d.ddf_x[i] = (second.mean_px[i] - first.mean_px[i]) / mass;
            d.ddf_y[i] = (second.mean_py[i] - first.mean_py[i]) / mass;
        }
    }
    return d;
}

std::vector<cplx> evolve_bath_amplitude(double omega, double kappa_mag, std::span<const double> t,
                                        std::span<const double> drive, cplx alpha0) {
    DriveDifference grid;
    grid.t.assign(t.begin(), t.end());
    grid.df_x.assign(drive.begin(), drive.end());
    grid.df_y.assign(drive.size(), 0.0);
    const double h = grid.uniform_step();
    require(std::isfinite(omega) && omega > 0.0, "mode frequency must be > 0");

    const FilonWeights fw = filon(omega * h);
    const cplx rot = std::exp(cplx{0.0, -omega * h});
    std::vector<cplx> alpha(t.size());
    cplx integral{0.0, 0.0};
    alpha[0] = alpha0;
    for (std::size_t n = 1; n < t.size(); ++n) {
        // ∫ e^{−iω(t_n−τ)} f dτ over the last step is h e^{−iθ} (A f0 + B f1)
        integral = rot * integral + h * rot * (fw.A * drive[n - 1] + fw.B * drive[n]);
        alpha[n] = std::exp(cplx{0.0, -omega * t[n]}) * alpha0 - cplx{0.0, kappa_mag} * integral;
    }
    return alpha;
}

double thermal_occupation(double omega, double T) {
    if (!(T > 0.0)) throw DomainError("temperature must be > 0");
    return 1.0 / std::expm1(omega / T);
}

double thermal_displacement_factor(double omega, double T, cplx mu) {
    return std::exp(-std::norm(mu) * (thermal_occupation(omega, T) + 0.5));
}

std::vector<double> decoherence_exponent_oracle(const BathDiscretization& bath, const DriveDifference& dd,
                                                double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("temperature must be > 0");
    const double h = dd.uniform_step();
    const std::size_t n = dd.size();
    std::vector<double> gamma(n, 0.0);
    for (const auto& mode : bath.modes) {
        const double strength = mode.weight * (thermal_occupation(mode.omega, T) + 0.5);
        const FilonWeights fw = filon(mode.omega * h);
        const cplx step_rot = std::exp(cplx{0.0, mode.omega * h});
        cplx phase{1.0, 0.0};
        cplx sx{0.0, 0.0}, sy{0.0, 0.0};
        for (std::size_t i = 1; i < n; ++i) {
            sx += h * phase * (fw.A * dd.df_x[i - 1] + fw.B * dd.df_x[i]);
            sy += h * phase * (fw.A * dd.df_y[i - 1] + fw.B * dd.df_y[i]);
            // exact phase every 64 steps keeps the recurrence from drifting
            phase = (i % 64 == 0) ? std::exp(cplx{0.0, mode.omega * dd.t[i]}) : phase * step_rot;
            gamma[i] += strength * (std::norm(sx) + std::norm(sy));
        }
    }
    return gamma;
}

}  // namespace decoh::bath
