// Independent reference computations for the tests. Nothing here calls the code under test
// except to read model parameters.

#pragma once

#include "decoh/models.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_expint.h>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using decoh::models::HamiltonianModel;
using decoh::models::PhasePoint;
using decoh::models::Vec2;

// Central differences of the potential.
inline Vec2 fd_grad(const std::function<double(Vec2)>& V, Vec2 q, double h = 1e-5) {
    return {(V({q.x + h, q.y}) - V({q.x - h, q.y})) / (2 * h), (V({q.x, q.y + h}) - V({q.x, q.y - h})) / (2 * h)};
}

inline std::array<double, 3> fd_hess(const std::function<double(Vec2)>& V, Vec2 q, double h = 1e-4) {
    const double c = V(q);
    const double xx = (V({q.x + h, q.y}) - 2 * c + V({q.x - h, q.y})) / (h * h);
    const double yy = (V({q.x, q.y + h}) - 2 * c + V({q.x, q.y - h})) / (h * h);
    const double xy = (V({q.x + h, q.y + h}) - V({q.x + h, q.y - h}) - V({q.x - h, q.y + h}) + V({q.x - h, q.y - h})) /
                      (4 * h * h);
    return {xx, xy, yy};
}

// Classical fourth-order Runge-Kutta with a caller-supplied force; not symplectic, used only
// as an independent reference over short times.
inline PhasePoint rk4(const std::function<Vec2(Vec2)>& force, double m, PhasePoint z, double dt, long n) {
    auto f = [&](const PhasePoint& s) {
        const Vec2 F = force(s.q());
        return PhasePoint{s.px / m, s.py / m, F.x, F.y};
    };
    for (long i = 0; i < n; ++i) {
        const PhasePoint k1 = f(z);
        const PhasePoint k2 = f(z + 0.5 * dt * k1);
        const PhasePoint k3 = f(z + 0.5 * dt * k2);
        const PhasePoint k4 = f(z + dt * k3);
        z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return z;
}

// x(t) for the oscillator m ẍ = −m ω² x.
inline double harmonic_x(double x0, double p0, double omega, double m, double t) {
    return x0 * std::cos(omega * t) + p0 / (m * omega) * std::sin(omega * t);
}

// ∫₀ᵗ |δp τ/m|² dτ for free motion started with a pure momentum offset.
inline double free_divergence(double dp, double m, double t) { return dp * dp * t * t * t / (3.0 * m * m); }

// Free Gaussian: σ(t)² = σ0² + (ħ t / (2 m σ0))².
inline double free_variance(double sigma0, double hbar, double m, double t) {
    const double s = hbar * t / (2.0 * m * sigma0);
    return sigma0 * sigma0 + s * s;
}

// Σ_n p_n ⟨n|D(μ)|n⟩ with p_n thermal, ⟨n|D(μ)|n⟩ = e^{−|μ|²/2} L_n(|μ|²).
inline double thermal_displacement_bruteforce(double nbar, double mu2, int n_max) {
    const double q = nbar / (1.0 + nbar);
    double sum = 0.0;
    double pn = 1.0 - q;
    for (int n = 0; n <= n_max; ++n) {
        sum += pn * std::exp(-0.5 * mu2) * std::laguerre(static_cast<unsigned>(n), mu2);
        pn *= q;
    }
    return sum;
}

// ∫₀¹ w(u) du = 2 ∫₀^Ω (1 − cos x)/x dx = 2 [ln Ω + γ − Ci(Ω)].
inline double w_integral_closed(double Omega) {
    return 2.0 * (std::log(Omega) + std::numbers::egamma - gsl_sf_Ci(Omega));
}

// Continuum, T → ∞ limit of the oracle divided by T, for constant drive d over [0, t]:
// (C/2π) ∫₀^{ω_max} 4 d² sin²(ωt/2)/ω² dω = (C/2π) 2 d² t [Si(Ω) − (1 − cos Ω)/Ω].
inline double cutoff_limit_constant(double C, double d, double t, double omega_max) {
    const double Om = omega_max * t;
    return C / (2.0 * std::numbers::pi) * 2.0 * d * d * t * (gsl_sf_Si(Om) - (1.0 - std::cos(Om)) / Om);
}

// Same limit for the drive d cos τ, by adaptive quadrature of |s(ω)|².
inline double cutoff_limit_harmonic(double C, double d, double t, double omega_max) {
    struct P {
        double d, t;
    } p{d, t};
    auto integrand = [](double w, void* vp) {
        const auto* pp = static_cast<P*>(vp);
        const std::complex<double> I{0.0, 1.0};
        auto piece = [&](double a) {
            if (std::abs(a) < 1e-8) return std::complex<double>(pp->t, 0.0);
            return (std::exp(I * a * pp->t) - 1.0) / (I * a);
        };
        const auto s = 0.5 * pp->d * (piece(w + 1.0) + piece(w - 1.0));
        return std::norm(s);
    };
    gsl_function F{integrand, &p};
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(20000);
    double result = 0.0, err = 0.0;
    gsl_integration_qag(&F, 0.0, omega_max, 0.0, 1e-12, 20000, GSL_INTEG_GAUSS61, ws, &result, &err);
    gsl_integration_workspace_free(ws);
    return C / (2.0 * std::numbers::pi) * result;
}

// Root of f on [a, b] by bisection.
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
    double fa = f(a);
    for (int i = 0; i < 200 && b - a > tol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Single mode, constant drive d: w (n̄ + ½) d² 4 sin²(ωt/2)/ω².
inline double single_mode_constant(double weight, double omega, double T, double d, double t) {
    const double nbar = 1.0 / (std::exp(omega / T) - 1.0);
    const double s = std::sin(0.5 * omega * t);
    return weight * (nbar + 0.5) * d * d * 4.0 * s * s / (omega * omega);
}

}  // namespace oracle
