// bath.hpp: ohmic oscillator reservoir with a hard cutoff, its mode discretization,
// driven coherent amplitudes and the exact thermal dephasing exponent.

#pragma once

#include "decoh/classical_dynamics.hpp"
#include "decoh/errors.hpp"
#include "decoh/quantum_dynamics.hpp"

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace decoh::bath {

using cplx = std::complex<double>;

// g(ω)|κ(ω)|² = (C/2π) ω on (0, omega_max].
struct SpectralDensity {
    double C{1.0};
    double omega_max{1.0};

    void validate() const;
    friend bool operator==(const SpectralDensity&, const SpectralDensity&) = default;
};

double spectral_weight(const SpectralDensity& sd, double omega);

struct BathMode {
    double omega{0.0};
    double weight{0.0};  // g(ω_j)|κ(ω_j)|² Δω
};

struct BathDiscretization {
    SpectralDensity density;
    std::vector<BathMode> modes;
    static constexpr int polarizations = 2;

    double total_weight() const;
};

// Midpoint rule: ω_j = (j - 1/2) omega_max / N.
BathDiscretization discretize_bath(const SpectralDensity& sd, long n_modes);

// Difference of the two position drives, ⟨q⟩(τ; z₂) - ⟨q⟩(τ; z₁), on a uniform grid.
// Time derivatives are optional; when present they sharpen the quadratures.
struct DriveDifference {
    std::vector<double> t;
    std::vector<double> df_x, df_y;
    std::vector<double> ddf_x, ddf_y;

    std::size_t size() const { return t.size(); }
    bool has_derivatives() const { return !ddf_x.empty(); }
    bool is_zero() const;
    // Throws GridMismatchError unless t is uniform, starts at 0 and all columns agree in length.
    double uniform_step() const;
};

DriveDifference drive_difference(const classical::Trajectory& first, const classical::Trajectory& second,
                                 double mass);
DriveDifference drive_difference(const classical::DivergenceSeries& series);
// Derivatives come from the momentum means when both series carry them.
DriveDifference drive_difference(const quantum::ExpectationSeries& first,
                                 const quantum::ExpectationSeries& second, double mass);

// α̇ = −iωα − iκ* f(t). The drive is taken piecewise linear between samples and each
// interval is integrated against the exact exponential.
std::vector<cplx> evolve_bath_amplitude(double omega, double kappa_mag, std::span<const double> t,
                                        std::span<const double> drive, cplx alpha0);

// 1/(e^{ω/T} − 1) in units ħ = k_B = 1.
double thermal_occupation(double omega, double T);

// Tr[ρ_th D(μ)] for one mode: exp(−|μ|²(n̄ + 1/2)).
double thermal_displacement_factor(double omega, double T, cplx mu);

// −ln |coherence factor| summed mode by mode over both polarizations.
std::vector<double> decoherence_exponent_oracle(const BathDiscretization& bath,
                                                const DriveDifference& dd, double T);

}  // namespace decoh::bath
