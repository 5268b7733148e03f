// decoherence.hpp: high-temperature decoherence exponent, the Hartree error functional
// and the regular-versus-chaotic comparison.

#pragma once

#include "decoh/bath.hpp"
#include "decoh/quantum_dynamics.hpp"
#include "decoh/scaling_fit.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace decoh::decoherence {

using bath::DriveDifference;

enum class GammaSource { Asymptotic, Oracle };

std::string_view to_string(GammaSource s);

struct DecoherenceSeries {
    std::vector<double> t;
    std::vector<double> gamma;  // −ln |⟨z₁|χ|z₂⟩|
    GammaSource source{GammaSource::Asymptotic};
};

// gamma(t) = (C T / 2) ∫₀ᵗ |Δf|² dτ with ħ = k_B = 1. Trapezoid rule, plus the endpoint
// derivative correction when the drive carries derivatives.
DecoherenceSeries asymptotic_exponent(const DriveDifference& dd, double C, double T);

DecoherenceSeries oracle_exponent(const bath::BathDiscretization& bath, const DriveDifference& dd,
                                  double T);

// Weight of the Hartree error average at u = τ/t.
double weight_w(double u, double omega_max_t);

// Below this ω_max t the error estimate is flagged.
inline constexpr double kHartreeOmegaFloor = 10.0;

struct HartreeErrorEstimate {
    double t{0.0};
    double value{0.0};
    double omega_max{0.0};
    std::optional<std::string> warning;
};

// (C/2π) t⁻¹ ∫₀ᵗ [var_qx + var_qy] w_t(τ) dτ by the trapezoid rule on the sample grid.
HartreeErrorEstimate hartree_error(const quantum::ExpectationSeries& varseries, double C,
                                   double omega_max, double t_eval);

struct RegimeComparison {
    std::vector<double> t;  // restricted to the common window
    std::vector<double> gamma_regular;
    std::vector<double> gamma_chaotic;
    std::vector<double> ratio;  // chaotic / regular; 1 where both vanish
    double window_end{0.0};
    std::optional<classical::ScalingClassification> fit_regular;
    std::optional<classical::ScalingClassification> fit_chaotic;
    std::optional<double> t_star;  // last upward crossing of gamma_chaotic − gamma_regular
    bool chaotic_dominates{false};
};

// Both series must share the grid. Each Ehrenfest window ends at its break time (the whole
// run when empty); the comparison uses the shorter one.
RegimeComparison compare_regimes(const DecoherenceSeries& regular, const DecoherenceSeries& chaotic,
                                 std::optional<double> regular_break = {},
                                 std::optional<double> chaotic_break = {});

}  // namespace decoh::decoherence
