// scaling_fit.hpp: power-law versus exponential growth classification

#pragma once

#include "decoh/classical_dynamics.hpp"

#include <span>
#include <string_view>

namespace decoh::classical {

enum class ScalingKind { PowerLaw, Exponential };

std::string_view to_string(ScalingKind kind);

struct FitWindow {
    double t_lo{0.0};
    double t_hi{0.0};
};

struct ScalingFit {
    ScalingKind kind{ScalingKind::PowerLaw};
    double exponent_or_rate{0.0};
    double log_prefactor{0.0};  // intercept of the linearized fit
    double r_squared{0.0};
    FitWindow window;
    std::size_t samples{0};
};

struct ScalingClassification {
    ScalingFit best;
    ScalingFit power_law;    // log D = c + k log t
    ScalingFit exponential;  // ln D = c + r t
    bool ambiguous{false};   // r² values closer than the tie margin
};

inline constexpr std::size_t kMinFitSamples = 20;
inline constexpr double kTieMargin = 0.01;

// Least-squares fits over samples with t_lo <= t <= t_hi, t > 0 and D > 0.
ScalingClassification classify_scaling(std::span<const double> t, std::span<const double> D,
                                       FitWindow window);
ScalingClassification classify_scaling(const DivergenceSeries& series, FitWindow window);

// Regular orbits: start after `transient_periods` natural periods, run to the end.
FitWindow regular_fit_window(const DivergenceSeries& series, double period,
                             double transient_periods = 5.0);

// Chaotic orbits: end before the separation first exceeds `saturation_fraction` of the
// shell diameter; start once the position separation has grown to `growth_before_fit`
// times the initial phase-space offset |δz| so the linear start-up is excluded.
FitWindow chaotic_fit_window(const DivergenceSeries& series, double shell_diameter,
                             double saturation_fraction = 0.1, double growth_before_fit = 10.0);

// Exponential fit of the ensemble mean of ln D. The window opens once the mean separation
// has grown by `growth_before_fit` and closes before the first member saturates.
FitWindow ensemble_fit_window(const EnsembleDivergence& ens, double shell_diameter,
                              double saturation_fraction = 0.1, double growth_before_fit = 10.0);
ScalingFit ensemble_rate(const EnsembleDivergence& ens, FitWindow window);

}  // namespace decoh::classical
