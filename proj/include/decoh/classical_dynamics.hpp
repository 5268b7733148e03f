// classical_dynamics.hpp: symplectic orbits, tangent maps, Lyapunov exponents and
// the accumulated squared separation of two adjacent orbits.

#pragma once

#include "decoh/errors.hpp"
#include "decoh/models.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace decoh::classical {

using models::HamiltonianModel;
using models::PhasePoint;
using models::Vec2;

struct PropagateOptions {
    int sample_every{1};
    double escape_radius{1.0e3};               // |q| beyond this aborts the run
    std::optional<double> energy_drift_bound;  // relative; unchecked when empty
};

struct Trajectory {
    std::vector<double> t;
    std::vector<PhasePoint> z;
    std::vector<double> energy;

    double sample_dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
    // max_t |E(t) - E(0)| / |E(0)|; absolute drift when E(0) == 0.
    double max_relative_energy_drift() const;
};

class EscapeError : public Error {
public:
    EscapeError(const std::string& what, double time, PhasePoint last_valid, Trajectory partial = {})
        : Error(what), time_(time), last_valid_(last_valid), partial_(std::move(partial)) {}

    double time() const noexcept { return time_; }
    const PhasePoint& last_valid() const noexcept { return last_valid_; }
    const Trajectory& partial() const noexcept { return partial_; }

private:
    double time_;
    PhasePoint last_valid_;
    Trajectory partial_;
};

struct EnergyDriftError : Error {
    using Error::Error;
};

// One step of the fourth-order symmetric symplectic Runge-Kutta-Nystrom map.
PhasePoint step(const HamiltonianModel& model, const PhasePoint& z, double dt);

Trajectory propagate(const HamiltonianModel& model, const PhasePoint& z0, double dt, long n_steps,
                     const PropagateOptions& opts = {});

struct TangentSeries {
    std::vector<double> t;
    std::vector<PhasePoint> z;  // reference orbit
    std::vector<PhasePoint> v;  // tangent vector
};

// The tangent vector is advanced with the exact linearization of the discrete map,
// so the accumulated monodromy is symplectic to roundoff.
TangentSeries propagate_tangent(const HamiltonianModel& model, const PhasePoint& z0,
                                const PhasePoint& v0, double dt, long n_steps,
                                const PropagateOptions& opts = {});

using Matrix4 = std::array<std::array<double, 4>, 4>;

// Jacobian of the n-step map at z0, columns ordered (qx, qy, px, py).
Matrix4 monodromy(const HamiltonianModel& model, const PhasePoint& z0, double dt, long n_steps);
double determinant(const Matrix4& m);

struct LyapunovEstimate {
    double lambda_max{0.0};
    std::vector<double> t;            // renormalization times
    std::vector<double> convergence;  // running estimate at each renormalization
    double renorm_interval{0.0};
    double total_time{0.0};
};

// Renormalized-tangent (Benettin) estimate of the largest Lyapunov exponent. The seed
// fixes the random initial tangent direction.
LyapunovEstimate max_lyapunov(const HamiltonianModel& model, const PhasePoint& z0, double dt,
                              double total_time, double renorm_interval, std::uint64_t seed,
                              double escape_radius = 1.0e3);

struct DivergenceSeries {
    std::vector<double> t;
    std::vector<double> D;             // ∫₀ᵗ |q(τ; z+δz) - q(τ; z)|² dτ
    std::vector<double> separation;    // |Δq(t)|
    std::vector<double> energy_drift;  // worse of the two orbits, relative
    std::vector<PhasePoint> delta;     // z(t; z+δz) - z(t; z)
    std::vector<PhasePoint> reference; // z(t; z)
    double mass{1.0};
};

// Propagates both orbits with the same stepper. The quadrature is the trapezoid rule with
// the endpoint derivative correction, using d|Δq|²/dt = 2 Δq·Δp / m from the momenta.
DivergenceSeries divergence_integral(const HamiltonianModel& model, const PhasePoint& z0,
                                     const PhasePoint& delta_z, double dt, long n_steps,
                                     const PropagateOptions& opts = {});

// Divergence integrals of `members` adjacent pairs whose reference points are taken along
// the orbit of z0 every `spacing` time units. A single chaotic pair fluctuates strongly, so
// growth rates are read off the mean of ln D over the members.
struct EnsembleDivergence {
    std::vector<double> t;
    std::vector<double> mean_log_D;           // mean over members of ln D (−inf excluded at t = 0)
    std::vector<double> mean_log_separation;  // mean over members of ln |Δq|
    std::vector<double> max_separation;       // largest member |Δq|
    std::vector<PhasePoint> starts;
    double delta_norm{0.0};
};

EnsembleDivergence ensemble_divergence(const HamiltonianModel& model, const PhasePoint& z0,
                                       const PhasePoint& delta_z, double dt, long n_steps,
                                       int members, double spacing,
                                       const PropagateOptions& opts = {});

// Largest |Δz(t) - v(t)| / |v(t)| while |Δq| stays below `linear_fraction * scale`, where
// v is the tangent vector started at δz. Small values confirm the finite δz is in the linear
// regime.
double tangent_crosscheck(const HamiltonianModel& model, const PhasePoint& z0,
                          const PhasePoint& delta_z, double dt, long n_steps, double scale,
                          double linear_fraction = 1.0e-3);

// Diagonal of the bounding box of the visited positions.
double position_extent(const Trajectory& traj);

// Mean interval between successive upward crossings of the qx mean (qy if qx is idle).
double estimate_period(const Trajectory& traj);

}  // namespace decoh::classical
