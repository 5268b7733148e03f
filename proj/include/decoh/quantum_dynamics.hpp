// quantum_dynamics.hpp: grid wavepackets evolved by the bare system Hamiltonian with a
// second-order Fourier split-step scheme.

#pragma once

#include "decoh/classical_dynamics.hpp"
#include "decoh/errors.hpp"
#include "decoh/models.hpp"

#include <complex>
#include <filesystem>
#include <optional>
#include <vector>

namespace decoh::quantum {

using cplx = std::complex<double>;
using models::HamiltonianModel;
using models::PhasePoint;

// Periodic box of nx × ny points centred on (cx, cy). Storage is row-major, index iy*nx + ix.
struct Grid2D {
    int nx{128};
    int ny{128};
    double Lx{20.0};
    double Ly{20.0};
    double hbar{1.0};
    double cx{0.0};
    double cy{0.0};

    double dx() const { return Lx / nx; }
    double dy() const { return Ly / ny; }
    double cell_area() const { return dx() * dy(); }
    double x(int i) const { return cx - 0.5 * Lx + i * dx(); }
    double y(int j) const { return cy - 0.5 * Ly + j * dy(); }
    double kx(int i) const;
    double ky(int j) const;
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

    // Throws DomainError unless nx, ny are powers of two >= 64 and lengths, hbar positive.
    void validate() const;

    friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

struct WavepacketState {
    Grid2D grid;
    std::vector<cplx> psi;
    double t{0.0};

    double norm() const;
};

struct ExpectationSeries {
    std::vector<double> t;
    std::vector<double> mean_qx, mean_qy;
    std::vector<double> var_qx, var_qy;
    // Spectral momentum moments; empty when momentum sampling is disabled.
    std::vector<double> mean_px, mean_py;
    std::vector<double> var_px, var_py;
    std::vector<double> norm;
    std::vector<double> energy;
    std::vector<double> edge_probability;
    double hbar{1.0};

    std::size_t size() const { return t.size(); }
    bool has_momentum() const { return !var_px.empty(); }
};

class WavepacketError : public Error {
public:
    WavepacketError(const std::string& what, ExpectationSeries partial)
        : Error(what), partial_(std::move(partial)) {}
    const ExpectationSeries& partial() const noexcept { return partial_; }

private:
    ExpectationSeries partial_;
};

struct BoundaryLeakError : WavepacketError {
    using WavepacketError::WavepacketError;
};

struct NormDriftError : WavepacketError {
    using WavepacketError::WavepacketError;
};

struct WavepacketOptions {
    double edge_tolerance{1.0e-10};  // probability allowed in the boundary strip
    int edge_cells{4};               // strip width in grid cells
    double norm_tolerance{1.0e-8};
    bool sample_momentum{true};
};

// Minimum-uncertainty Gaussian with position standard deviations (σx, σy), centred at
// (z.qx, z.qy) with mean momentum (z.px, z.py). Normalized on the grid.
WavepacketState init_gaussian(const Grid2D& grid, const PhasePoint& z, double sigma_x, double sigma_y);

// Evolves `state` in place (the final state is left there) and returns moments sampled at
// t = 0 and every `sample_every` steps.
ExpectationSeries propagate_wavepacket(WavepacketState& state, const HamiltonianModel& model, double dt,
                                       long n_steps, int sample_every,
                                       const WavepacketOptions& opts = {});

// Moments of a single state; momentum moments included when requested.
ExpectationSeries measure(const WavepacketState& state, const HamiltonianModel& model,
                          bool with_momentum = true);

// First sampled time at which |<q>(t) - q_classical(t)| exceeds `threshold`, linearly
// interpolated between samples. The classical orbit is resampled onto the quantum times
// by cubic Hermite interpolation (velocities from the momenta). Empty if no break occurs.
std::optional<double> ehrenfest_break_time(const ExpectationSeries& qseries,
                                           const classical::Trajectory& traj, double mass,
                                           double threshold);

// Largest |<q>(t) - q_classical(t)| over the quantum samples.
double max_ehrenfest_deviation(const ExpectationSeries& qseries, const classical::Trajectory& traj,
                               double mass);

// Writes `<base>.bin` (row-major little-endian real/imag float64 pairs) and `<base>.hdr`.
void write_snapshot(const WavepacketState& state, const std::filesystem::path& base);

}  // namespace decoh::quantum
