// config.hpp: experiment configuration, loaded from a versioned JSON document

#pragma once

#include "decoh/bath.hpp"
#include "decoh/errors.hpp"
#include "decoh/models.hpp"
#include "decoh/quantum_dynamics.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace decoh::harness {

inline constexpr int kSchemaVersion = 1;

enum class Engine { Classical, Quantum, Both };

std::string_view to_string(Engine e);
std::optional<Engine> parse_engine(std::string_view s);

struct ModelSpec {
    std::string family{"HenonHeiles"};
    std::map<std::string, double> params;
    double mass{1.0};

    // Throws DomainError or ValidationError.
    models::HamiltonianModel build() const;
    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct IntegratorSpec {
    double dt{0.01};
    long n_steps{10000};
    int sample_every{1};
    double escape_radius{1.0e3};
    std::optional<double> energy_drift_bound;

    double sample_interval() const { return dt * sample_every; }
    friend bool operator==(const IntegratorSpec&, const IntegratorSpec&) = default;
};

struct LyapunovSpec {
    bool enabled{true};
    std::optional<double> dt;  // integrator dt when empty
    double total_time{1.0e4};
    double renorm_interval{1.0};
    friend bool operator==(const LyapunovSpec&, const LyapunovSpec&) = default;
};

struct QuantumSpec {
    quantum::Grid2D grid;
    std::optional<double> sigma_x, sigma_y;  // sqrt(hbar / 2m) when empty
    double dt{0.005};
    long n_steps{1000};
    int sample_every{5};
    double edge_tolerance{1.0e-10};
    double norm_tolerance{1.0e-8};
    bool pair{true};  // also propagate the packet at z + δz for a quantum drive difference
    double break_fraction{0.05};

    double sample_interval() const { return dt * sample_every; }
    friend bool operator==(const QuantumSpec&, const QuantumSpec&) = default;
};

struct BathSpec {
    bath::SpectralDensity density{1.0, 10.0};
    long n_modes{10000};
    double T{1000.0};
    bool oracle{true};
    friend bool operator==(const BathSpec&, const BathSpec&) = default;
};

enum class Expectation { None, Regular, Chaotic };

struct FitSpec {
    double transient_periods{5.0};
    double saturation_fraction{0.1};
    double growth_before_fit{10.0};
    int ensemble_members{0};  // 0: single pair only
    double ensemble_spacing{50.0};
    long ensemble_steps{0};    // integrator n_steps when 0
    double shell_time{1000.0}; // orbit length used for the shell diameter and period
    Expectation expect{Expectation::None};
    friend bool operator==(const FitSpec&, const FitSpec&) = default;
};

struct ExperimentConfig {
    int schema_version{kSchemaVersion};
    std::string name{"experiment"};
    std::uint64_t seed{0};
    ModelSpec model;
    models::PhasePoint z;
    models::PhasePoint delta_z;
    IntegratorSpec integrator;
    LyapunovSpec lyapunov;
    QuantumSpec quantum;
    BathSpec bath;
    FitSpec fit;
    Engine engine{Engine::Classical};
    std::complex<double> c1{1.0, 0.0}, c2{1.0, 0.0};  // superposition weights, carried as metadata
    std::string output_dir;                           // empty: environment default

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Parse and validate; throws ValidationError listing every problem (parse errors carry
// line and column).
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON with all defaults filled in; parse_config(to_json(c)) == c.
std::string to_json(const ExperimentConfig& c);

// Every constraint violation of an already-built config; empty when valid.
std::vector<std::string> validate(const ExperimentConfig& c);

}  // namespace decoh::harness
