// harness.hpp: run orchestration, persistence and the regular-versus-chaotic comparison

#pragma once

#include "decoh/config.hpp"
#include "decoh/decoherence.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace decoh::harness {

// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "DECOH_RUNS_DIR";

enum Stage : unsigned {
    kPropagate = 1u << 0,
    kLyapunov = 1u << 1,
    kDivergence = 1u << 2,
    kDecohere = 1u << 3,
    kAllStages = kPropagate | kLyapunov | kDivergence | kDecohere,
};

struct RunOptions {
    unsigned stages{kAllStages};
    std::optional<std::filesystem::path> out_root;  // beats config.output_dir and the environment
    std::optional<std::filesystem::path> run_dir;   // exact directory, bypassing the naming scheme
    std::optional<std::string> timestamp;           // fixed stamp for the directory name
};

struct ManifestEntry {
    std::string file;  // relative to the run directory
    std::string sha256;
    std::uintmax_t bytes{0};
};

struct ToleranceCheck {
    std::string name;
    double value{0.0};
    double target{0.0};
    double tolerance{0.0};
    bool pass{false};
};

struct RunRecord {
    std::filesystem::path dir;
    ExperimentConfig config;
    std::vector<ManifestEntry> manifest;
    nlohmann::json results = nlohmann::json::object();
    std::vector<ToleranceCheck> tolerances;
    std::vector<std::string> errors;  // captured module failures; outputs written so far are kept
    double wall_seconds{0.0};

    // in-memory results used by the comparison
    std::optional<decoherence::DecoherenceSeries> gamma_classical;
    std::optional<decoherence::DecoherenceSeries> gamma_quantum;
    std::optional<double> break_time;
    std::optional<double> lambda;

    bool partial() const { return !errors.empty(); }
    bool all_pass() const;
};

std::filesystem::path default_output_root();

RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Raised when two configs violate a comparison matching rule; each rule is named.
struct MismatchError : ValidationError {
    using ValidationError::ValidationError;
};

std::vector<std::string> matching_problems(const ExperimentConfig& regular, const ExperimentConfig& chaotic);

struct ComparisonRecord {
    std::filesystem::path dir;
    std::optional<RunRecord> regular;
    std::optional<RunRecord> chaotic;
    decoherence::RegimeComparison comparison;
    std::string engine;
    std::vector<ManifestEntry> manifest;
    nlohmann::json report = nlohmann::json::object();
};

ComparisonRecord compare_command(const ExperimentConfig& regular, const ExperimentConfig& chaotic,
                                 const RunOptions& options = {});

// Test hook: compares injected gamma series directly and writes the same report.
ComparisonRecord compare_injected(const decoherence::DecoherenceSeries& regular,
                                  const decoherence::DecoherenceSeries& chaotic,
                                  std::optional<double> regular_break, std::optional<double> chaotic_break,
                                  const std::filesystem::path& dir);

// Lowercase hex SHA-256 of a file.
std::string sha256_file(const std::filesystem::path& path);

// 17 significant digits, '.' decimal point.
std::string format_number(double v);

}  // namespace decoh::harness
