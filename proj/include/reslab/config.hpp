#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reslab/nonlinearity.hpp"
#include "reslab/operator.hpp"
#include "reslab/potential.hpp"
#include "reslab/solve.hpp"

namespace reslab::cli {

struct WellConfig {
    std::string shape = "square";  ///< "square" or "gaussian"
    double depth = 0.0;
    double radius = 1.0;
    std::vector<double> center;
    friend bool operator==(const WellConfig&, const WellConfig&) = default;
};

/// Everything an experiment needs. Parsed from TOML with unknown keys rejected.
struct ExperimentConfig {
    std::uint64_t seed = 20240917;

    struct Nonlinearity {
        std::string kind = "log";  ///< log | linear | zero
        double alpha = 1.0;              ///< log: g(t) = -alpha sign(t) ln(1 + |t|)
        double slope = 0.0;              ///< linear
        friend bool operator==(const Nonlinearity&, const Nonlinearity&) = default;
    } nonlinearity;

    struct Potential {
        double sigma0 = 0.0;
        std::vector<WellConfig> wells;
        friend bool operator==(const Potential&, const Potential&) = default;
    } potential;

    struct GridParams {
        int dim = 1;
        double half_width = 20.0;
        int points = 999;
        friend bool operator==(const GridParams&, const GridParams&) = default;
    } grid;

    struct Solver {
        double tolerance = 1e-9;
        int max_iterations = 60;
        std::string eigen_method = "auto";  ///< auto | iterative | dense
        double eigen_tolerance = 1e-9;
        double morse_tolerance = 1e-8;
        int k = 3;
        friend bool operator==(const Solver&, const Solver&) = default;
    } solver;

    struct Continuation {
        double lambda_start = -0.2;
        double lambda_end = 0.0;
        int steps = 40;
        double amplitude = 4.0;  ///< seed = amplitude · ψ_k
        friend bool operator==(const Continuation&, const Continuation&) = default;
    } continuation;

    struct Probe {
        double lambda = -0.5;
        int trials = 50;
        std::optional<double> alpha;  ///< overrides nonlinearity.alpha for the probe
        friend bool operator==(const Probe&, const Probe&) = default;
    } probe;

    struct Output {
        std::string directory;  ///< empty: RESLAB_OUTPUT_DIR or ./reslab_out
        bool vectors = false;   ///< dump eigenvectors / states as CSV
        friend bool operator==(const Output&, const Output&) = default;
    } output;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// The bundled scenario: one square well (depth 10, radius 1.4) with three bound
/// states, example nonlinearity with alpha = 4.5, branch from -0.2 to sigma0 = 0.
ExperimentConfig default_config();

/// Strict TOML parsing. Throws ConfigError carrying the offending key path.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical TOML; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

model::PotentialSpec make_potential(const ExperimentConfig& config);
model::NonlinearitySpec make_nonlinearity(const ExperimentConfig& config);
/// The nonlinearity with probe.alpha applied.
model::NonlinearitySpec make_probe_nonlinearity(const ExperimentConfig& config);
op::Grid make_grid(const ExperimentConfig& config);
op::EigenOptions make_eigen_options(const ExperimentConfig& config);
solve::SolverCaps make_caps(const ExperimentConfig& config);

/// Output directory: config value, else $RESLAB_OUTPUT_DIR, else ./reslab_out.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

}  // namespace reslab::cli
