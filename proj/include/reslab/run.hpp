#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reslab/config.hpp"

namespace reslab::cli {

enum class Command { Ladder, Spectrum, Solve, Continue, Probe, Verify };

struct RunRequest {
    Command command = Command::Verify;
    ExperimentConfig config;
    std::string command_line;
    std::optional<std::filesystem::path> output_dir;  ///< overrides resolve_output_dir

    // ladder
    int dim = 0;
    std::optional<std::string> p;  ///< rational text; absent means V1 = 0
    // spectrum
    std::optional<int> k;
    std::optional<ExperimentConfig> compare;
    // solve
    std::optional<double> lambda;
    std::string seed_mode = "eig";  ///< eig[:k] | zero | file
    std::optional<std::filesystem::path> seed_file;
    // continue
    std::optional<double> from;
    std::optional<double> to;
    std::optional<int> steps;
    // probe
    std::optional<int> trials;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunManifest {
    std::string config_hash;
    std::string version;
    std::string command_line;
    std::string started;
    std::string finished;
    std::filesystem::path directory;
    std::vector<std::string> files;  ///< relative to directory
    std::vector<SuiteResult> suites;
    std::string summary;  ///< human-readable (or JSON for ladder) primary output
    int exit_code = 0;
};

/// Dispatches one command, writes its reports plus manifest.json into the output
/// directory and returns the manifest. Report files contain no timestamps, so equal
/// configs give byte-identical reports.
RunManifest run(const RunRequest& request);

/// Names of the suites run by `verify`, in order.
std::vector<std::string> verify_suite_names();

}  // namespace reslab::cli
