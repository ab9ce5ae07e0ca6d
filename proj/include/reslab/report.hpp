#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "reslab/ladder.hpp"
#include "reslab/nonlinearity.hpp"
#include "reslab/solve.hpp"
#include "reslab/spectrum.hpp"

namespace reslab::report {

using nlohmann::json;

/// {"case", "exponents": [[num, den], ...], "j0": int|"trivial", "tail", "terminal", "chain"}
json to_json(const ladder::ExponentLadder& ladder);
/// Plain-text table of the ladder.
std::string to_table(const ladder::ExponentLadder& ladder);

json to_json(const model::HypothesisReport& report);
/// Eigenvalues, residuals, clusters and trust flags; vectors are left to CSV.
json to_json(const op::SpectrumReport& report);
json to_json(const op::MinMaxRecord& record);
json to_json(const op::ComparisonRecord& record);
/// All scalar fields of a state; the vector itself is omitted.
json to_json(const solve::SolutionState& state);
json to_json(const solve::ContinuationBranch& branch);
json to_json(const solve::ProbeRecord& record);

/// Writes `doc` with two-space indentation and a trailing newline. Throws IoError.
void write_json(const std::filesystem::path& path, const json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Branch table with columns lambda, energy, linf, l2, morse_m, margin.
/// Throws DomainError on an empty branch and IoError on an unwritable path.
void emit_plot_data(const solve::ContinuationBranch& branch, const std::filesystem::path& out);

/// One row per node: coordinates then value; one value column per vector.
void write_vectors_csv(const std::filesystem::path& path, const op::Grid& grid, const Eigen::MatrixXd& vectors);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace reslab::report
