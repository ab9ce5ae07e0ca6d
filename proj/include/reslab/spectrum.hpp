#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "reslab/operator.hpp"

namespace reslab::op {

enum class EigenMethod {
    Auto,       ///< iterative, dense fallback below dense_limit DOF on non-convergence
    Iterative,  ///< block shift-invert Krylov with Rayleigh–Ritz
    Dense,      ///< full symmetric eigendecomposition
};

struct EigenOptions {
    EigenMethod method = EigenMethod::Auto;
    double tolerance = 1e-9;  ///< residual ‖Aψ - μψ‖ for L²-normalized ψ
    int max_basis = 400;      ///< Krylov basis cap before a thick restart
    int max_restarts = 40;
    Eigen::Index dense_limit = 2000;
    std::uint64_t seed = 20240917;
    double cluster_gap = 1e-7;
};

struct SpectrumReport {
    Eigen::VectorXd eigenvalues;    ///< ascending μ1 ≤ ... ≤ μk
    Eigen::MatrixXd eigenvectors;   ///< columns, L²-orthonormal on the grid
    Eigen::VectorXd residual_norms; ///< ‖Aψ - μψ‖ in discrete L²
    std::vector<int> cluster;       ///< cluster id per eigenvalue (gap < cluster_gap joins)
    std::optional<double> sigma_ess_marker;
    double truncation_margin = 0.0;
    bool used_dense = false;
    int iterations = 0;

    Eigen::Index size() const noexcept { return eigenvalues.size(); }
    /// μ_j is trusted as discrete spectrum of the untruncated operator when it lies
    /// below sigma_ess_marker - truncation_margin (always true without a marker).
    bool trusted(Eigen::Index j) const;
    Eigen::Index trusted_count() const;
};

/// The k smallest eigenpairs. Throws DomainError when k exceeds the DOF and
/// ConvergenceError (with the best residuals) when the iteration cap is hit.
SpectrumReport lowest_eigenpairs(const DiscreteOperator& op, int k, const EigenOptions& options = {});

/// Smallest Dirichlet eigenvalue of -Δ on the continuous box: dim·(π/2L)².
double box_ground_energy(const Grid& grid);

/// Adds the σ_ess marker and the default truncation margin (box_ground_energy).
void mark_essential_threshold(SpectrumReport& report, const Grid& grid, double sigma0);

double rayleigh_quotient(const DiscreteOperator& op, const Eigen::VectorXd& v);

struct MinMaxRecord {
    struct Level {
        int j = 0;
        double mu = 0.0;
        double span_max = 0.0;        ///< max of R over span{ψ1..ψj}
        bool attained = false;        ///< span_max == μ_j within tolerance
        double worst_subspace_min = 0.0;  ///< max over trials of min R on 𝔅^⊥ samples
        bool upper_bound_holds = false;   ///< every trial's min ≤ μ_j + tol
    };
    std::vector<Level> levels;
    double global_min_sample = 0.0;  ///< min R over random unit vectors
    bool global_lower_bound = false; ///< that min ≥ μ1 - tol
    double tolerance = 0.0;
    bool passed() const;
};

/// Checks the min-max characterisation on `report`: the inf-max level is attained on
/// the span of the first j eigenvectors, and for `trials` random (j-1)-dimensional 𝔅
/// the Rayleigh quotient on 𝔅^⊥ drops to μ_j or below. Never throws on failure.
MinMaxRecord minmax_verify(const DiscreteOperator& op, const SpectrumReport& report, int trials,
                           std::uint64_t seed = 7, double tolerance = 1e-7);

struct ComparisonRecord {
    Eigen::VectorXd mu_lower;  ///< μ_j of the operator with the smaller potential
    Eigen::VectorXd mu_upper;
    std::vector<bool> strict;  ///< μ_j(op1) < μ_j(op2) - tolerance
    std::vector<bool> violated;  ///< μ_j(op1) > μ_j(op2) + tolerance
    double tolerance = 0.0;
    bool ordered() const;
    bool all_strict() const;
};

/// Compares the k lowest eigenvalues of two operators on one grid. Requires the
/// diagonal of op1 ≤ op2 nodewise with at least one strict node; otherwise throws
/// DomainError with the witness node.
ComparisonRecord compare_spectra(const DiscreteOperator& op1, const DiscreteOperator& op2, int k,
                                 const EigenOptions& options = {}, double tolerance = 1e-9);

struct MorseIndex {
    int m = 0;          ///< eigenvalues < -tolerance
    int M = 0;          ///< eigenvalues < +tolerance
    double margin = 0;  ///< min |eigenvalue|
};

/// Negative and generalized index of a linearization. Grows the number of computed
/// eigenvalues until one exceeds +tolerance.
MorseIndex morse_index(const DiscreteOperator& op, double tolerance, const EigenOptions& options = {});

}  // namespace reslab::op
