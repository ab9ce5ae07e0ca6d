#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "reslab/nonlinearity.hpp"
#include "reslab/operator.hpp"
#include "reslab/spectrum.hpp"

namespace reslab::solve {

struct SolverCaps {
    int max_iterations = 60;
    double tolerance = 1e-9;         ///< on the discrete L² norm of F(u)
    double min_step = 1.0 / 1024.0;  ///< smallest damping factor tried by the line search
    double degeneracy_floor = 1e-12; ///< margin below this raises NearDegeneracyError
    double morse_tolerance = 1e-8;
    bool compute_morse = true;
    op::EigenOptions eigen;
};

struct SolutionState {
    double lambda = 0.0;
    Eigen::VectorXd u;
    double residual = 0.0;  ///< ‖F(u)‖ in discrete L²
    double energy = 0.0;    ///< J_λ(u)
    double linf = 0.0;
    double l2 = 0.0;
    int morse_m = 0;
    int morse_M = 0;
    double margin = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// F(u) = A u - λ u - g(u), nodewise.
Eigen::VectorXd residual(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
                         const Eigen::VectorXd& u);

/// J_λ(u) = ½|∇u|² + ½Σ d u² - (λ/2)‖u‖² - Σ G(u), h^dim-weighted, forward differences.
/// Its gradient in the discrete L² pairing is exactly `residual`.
double energy(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
              const Eigen::VectorXd& u);

/// Linearization A - λ - g'(u) as an operator on the same grid.
op::DiscreteOperator linearization(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
                                   const Eigen::VectorXd& u);

/// Damped Newton with Armijo backtracking on ‖F‖. On success the Morse data of the
/// linearization is filled in (unless caps.compute_morse is off).
/// Throws ConvergenceError after the iteration cap and NearDegeneracyError when the
/// Jacobian cannot be factored or the final margin falls below caps.degeneracy_floor.
SolutionState newton_solve(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
                           const Eigen::VectorXd& seed, const SolverCaps& caps = {});

/// |J_λ(u) - Σ h^dim (½ g(u) u - G(u))|. At a critical point this equals ½|⟨F(u), u⟩|.
double energy_identity_check(const SolutionState& state, const op::DiscreteOperator& op,
                             const model::NonlinearitySpec& nl);

/// ‖u‖ below this counts as the zero solution: 1e-6 · sqrt(volume).
double collapse_threshold(const op::Grid& grid);

enum class BranchOutcome { ReachedSigma0, LostConvergence, CollapsedToZero };
std::string_view to_string(BranchOutcome o);

struct ContinuationBranch {
    std::vector<SolutionState> states;
    std::vector<double> schedule;
    BranchOutcome outcome = BranchOutcome::LostConvergence;
    std::optional<double> failed_lambda;
    double sup_linf = 0.0;
    double max_jump = 0.0;  ///< largest ‖u_{i+1} - u_i‖ between accepted states
    int bisections = 0;
};

struct ContinuationOptions {
    /// A step is rejected when ‖u_new - u_old‖ > jump_relative · ‖u_old‖ + jump_absolute.
    double jump_relative = 0.5;
    double jump_absolute = 1e-3;
};

/// Natural-parameter continuation over steps+1 equally spaced λ values, each solution
/// seeding the next. A failed step is retried once through the midpoint.
ContinuationBranch continue_branch(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl,
                                   double lambda_start, double lambda_end, int steps, const Eigen::VectorXd& seed,
                                   const SolverCaps& caps = {}, const ContinuationOptions& options = {});

struct ProbeRecord {
    int k = 0;
    double mu_k = 0.0;
    double lambda = 0.0;
    bool strict_ratio_premise = false;  ///< g0 < g(t)/t on the sample grid
    bool gap_premise = false;           ///< λ + g0 > μ_k
    int trials = 0;
    int converged = 0;
    int failed = 0;
    std::vector<SolutionState> counter_witnesses;  ///< converged states with ‖u‖ above the collapse threshold
    double largest_converged_l2 = 0.0;

    bool premises_hold() const { return strict_ratio_premise && gap_premise; }
    bool consistent_with_nonexistence() const { return counter_witnesses.empty() && converged > 0; }
};

/// Multi-start Newton from random combinations of ψ1..ψk at amplitudes spread over
/// [0.5, 8]. Counter-witnesses are recorded, never thrown.
ProbeRecord nonexistence_probe(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
                               int trials, int k, std::uint64_t seed, const SolverCaps& caps = {});

/// m = max(0, 1 - μ1) + 1, so that A + m has spectrum above 1.
double fixed_point_shift(double mu1);

/// T(u) = (A + m)^{-1}(λu + g(u) + m u). Fixed points of T are exactly the zeros of F.
Eigen::VectorXd fixed_point_map(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
                                const Eigen::VectorXd& u, double m);

}  // namespace reslab::solve
