#include "reslab/solve.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "reslab/errors.hpp"

namespace reslab::solve {

namespace {

Eigen::VectorXd apply_nodewise(const model::ScalarFn& f, const Eigen::VectorXd& u) {
    Eigen::VectorXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = f(u[i]);
    return out;
}

void fill_norms(SolutionState& s, const op::Grid& grid) {
    s.l2 = grid.norm(s.u);
    s.linf = s.u.size() ? s.u.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

Eigen::VectorXd residual(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
                         const Eigen::VectorXd& u) {
    if (u.size() != op.dof()) throw DomainError("state length does not match grid");
    return op.apply(u) - lambda * u - apply_nodewise(nl.g, u);
}

double energy(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
              const Eigen::VectorXd& u) {
    if (u.size() != op.dof()) throw DomainError("state length does not match grid");
    const double w = op.grid().cell_volume();
    double potential = 0.0, mass = 0.0, primitive = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        potential += op.diagonal()[i] * u[i] * u[i];
        mass += u[i] * u[i];
        primitive += nl.G(u[i]);
    }
    return 0.5 * op.gradient_energy(u) + w * (0.5 * potential - 0.5 * lambda * mass - primitive);
}

op::DiscreteOperator linearization(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
                                   const Eigen::VectorXd& u) {
    Eigen::VectorXd extra = -apply_nodewise(nl.gprime, u);
    extra.array() -= lambda;
    return op.plus_diagonal(extra);
}

SolutionState newton_solve(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
                           const Eigen::VectorXd& seed, const SolverCaps& caps) {
    if (seed.size() != op.dof()) throw DomainError("seed length does not match grid");
    if (!seed.allFinite()) throw DomainError("seed has non-finite entries");
    const auto& grid = op.grid();

    Eigen::VectorXd u = seed;
    Eigen::VectorXd f = residual(op, nl, lambda, u);
    double norm = grid.norm(f);
    double best = norm;
    int it = 0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analysed = false;

    while (norm >= caps.tolerance) {
        if (it >= caps.max_iterations)
            throw ConvergenceError("Newton iteration cap reached at lambda " + std::to_string(lambda), {best});
        ++it;
        const auto jac = linearization(op, nl, lambda, u);
        if (!analysed) {
            lu.analyzePattern(jac.sparse());
            analysed = true;
        }
        lu.factorize(jac.sparse());
        if (lu.info() != Eigen::Success)
            throw NearDegeneracyError("singular Jacobian at lambda " + std::to_string(lambda));
        const Eigen::VectorXd step = lu.solve(-f);
        if (!step.allFinite()) throw NearDegeneracyError("Newton step is not finite at lambda " + std::to_string(lambda));

        double t = 1.0;
        Eigen::VectorXd trial, ft;
        double nt = 0.0;
        while (true) {
            trial = u + t * step;
            ft = residual(op, nl, lambda, trial);
            nt = grid.norm(ft);
            if (nt <= (1.0 - 1e-4 * t) * norm || t <= caps.min_step) break;
            t *= 0.5;
        }
        u = std::move(trial);
        f = std::move(ft);
        norm = nt;
        best = std::min(best, norm);
        if (!std::isfinite(norm)) throw ConvergenceError("Newton iterate diverged", {best});
    }

    SolutionState s;
    s.lambda = lambda;
    s.u = std::move(u);
    s.residual = norm;
    s.energy = energy(op, nl, lambda, s.u);
    s.iterations = it;
    s.converged = true;
    fill_norms(s, grid);
    if (caps.compute_morse) {
        const auto mi = op::morse_index(linearization(op, nl, lambda, s.u), caps.morse_tolerance, caps.eigen);
        s.morse_m = mi.m;
        s.morse_M = mi.M;
        s.margin = mi.margin;
        if (s.margin < caps.degeneracy_floor)
            throw NearDegeneracyError("linearization margin " + std::to_string(s.margin) + " at lambda " +
                                      std::to_string(lambda));
    }
    return s;
}

double energy_identity_check(const SolutionState& state, const op::DiscreteOperator& op,
                             const model::NonlinearitySpec& nl) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < state.u.size(); ++i) {
        const double t = state.u[i];
        sum += 0.5 * nl.g(t) * t - nl.G(t);
    }
    return std::abs(state.energy - op.grid().cell_volume() * sum);
}

double collapse_threshold(const op::Grid& grid) { return 1e-6 * std::sqrt(grid.volume()); }

std::string_view to_string(BranchOutcome o) {
    switch (o) {
        case BranchOutcome::ReachedSigma0: return "reached_sigma0";
        case BranchOutcome::LostConvergence: return "lost_convergence";
        case BranchOutcome::CollapsedToZero: return "collapsed_to_zero";
    }
    return "unknown";
}

ContinuationBranch continue_branch(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl,
                                   double lambda_start, double lambda_end, int steps, const Eigen::VectorXd& seed,
                                   const SolverCaps& caps, const ContinuationOptions& options) {
    if (steps < 1) throw DomainError("continuation needs at least one step");
    if (!(lambda_start < lambda_end)) throw DomainError("continuation requires lambda_start < lambda_end");

    ContinuationBranch br;
    for (int i = 0; i <= steps; ++i)
        br.schedule.push_back(i == steps ? lambda_end : lambda_start + (lambda_end - lambda_start) * i / steps);

    const double zero = collapse_threshold(op.grid());
    auto attempt = [&](double lambda, const Eigen::VectorXd& from) -> std::optional<SolutionState> {
        try {
            return newton_solve(op, nl, lambda, from, caps);
        } catch (const ConvergenceError&) {
        } catch (const NearDegeneracyError&) {
        }
        return std::nullopt;
    };
    auto jumped = [&](const SolutionState& prev, const SolutionState& next) {
        const double d = op.grid().norm(next.u - prev.u);
        return d > options.jump_relative * prev.l2 + options.jump_absolute;
    };

    auto first = attempt(br.schedule[0], seed);
    if (!first) {
        br.failed_lambda = br.schedule[0];
        return br;
    }
    const bool trivial_branch = first->l2 < zero;
    br.states.push_back(std::move(*first));

    for (int i = 1; i <= steps; ++i) {
        const SolutionState& prev = br.states.back();
        const double target = br.schedule[static_cast<std::size_t>(i)];
        auto next = attempt(target, prev.u);
        if (!next || jumped(prev, *next)) {
            // one bisection through the midpoint
            ++br.bisections;
            next.reset();
            if (auto mid = attempt(0.5 * (prev.lambda + target), prev.u); mid && !jumped(prev, *mid)) {
                auto retry = attempt(target, mid->u);
                if (retry && !jumped(*mid, *retry)) next = std::move(retry);
            }
        }
        if (!next) {
            br.failed_lambda = target;
            br.outcome = BranchOutcome::LostConvergence;
            break;
        }
        br.max_jump = std::max(br.max_jump, op.grid().norm(next->u - prev.u));
        br.states.push_back(std::move(*next));
        if (!trivial_branch && br.states.back().l2 < zero) {
            br.outcome = BranchOutcome::CollapsedToZero;
            break;
        }
        if (i == steps) br.outcome = BranchOutcome::ReachedSigma0;
    }
    for (const auto& s : br.states) br.sup_linf = std::max(br.sup_linf, s.linf);
    return br;
}

ProbeRecord nonexistence_probe(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
                               int trials, int k, std::uint64_t seed, const SolverCaps& caps) {
    if (trials < 1 || k < 1) throw DomainError("probe needs positive trials and k");
    ProbeRecord rec;
    rec.k = k;
    rec.lambda = lambda;
    rec.trials = trials;

    op::EigenOptions eig = caps.eigen;
    eig.seed = seed;
    const auto spec = op::lowest_eigenpairs(op, k, eig);
    rec.mu_k = spec.eigenvalues[k - 1];
    rec.gap_premise = lambda + nl.g0 > rec.mu_k;

    const model::SamplingThresholds th;
    rec.strict_ratio_premise = true;
    for (double t : model::standard_sample_grid()) {
        if (std::abs(t) <= th.zero_band) continue;
        if (!(nl.g0 < nl.g(t) / t)) {
            rec.strict_ratio_premise = false;
            break;
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const double zero = collapse_threshold(op.grid());
    static constexpr double amplitudes[] = {0.5, 1.0, 2.0, 4.0, 8.0};
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd c(k);
        for (int j = 0; j < k; ++j) c[j] = normal(rng);
        c.normalize();
        const double amp = amplitudes[t % 5];
        const Eigen::VectorXd start = amp * (spec.eigenvectors * c);
        try {
            auto s = newton_solve(op, nl, lambda, start, caps);
            ++rec.converged;
            rec.largest_converged_l2 = std::max(rec.largest_converged_l2, s.l2);
            if (s.l2 >= zero) rec.counter_witnesses.push_back(std::move(s));
        } catch (const ConvergenceError&) {
            ++rec.failed;
        } catch (const NearDegeneracyError&) {
            ++rec.failed;
        }
    }
    return rec;
}

double fixed_point_shift(double mu1) { return std::max(0.0, 1.0 - mu1) + 1.0; }

Eigen::VectorXd fixed_point_map(const op::DiscreteOperator& op, const model::NonlinearitySpec& nl, double lambda,
                                const Eigen::VectorXd& u, double m) {
    const auto shifted = op.plus_constant(m);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted.sparse());
    if (ldlt.info() != Eigen::Success) throw DomainError("A + m is not factorizable; shift too small");
    const Eigen::VectorXd rhs = (lambda + m) * u + apply_nodewise(nl.g, u);
    return ldlt.solve(rhs);
}

}  // namespace reslab::solve
