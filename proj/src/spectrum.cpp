#include "reslab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SparseCholesky>

#include "reslab/errors.hpp"

namespace reslab::op {

namespace {

Eigen::MatrixXd random_block(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = normal(rng);
    return x;
}

void assign_clusters(SpectrumReport& rep, double gap) {
    rep.cluster.assign(static_cast<std::size_t>(rep.eigenvalues.size()), 0);
    int id = 0;
    for (Eigen::Index j = 1; j < rep.eigenvalues.size(); ++j) {
        if (rep.eigenvalues[j] - rep.eigenvalues[j - 1] >= gap) ++id;
        rep.cluster[static_cast<std::size_t>(j)] = id;
    }
}

// Converts Euclidean-orthonormal columns into L²-orthonormal grid vectors.
// Rayleigh quotient in extended precision, stencil and diagonal summed apart. Plain
// double accumulation leaves errors near eps·‖A‖ ~ eps/h², which swamps exact shifts.
double accurate_rayleigh(const DiscreteOperator& op, const Eigen::Ref<const Eigen::VectorXd>& v) {
    const Grid& g = op.grid();
    const Eigen::Index n = v.size(), m = g.points_per_axis();
    long double grad = 0.0L, pot = 0.0L, mass = 0.0L;
    Eigen::Index stride = 1;
    for (int a = 0; a < g.dim(); ++a) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index pos = (i / stride) % m;
            const long double next = pos + 1 < m ? v[i + stride] : 0.0L;
            const long double d = next - v[i];
            grad += d * d;
            if (pos == 0) grad += static_cast<long double>(v[i]) * v[i];
        }
        stride *= m;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const long double x = v[i];
        pot += static_cast<long double>(op.diagonal()[i]) * x * x;
        mass += x * x;
    }
    const long double h = g.spacing();
    return static_cast<double>((grad / (h * h) + pot) / mass);
}

void finish(SpectrumReport& rep, const DiscreteOperator& op, const Eigen::MatrixXd& unit_vectors,
            const Eigen::VectorXd& values, double cluster_gap) {
    rep.eigenvalues = values;
    for (Eigen::Index j = 0; j < values.size(); ++j) rep.eigenvalues[j] = accurate_rayleigh(op, unit_vectors.col(j));
    Eigen::MatrixXd residual = op.sparse() * unit_vectors - unit_vectors * rep.eigenvalues.asDiagonal();
    rep.residual_norms = residual.colwise().norm().transpose();
    rep.eigenvectors = unit_vectors / std::sqrt(op.grid().cell_volume());
    assign_clusters(rep, cluster_gap);
}

SpectrumReport dense_eigenpairs(const DiscreteOperator& op, int k, const EigenOptions& opt) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense());
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", {});
    SpectrumReport rep;
    finish(rep, op, es.eigenvectors().leftCols(k), es.eigenvalues().head(k), opt.cluster_gap);
    rep.used_dense = true;
    return rep;
}

// Block Krylov on (A - σ)^{-1} with σ below the spectrum, Rayleigh–Ritz with A,
// thick restart when the basis cap is reached.
SpectrumReport iterative_eigenpairs(const DiscreteOperator& op, int k, const EigenOptions& opt) {
    const Eigen::Index n = op.dof();
    const auto& a = op.sparse();
    const double sigma = op.spectrum_lower_bound() - 1.0;

    Eigen::SparseMatrix<double> shifted = a;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> chol(shifted);
    if (chol.info() != Eigen::Success) throw ConvergenceError("shifted operator factorization failed", {});

    const Eigen::Index block = std::min<Eigen::Index>(n, std::max(4, k));
    const Eigen::Index cap = std::min<Eigen::Index>(n, std::max<Eigen::Index>(opt.max_basis, 2 * (k + block)));

    Eigen::MatrixXd q(n, cap), aq(n, cap), h(cap, cap);
    Eigen::Index m = 0;
    std::mt19937_64 rng(opt.seed);

    // Orthogonalises the columns of w against the basis (twice) and appends the survivors.
    auto append = [&](Eigen::MatrixXd w) -> Eigen::Index {
        Eigen::Index added = 0;
        for (Eigen::Index c = 0; c < w.cols() && m < cap; ++c) {
            Eigen::VectorXd v = w.col(c);
            const double original = v.norm();
            if (!(original > 0.0)) continue;
            for (int pass = 0; pass < 2; ++pass) {
                if (m > 0) v -= q.leftCols(m) * (q.leftCols(m).transpose() * v);
            }
            const double norm = v.norm();
            if (norm < 1e-10 * original) continue;
            q.col(m) = v / norm;
            aq.col(m) = a * q.col(m);
            h.block(0, m, m + 1, 1) = q.leftCols(m + 1).transpose() * aq.col(m);
            h.block(m, 0, 1, m) = h.block(0, m, m, 1).transpose();
            ++m;
            ++added;
        }
        return added;
    };

    append(random_block(n, block, rng));

    std::vector<double> best(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
    int restarts = 0;
    int iterations = 0;
    Eigen::Index last_begin = 0;

    while (true) {
        ++iterations;
        if (m >= k) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(m, m));
            const Eigen::VectorXd theta = es.eigenvalues().head(k);
            const Eigen::MatrixXd c = es.eigenvectors().leftCols(k);
            const Eigen::MatrixXd y = q.leftCols(m) * c;
            const Eigen::MatrixXd r = aq.leftCols(m) * c - y * theta.asDiagonal();
            const Eigen::VectorXd res = r.colwise().norm().transpose();
            for (int j = 0; j < k; ++j) best[static_cast<std::size_t>(j)] = std::min(best[static_cast<std::size_t>(j)], res[j]);
            if (res.maxCoeff() <= opt.tolerance || m == n) {
                if (res.maxCoeff() > opt.tolerance)
                    throw ConvergenceError("eigen residuals above tolerance on the full space", best);
                // re-orthonormalise the Ritz vectors against round-off
                Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
                Eigen::MatrixXd yq = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
                for (int j = 0; j < k; ++j)
                    if (yq.col(j).dot(y.col(j)) < 0) yq.col(j) *= -1.0;
                SpectrumReport rep;
                finish(rep, op, yq, theta, opt.cluster_gap);
                rep.iterations = iterations;
                return rep;
            }
            if (m + block > cap) {
                if (++restarts > opt.max_restarts)
                    throw ConvergenceError("eigensolver restart cap reached", best);
                const Eigen::Index keep = std::min<Eigen::Index>(m, k + block);
                const Eigen::MatrixXd ck = es.eigenvectors().leftCols(keep);
                const Eigen::MatrixXd yk = q.leftCols(m) * ck;
                const Eigen::MatrixXd ayk = aq.leftCols(m) * ck;
                q.leftCols(keep) = yk;
                aq.leftCols(keep) = ayk;
                h.topLeftCorner(keep, keep) = es.eigenvalues().head(keep).asDiagonal();
                m = keep;
                last_begin = 0;
                Eigen::Index before = m;
                append(chol.solve(Eigen::MatrixXd(yk.leftCols(std::min<Eigen::Index>(keep, block)))));
                last_begin = before;
                continue;
            }
        }
        const Eigen::Index begin = last_begin;
        const Eigen::Index width = m - begin;
        const Eigen::MatrixXd w = chol.solve(Eigen::MatrixXd(q.block(0, begin, n, width)));
        const Eigen::Index before = m;
        if (append(w) == 0) append(random_block(n, block, rng));
        last_begin = before;
        if (m == before) throw ConvergenceError("Krylov basis stopped growing", best);
    }
}

}  // namespace

bool SpectrumReport::trusted(Eigen::Index j) const {
    if (!sigma_ess_marker) return true;
    return eigenvalues[j] < *sigma_ess_marker - truncation_margin;
}

Eigen::Index SpectrumReport::trusted_count() const {
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) c += trusted(j) ? 1 : 0;
    return c;
}

double box_ground_energy(const Grid& grid) {
    const double base = std::numbers::pi / (2.0 * grid.half_width());
    return grid.dim() * base * base;
}

void mark_essential_threshold(SpectrumReport& report, const Grid& grid, double sigma0) {
    report.sigma_ess_marker = sigma0;
    report.truncation_margin = box_ground_energy(grid);
}

SpectrumReport lowest_eigenpairs(const DiscreteOperator& op, int k, const EigenOptions& options) {
    const Eigen::Index n = op.dof();
    if (k < 1 || k > n)
        throw DomainError("requested " + std::to_string(k) + " eigenpairs of an operator with " + std::to_string(n) +
                          " degrees of freedom");
    switch (options.method) {
        case EigenMethod::Dense:
            return dense_eigenpairs(op, k, options);
        case EigenMethod::Iterative:
            return iterative_eigenpairs(op, k, options);
        case EigenMethod::Auto:
            if (n <= 64) return dense_eigenpairs(op, k, options);
            try {
                return iterative_eigenpairs(op, k, options);
            } catch (const ConvergenceError&) {
                if (n > options.dense_limit) throw;
                return dense_eigenpairs(op, k, options);
            }
    }
    throw DomainError("unknown eigen method");
}

double rayleigh_quotient(const DiscreteOperator& op, const Eigen::VectorXd& v) {
    return v.dot(op.apply(v)) / v.squaredNorm();
}

bool MinMaxRecord::passed() const {
    if (!global_lower_bound) return false;
    return std::all_of(levels.begin(), levels.end(), [](const Level& l) { return l.attained && l.upper_bound_holds; });
}

MinMaxRecord minmax_verify(const DiscreteOperator& op, const SpectrumReport& report, int trials, std::uint64_t seed,
                           double tolerance) {
    MinMaxRecord rec;
    rec.tolerance = tolerance;
    const Eigen::Index n = op.dof();
    const Eigen::Index k = report.size();
    std::mt19937_64 rng(seed);
    // Euclidean-orthonormal copy of the eigenvectors
    const Eigen::MatrixXd psi = report.eigenvectors * std::sqrt(op.grid().cell_volume());
    const Eigen::MatrixXd apsi = op.sparse() * psi;
    const Eigen::MatrixXd projected = psi.transpose() * apsi;

    for (Eigen::Index j = 1; j <= k; ++j) {
        MinMaxRecord::Level level;
        level.j = static_cast<int>(j);
        level.mu = report.eigenvalues[j - 1];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(projected.topLeftCorner(j, j));
        level.span_max = es.eigenvalues()[j - 1];
        const double scale = std::max(1.0, std::abs(level.mu));
        level.attained = std::abs(level.span_max - level.mu) <= tolerance * scale;

        level.worst_subspace_min = -std::numeric_limits<double>::infinity();
        level.upper_bound_holds = true;
        for (int t = 0; t < trials; ++t) {
            double trial_min = std::numeric_limits<double>::infinity();
            Eigen::MatrixXd basis;
            if (j > 1) {
                Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_block(n, j - 1, rng));
                basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, j - 1);
                // span{ψ1..ψj} ∩ 𝔅^⊥ is non-trivial: take a kernel vector of Bᵀ Ψ_j
                const Eigen::MatrixXd constraint = basis.transpose() * psi.leftCols(j);
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraint, Eigen::ComputeFullV);
                const Eigen::VectorXd coeff = svd.matrixV().col(j - 1);
                Eigen::VectorXd phi = psi.leftCols(j) * coeff;
                phi -= basis * (basis.transpose() * phi);
                trial_min = std::min(trial_min, rayleigh_quotient(op, phi));
            } else {
                trial_min = rayleigh_quotient(op, psi.col(0));
            }
            for (int s = 0; s < 4; ++s) {
                Eigen::VectorXd v = random_block(n, 1, rng).col(0);
                if (j > 1) v -= basis * (basis.transpose() * v);
                trial_min = std::min(trial_min, rayleigh_quotient(op, v));
            }
            level.worst_subspace_min = std::max(level.worst_subspace_min, trial_min);
            if (trial_min > level.mu + tolerance * scale) level.upper_bound_holds = false;
        }
        rec.levels.push_back(level);
    }

    rec.global_min_sample = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 1000; ++s)
        rec.global_min_sample = std::min(rec.global_min_sample, rayleigh_quotient(op, random_block(n, 1, rng).col(0)));
    const double mu1 = k > 0 ? report.eigenvalues[0] : 0.0;
    rec.global_lower_bound = k == 0 || rec.global_min_sample >= mu1 - tolerance * std::max(1.0, std::abs(mu1));
    return rec;
}

bool ComparisonRecord::ordered() const {
    return std::none_of(violated.begin(), violated.end(), [](bool v) { return v; });
}

bool ComparisonRecord::all_strict() const {
    return std::all_of(strict.begin(), strict.end(), [](bool v) { return v; });
}

ComparisonRecord compare_spectra(const DiscreteOperator& op1, const DiscreteOperator& op2, int k,
                                 const EigenOptions& options, double tolerance) {
    if (!(op1.grid() == op2.grid())) throw DomainError("operators must share one grid");
    bool any_strict = false;
    for (Eigen::Index i = 0; i < op1.dof(); ++i) {
        const double d1 = op1.diagonal()[i], d2 = op2.diagonal()[i];
        if (d1 > d2)
            throw DomainError("potential ordering violated at node " + std::to_string(i) + ": " + std::to_string(d1) +
                              " > " + std::to_string(d2));
        any_strict = any_strict || d1 < d2;
    }
    if (!any_strict) throw DomainError("potentials coincide; strict inequality required on at least one node");

    ComparisonRecord rec;
    rec.tolerance = tolerance;
    rec.mu_lower = lowest_eigenpairs(op1, k, options).eigenvalues;
    rec.mu_upper = lowest_eigenpairs(op2, k, options).eigenvalues;
    for (int j = 0; j < k; ++j) {
        rec.strict.push_back(rec.mu_lower[j] < rec.mu_upper[j] - tolerance);
        rec.violated.push_back(rec.mu_lower[j] > rec.mu_upper[j] + tolerance);
    }
    return rec;
}

MorseIndex morse_index(const DiscreteOperator& op, double tolerance, const EigenOptions& options) {
    const Eigen::Index n = op.dof();
    int k = static_cast<int>(std::min<Eigen::Index>(n, 8));
    while (true) {
        const SpectrumReport rep = lowest_eigenpairs(op, k, options);
        const auto& mu = rep.eigenvalues;
        if (mu[k - 1] > tolerance || k == n) {
            MorseIndex out;
            out.margin = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < mu.size(); ++j) {
                if (mu[j] < -tolerance) ++out.m;
                if (mu[j] < tolerance) ++out.M;
                out.margin = std::min(out.margin, std::abs(mu[j]));
            }
            return out;
        }
        k = static_cast<int>(std::min<Eigen::Index>(n, 2 * k));
    }
}

}  // namespace reslab::op
