#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "reslab/potential.hpp"

namespace reslab::op {

/// Uniform interior grid on [-L, L]^dim with Dirichlet walls at ±L.
/// Nodes sit at -L + (i+1)h, i = 0..n-1, h = 2L/(n+1); axis 0 varies fastest.
class Grid {
public:
    Grid(int dim, double half_width, int points_per_axis);

    int dim() const noexcept { return dim_; }
    double half_width() const noexcept { return half_width_; }
    int points_per_axis() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    Eigen::Index dof() const noexcept { return dof_; }
    /// h^dim, the weight of one node in discrete integrals.
    double cell_volume() const noexcept { return cell_volume_; }
    double volume() const noexcept;

    std::array<int, 3> multi_index(Eigen::Index node) const;
    std::vector<double> coordinates(Eigen::Index node) const;

    /// Discrete L² inner product and norm: h^dim Σ v_i w_i.
    double inner(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const;
    double norm(const Eigen::VectorXd& v) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int dim_;
    double half_width_;
    int n_;
    double h_;
    Eigen::Index dof_;
    double cell_volume_;
};

/// Symmetric operator -Δ_h + diag(d) on a grid, (2·dim+1)-point stencil.
/// `diagonal()` holds the potential samples plus any constant shift.
class DiscreteOperator {
public:
    DiscreteOperator(Grid grid, Eigen::VectorXd diagonal, double shift_m = 0.0);

    const Grid& grid() const noexcept { return grid_; }
    const Eigen::VectorXd& diagonal() const noexcept { return diagonal_; }
    double shift() const noexcept { return shift_m_; }
    Eigen::Index dof() const noexcept { return grid_.dof(); }

    /// (-Δ_h + diag) v
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    const Eigen::SparseMatrix<double>& sparse() const noexcept { return matrix_; }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

    /// Same stencil with `extra` added to the diagonal (e.g. -λ - g'(u)).
    DiscreteOperator plus_diagonal(const Eigen::VectorXd& extra) const;
    DiscreteOperator plus_constant(double c) const;

    /// Gershgorin lower bound on the spectrum.
    double spectrum_lower_bound() const;

    /// Discrete Dirichlet form h^dim Σ_edges ((u_j - u_i)/h)², ghost zeros outside.
    double gradient_energy(const Eigen::VectorXd& u) const;

private:
    Grid grid_;
    Eigen::VectorXd diagonal_;
    double shift_m_;
    Eigen::SparseMatrix<double> matrix_;
};

/// Samples `potential` at every node and adds `shift`. Throws AssemblyError
/// naming the first node with a non-finite sample.
DiscreteOperator assemble(const Grid& grid, const model::PotentialSpec& potential, double shift = 0.0);

/// Nodal potential values without the shift.
Eigen::VectorXd sample_potential(const Grid& grid, const model::PotentialSpec& potential);

}  // namespace reslab::op
