#include "reslab/operator.hpp"

#include <cmath>
#include <sstream>

#include "reslab/errors.hpp"

namespace reslab::op {

Grid::Grid(int dim, double half_width, int points_per_axis)
    : dim_(dim), half_width_(half_width), n_(points_per_axis) {
    if (dim < 1 || dim > 3) throw DomainError("grid dimension must be 1, 2 or 3");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw DomainError("grid half width must be positive");
    if (points_per_axis < 3) throw DomainError("grid needs at least 3 points per axis");
    h_ = 2.0 * half_width / (points_per_axis + 1);
    dof_ = 1;
    for (int a = 0; a < dim; ++a) dof_ *= points_per_axis;
    cell_volume_ = std::pow(h_, dim);
}

double Grid::volume() const noexcept { return std::pow(2.0 * half_width_, dim_); }

std::array<int, 3> Grid::multi_index(Eigen::Index node) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
        idx[a] = static_cast<int>(node % n_);
        node /= n_;
    }
    return idx;
}

std::vector<double> Grid::coordinates(Eigen::Index node) const {
    const auto idx = multi_index(node);
    std::vector<double> x(static_cast<std::size_t>(dim_));
    for (int a = 0; a < dim_; ++a) x[a] = -half_width_ + (idx[a] + 1) * h_;
    return x;
}

double Grid::inner(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const { return cell_volume_ * v.dot(w); }

double Grid::norm(const Eigen::VectorXd& v) const { return std::sqrt(cell_volume_) * v.norm(); }

DiscreteOperator::DiscreteOperator(Grid grid, Eigen::VectorXd diagonal, double shift_m)
    : grid_(std::move(grid)), diagonal_(std::move(diagonal)), shift_m_(shift_m) {
    const Eigen::Index n = grid_.dof();
    if (diagonal_.size() != n) throw DomainError("diagonal length does not match grid");
    const int dim = grid_.dim();
    const int m = grid_.points_per_axis();
    const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n) * (2 * dim + 1));
    Eigen::Index stride = 1;
    std::array<Eigen::Index, 3> strides{};
    for (int a = 0; a < dim; ++a) {
        strides[a] = stride;
        stride *= m;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        entries.emplace_back(i, i, 2.0 * dim * inv_h2 + diagonal_[i]);
        const auto idx = grid_.multi_index(i);
        for (int a = 0; a < dim; ++a) {
            if (idx[a] > 0) entries.emplace_back(i, i - strides[a], -inv_h2);
            if (idx[a] + 1 < m) entries.emplace_back(i, i + strides[a], -inv_h2);
        }
    }
    matrix_.resize(n, n);
    matrix_.setFromTriplets(entries.begin(), entries.end());
    matrix_.makeCompressed();
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& v) const { return matrix_ * v; }

DiscreteOperator DiscreteOperator::plus_diagonal(const Eigen::VectorXd& extra) const {
    return DiscreteOperator(grid_, diagonal_ + extra, shift_m_);
}

DiscreteOperator DiscreteOperator::plus_constant(double c) const {
    return DiscreteOperator(grid_, diagonal_.array() + c, shift_m_);
}

double DiscreteOperator::spectrum_lower_bound() const {
    double lower = std::numeric_limits<double>::infinity();
    for (int k = 0; k < matrix_.outerSize(); ++k) {
        double diag = 0.0, off = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(matrix_, k); it; ++it) {
            if (it.row() == it.col())
                diag = it.value();
            else
                off += std::abs(it.value());
        }
        lower = std::min(lower, diag - off);
    }
    return lower;
}

double DiscreteOperator::gradient_energy(const Eigen::VectorXd& u) const {
    const int dim = grid_.dim();
    const int m = grid_.points_per_axis();
    const double h = grid_.spacing();
    double sum = 0.0;
    Eigen::Index stride = 1;
    for (int a = 0; a < dim; ++a) {
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const auto idx = grid_.multi_index(i);
            // forward difference to the next node along axis a, or to the wall
            const double next = idx[a] + 1 < m ? u[i + stride] : 0.0;
            const double d = next - u[i];
            sum += d * d;
            // the edge from the lower wall into the first node
            if (idx[a] == 0) sum += u[i] * u[i];
        }
        stride *= m;
    }
    return grid_.cell_volume() * sum / (h * h);
}

Eigen::VectorXd sample_potential(const Grid& grid, const model::PotentialSpec& potential) {
    Eigen::VectorXd v(grid.dof());
    for (Eigen::Index i = 0; i < grid.dof(); ++i) {
        const auto x = grid.coordinates(i);
        v[i] = potential(x);
        if (!std::isfinite(v[i])) {
            std::ostringstream os;
            os << "non-finite potential sample at node " << i << " (x =";
            for (double c : x) os << ' ' << c;
            os << ')';
            throw AssemblyError(os.str());
        }
    }
    return v;
}

DiscreteOperator assemble(const Grid& grid, const model::PotentialSpec& potential, double shift) {
    Eigen::VectorXd diag = sample_potential(grid, potential);
    diag.array() += shift;
    return DiscreteOperator(grid, std::move(diag), shift);
}

}  // namespace reslab::op
