#include "reslab/potential.hpp"

#include <cmath>
#include <numbers>

#include "reslab/errors.hpp"

namespace reslab::model {

double Well::profile(std::span<const double> x) const {
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = i < center.size() ? center[i] : 0.0;
        r2 += (x[i] - c) * (x[i] - c);
    }
    switch (shape) {
        case Shape::Square: {
            // a node sitting on the rim takes the mean of both sides; keeps the stencil second order
            const double rim = radius * radius;
            if (std::abs(r2 - rim) <= 1e-12 * rim) return 0.5;
            return r2 < rim ? 1.0 : 0.0;
        }
        case Shape::Gaussian: return std::exp(-r2 / (radius * radius));
    }
    return 0.0;
}

PotentialSpec PotentialSpec::from_wells(double sigma0, std::vector<Well> wells) {
    for (const auto& w : wells) {
        if (!(w.radius > 0.0) || !std::isfinite(w.depth)) throw DomainError("well radius must be positive and depth finite");
    }
    PotentialSpec s;
    s.sigma0_ = sigma0;
    s.wells_ = std::move(wells);
    s.v1_ = [wells = s.wells_](std::span<const double> x) {
        double v = 0.0;
        for (const auto& w : wells) v -= w.depth * w.profile(x);
        return v;
    };
    s.v2_ = [sigma0](std::span<const double>) { return sigma0; };
    s.v2_bound_ = std::abs(sigma0);
    return s;
}

PotentialSpec PotentialSpec::from_parts(double sigma0, Evaluator v1, double p, Evaluator v2, double v2_bound) {
    if (!v1 || !v2) throw DomainError("potential evaluators must be set");
    PotentialSpec s;
    s.sigma0_ = sigma0;
    s.v1_ = std::move(v1);
    s.p_ = p;
    s.v2_ = std::move(v2);
    s.v2_bound_ = v2_bound;
    return s;
}

PotentialCheck check_potential(const PotentialSpec& spec, int dim, double far_radius, double decay_tolerance, int rays) {
    if (dim < 1 || dim > 3) throw DomainError("potential checks support dim 1..3");
    PotentialCheck out;
    std::vector<double> x(static_cast<std::size_t>(dim));

    // box samples for the sup bound
    const int per_axis = dim == 1 ? 401 : dim == 2 ? 81 : 21;
    const int total = static_cast<int>(std::pow(per_axis, dim));
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        for (int a = 0; a < dim; ++a) {
            x[a] = -far_radius + 2.0 * far_radius * (rem % per_axis) / (per_axis - 1);
            rem /= per_axis;
        }
        const double v2 = std::abs(spec.v2(x));
        out.worst_v2 = std::max(out.worst_v2, v2);
    }
    out.v2_bounded = out.worst_v2 <= spec.v2_bound() * (1.0 + 1e-12) + 1e-300;

    // rays on the far sphere (golden-angle spiral in 3D)
    const int n_rays = dim == 1 ? 2 : rays;
    for (int r = 0; r < n_rays; ++r) {
        if (dim == 1) {
            x[0] = r == 0 ? -far_radius : far_radius;
        } else if (dim == 2) {
            const double th = 2.0 * std::numbers::pi * r / n_rays;
            x[0] = far_radius * std::cos(th);
            x[1] = far_radius * std::sin(th);
        } else {
            const double z = 1.0 - 2.0 * (r + 0.5) / n_rays;
            const double rho = std::sqrt(1.0 - z * z);
            const double th = r * std::numbers::pi * (3.0 - std::sqrt(5.0));
            x[0] = far_radius * rho * std::cos(th);
            x[1] = far_radius * rho * std::sin(th);
            x[2] = far_radius * z;
        }
        out.worst_decay = std::max(out.worst_decay, std::abs(spec(x) - spec.sigma0()));
    }
    out.decays_to_sigma0 = out.worst_decay <= decay_tolerance;
    return out;
}

}  // namespace reslab::model
