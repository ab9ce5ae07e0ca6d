#pragma once

// Reference computations that do not go through the library's solvers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Eigenvalues of the 1D second-difference matrix (n interior nodes, spacing h):
/// (4/h²) sin²(jπ / (2(n+1))), j = 1..n.
inline std::vector<double> stencil_eigenvalues_1d(int n, double h) {
    std::vector<double> out;
    for (int j = 1; j <= n; ++j) {
        const double s = std::sin(j * std::numbers::pi / (2.0 * (n + 1)));
        out.push_back(4.0 / (h * h) * s * s);
    }
    return out;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Bound states E ∈ (-V0, 0) of -u'' - V0·1{|x|≤a} u = E u on the whole line.
/// Even states solve k tan(ka) = κ, odd states -k cot(ka) = κ, k² = V0 + E, κ² = -E.
inline std::vector<double> square_well_levels(double depth, double a) {
    std::vector<double> levels;
    // Work in k ∈ (0, sqrt(V0)); each matching function is monotone between its poles.
    const double kmax = std::sqrt(depth);
    auto kappa = [&](double k) { return std::sqrt(std::max(0.0, depth - k * k)); };
    const std::function<double(double)> even = [&](double k) { return k * std::sin(k * a) - kappa(k) * std::cos(k * a); };
    const std::function<double(double)> odd = [&](double k) { return -k * std::cos(k * a) - kappa(k) * std::sin(k * a); };
    const int samples = 20000;
    for (auto* f : {&even, &odd}) {
        double prev_k = 1e-12, prev = (*f)(prev_k);
        for (int i = 1; i <= samples; ++i) {
            const double k = kmax * i / samples;
            const double v = (*f)(k);
            if ((v < 0) != (prev < 0) && k < kmax) {
                const double root = bisect(*f, prev_k, k);
                levels.push_back(root * root - depth);
            }
            prev_k = k;
            prev = v;
        }
    }
    std::sort(levels.begin(), levels.end());
    return levels;
}

/// Discrete shooting for a symmetric solution of the 1D stencil equation
///   -(u_{i+1} - 2u_i + u_{i-1})/h² + (V_i - λ) u_i - g(u_i) = 0
/// with an odd number of nodes: u at the centre node is `s`, the profile is even,
/// and the return value is the ghost value past the last node (zero for a solution).
struct Shooting {
    std::vector<double> v;  ///< potential at the nodes
    double h = 1.0;
    double lambda = 0.0;
    std::function<double(double)> g;

    std::vector<double> profile(double s) const {
        const std::size_t n = v.size();
        const std::size_t c = n / 2;
        std::vector<double> u(n + 1, 0.0);  // last slot is the ghost node
        u[c] = s;
        const double h2 = h * h;
        u[c + 1] = 0.5 * ((2.0 + h2 * (v[c] - lambda)) * s - h2 * g(s));
        for (std::size_t i = c + 1; i < n; ++i) {
            u[i + 1] = (2.0 + h2 * (v[i] - lambda)) * u[i] - h2 * g(u[i]) - u[i - 1];
            if (!std::isfinite(u[i + 1])) u[i + 1] = std::copysign(1e300, u[i]);
        }
        for (std::size_t i = 0; i < c; ++i) u[i] = u[n - 1 - i];
        return u;
    }
    double ghost(double s) const { return profile(s).back(); }
};

/// Sign changes of the interior of a vector (zero entries skipped).
inline int sign_changes(const std::vector<double>& u, std::size_t begin, std::size_t end) {
    int changes = 0;
    double last = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        if (u[i] == 0.0) continue;
        if (last != 0.0 && (u[i] < 0) != (last < 0)) ++changes;
        last = u[i];
    }
    return changes;
}

}  // namespace oracle
