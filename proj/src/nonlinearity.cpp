#include "reslab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "reslab/errors.hpp"

namespace reslab::model {

namespace {

// (1+x) ln(1+x) - x for x ≥ 0, with a series near 0 to avoid cancellation.
double one_plus_log_minus(double x) {
    if (x < 1e-3) {
        // Σ_{n≥2} (-1)^n x^n / (n(n-1))
        double term = x * x;
        double sum = 0.0;
        for (int n = 2; n < 12; ++n) {
            sum += ((n % 2 == 0) ? 1.0 : -1.0) * term / (n * (n - 1.0));
            term *= x;
        }
        return sum;
    }
    return (1.0 + x) * std::log1p(x) - x;
}

// Tracks the worst margin (most negative = worst) of one hypothesis.
struct Tracker {
    HypothesisVerdict& v;
    explicit Tracker(HypothesisVerdict& verdict) : v(verdict) {
        v.checked = true;
        v.passed = true;
        v.margin = std::numeric_limits<double>::infinity();
    }
    // `strict` demands margin > 0, otherwise margin ≥ 0.
    void observe(double t, double margin, bool strict) {
        if (margin < v.margin) {
            v.margin = margin;
            v.witness = t;
        }
        if (strict ? !(margin > 0.0) : !(margin >= 0.0)) v.passed = false;
    }
};

}  // namespace

std::vector<int> HypothesisReport::failed() const {
    std::vector<int> out;
    for (int id = 1; id <= 8; ++id)
        if ((*this)[id].checked && !(*this)[id].passed) out.push_back(id);
    return out;
}

std::vector<double> standard_sample_grid() {
    constexpr int half = 5000;
    std::vector<double> pts;
    pts.reserve(2 * half);
    for (int i = 0; i < half; ++i) {
        const double e = -12.0 + 18.0 * i / (half - 1);
        pts.push_back(std::pow(10.0, e));
    }
    std::vector<double> all;
    all.reserve(2 * half);
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) all.push_back(-*it);
    all.insert(all.end(), pts.begin(), pts.end());
    return all;
}

NonlinearitySpec build_log_nonlinearity(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("example nonlinearity requires alpha > 0");
    NonlinearitySpec s;
    s.kind = "log";
    s.g = [alpha](double t) { return t == 0.0 ? 0.0 : -alpha * std::copysign(std::log1p(std::abs(t)), t); };
    s.gprime = [alpha](double t) { return -alpha / (1.0 + std::abs(t)); };
    s.G = [alpha](double t) { return -alpha * one_plus_log_minus(std::abs(t)); };
    s.g0 = -alpha;
    s.g_inf = 0.0;
    s.beta = alpha;
    const auto grid = standard_sample_grid();
    s.flags = check_hypotheses(s, grid);
    return s;
}

NonlinearitySpec build_linear(double slope) {
    NonlinearitySpec s;
    s.kind = slope == 0.0 ? "zero" : "linear";
    s.g = [slope](double t) { return slope * t; };
    s.gprime = [slope](double) { return slope; };
    s.G = [slope](double t) { return 0.5 * slope * t * t; };
    s.g0 = slope;
    s.g_inf = slope;
    s.beta = std::abs(slope);
    return s;
}

HypothesisReport check_hypotheses(const NonlinearitySpec& spec, std::span<const double> grid,
                                  const SamplingThresholds& th) {
    HypothesisReport rep;
    rep.thresholds = th;
    rep.samples = grid.size();

    Tracker g1(rep[1]), g2(rep[2]), g3(rep[3]), g4(rep[4]), g5(rep[5]), g7(rep[7]), g8(rep[8]);
    bool saw_large = false, saw_small = false;

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        if (t == 0.0) continue;
        const double g = spec.g(t);
        const double gp = spec.gprime(t);
        const double ratio = g / t;
        const double at = std::abs(t);

        if (at >= th.large) {
            saw_large = true;
            g1.observe(t, th.ratio_tol - std::abs(ratio), false);
            g7.observe(t, th.ratio_tol - std::abs(spec.G(t) / (t * t)), false);
        }
        if (at <= th.small) {
            saw_small = true;
            g2.observe(t, th.ratio_tol - std::abs(ratio - spec.g0), false);
        }
        g3.observe(t, -ratio, false);
        if (at > th.zero_band) {
            g4.observe(t, gp - ratio, true);
            g8.observe(t, -gp, false);
        }
        // Lipschitz: derivative bound, consecutive pairs, mirrored pairs.
        const double slack = 1e-12 * spec.beta + 1e-15;
        g5.observe(t, spec.beta + slack - std::abs(gp), false);
        if (i + 1 < grid.size()) {
            const double s2 = grid[i + 1];
            const double ds = std::abs(s2 - t);
            if (ds > 0.0) g5.observe(t, spec.beta * ds * (1.0 + 1e-12) + 1e-15 - std::abs(spec.g(s2) - g), false);
        }
        g5.observe(t, spec.beta * 2.0 * at * (1.0 + 1e-12) + 1e-15 - std::abs(g - spec.g(-t)), false);
    }
    // A limit hypothesis without probe points is not verified.
    if (!saw_large) rep[1].passed = rep[7].passed = false;
    if (!saw_small) rep[2].passed = false;
    return rep;
}

G6Verdict check_g6(double g0, double lambda, std::span<const double> mu) {
    G6Verdict v;
    if (mu.empty()) return v;
    v.all_i = std::all_of(mu.begin(), mu.end(), [&](double m) { return lambda + g0 <= m; });
    v.some_i = std::any_of(mu.begin(), mu.end(), [&](double m) { return lambda + g0 <= m; });
    return v;
}

double antiderivative_deviation(const NonlinearitySpec& spec, double t) {
    if (t == 0.0) return std::abs(spec.G(0.0));
    using boost::math::quadrature::gauss_kronrod;
    const double integral = gauss_kronrod<double, 31>::integrate(spec.g, 0.0, t, 15, 1e-13);
    return std::abs(spec.G(t) - integral);
}

double fucik_f(const FucikForm& form, double s) {
    const double r = form.r ? form.r(s) : 0.0;
    return form.a * std::min(s, 0.0) + form.b * std::max(s, 0.0) + r;
}

bool fucik_growth_holds(const FucikForm& form, double s) {
    const double bound = (std::max(std::abs(form.a), std::abs(form.b)) + form.beta_r) * (1.0 + std::abs(s));
    return std::abs(fucik_f(form, s)) <= bound * (1.0 + 1e-14);
}

double brezis_lieb_pointwise_gap(const ScalarFn& r, double /*beta*/, double a, double b) {
    auto h = [&](double s) { return r(s) * s; };
    return h(a) - h(a - b) - h(b);
}

double brezis_lieb_bound(double beta, double a, double b) { return 2.0 * beta * std::abs(a - b) * std::abs(b); }

}  // namespace reslab::model
