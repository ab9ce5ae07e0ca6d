#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reslab::model {

using ScalarFn = std::function<double(double)>;

/// Verdict on one of the hypotheses g1..g8 over a finite sample.
struct HypothesisVerdict {
    bool checked = false;
    bool passed = false;
    double witness = 0.0;  ///< sample point with the worst margin
    double margin = 0.0;   ///< worst margin; negative means violated
};

/// Thresholds used to turn the limit hypotheses into finite checks.
struct SamplingThresholds {
    double large = 1e3;       ///< |t| ≥ large stands in for |t| → ∞
    double small = 1e-3;      ///< |t| ≤ small stands in for t → 0
    double ratio_tol = 1e-2;  ///< tolerance on g(t)/t, G(t)/t² limits
    double zero_band = 1e-9;  ///< strict inequalities are checked for |t| > zero_band
};

struct HypothesisReport {
    std::array<HypothesisVerdict, 8> g{};  ///< index 0 ↔ g1, ..., index 7 ↔ g8 (g6 needs a spectrum)
    SamplingThresholds thresholds;
    std::size_t samples = 0;

    const HypothesisVerdict& operator[](int id) const { return g.at(static_cast<std::size_t>(id - 1)); }
    HypothesisVerdict& operator[](int id) { return g.at(static_cast<std::size_t>(id - 1)); }
    /// Ids (1..8) of checked hypotheses that failed.
    std::vector<int> failed() const;
};

/// Autonomous nonlinearity g(t) with derivative, antiderivative and limits.
struct NonlinearitySpec {
    std::string kind;
    ScalarFn g;
    ScalarFn gprime;
    ScalarFn G;
    double g0 = 0.0;     ///< lim_{t→0} g(t)/t
    double g_inf = 0.0;  ///< lim_{|t|→∞} g(t)/t
    double beta = 0.0;   ///< declared global Lipschitz constant
    std::optional<HypothesisReport> flags;
};

/// g(t) = -α sign(t) ln(1 + |t|), the odd logarithmic example. Hypotheses are checked
/// on the standard grid before returning. Throws DomainError for alpha ≤ 0.
NonlinearitySpec build_log_nonlinearity(double alpha);

/// g(t) = slope·t. slope = 0 gives the zero nonlinearity.
NonlinearitySpec build_linear(double slope);

/// ±logspace(-12, 6, 5000): 10^4 points reaching both |t| ≤ 1e-9 and |t| ≥ 10^3.
std::vector<double> standard_sample_grid();

/// Pointwise and limit checks of g1..g8 except g6. Failures are reported, never thrown.
HypothesisReport check_hypotheses(const NonlinearitySpec& spec, std::span<const double> grid,
                                  const SamplingThresholds& thresholds = {});

/// Both readings of g6 ("λ + g0 ≤ μ_i for i ≤ k"), with mu holding μ1..μk.
struct G6Verdict {
    bool some_i = false;
    bool all_i = false;
};
G6Verdict check_g6(double g0, double lambda, std::span<const double> mu);

/// |G(t) - ∫_0^t g| by adaptive Gauss–Kronrod quadrature.
double antiderivative_deviation(const NonlinearitySpec& spec, double t);

/// Fučík-type right-hand side f(s) = a·min(s,0) + b·max(s,0) + r(s).
struct FucikForm {
    double a = 0.0;
    double b = 0.0;
    ScalarFn r;
    double beta_r = 0.0;  ///< Lipschitz bound of r, r(0) = 0
};

double fucik_f(const FucikForm& form, double s);
/// Growth bound |f(s)| ≤ (max(|a|,|b|) + β_r)(1 + |s|).
bool fucik_growth_holds(const FucikForm& form, double s);

/// h(a) - h(a-b) - h(b) for h(s) = r(s)·s. For β-Lipschitz r with r(0) = 0 this
/// is bounded by 2β|a-b||b|; see brezis_lieb_bound.
double brezis_lieb_pointwise_gap(const ScalarFn& r, double beta, double a, double b);
double brezis_lieb_bound(double beta, double a, double b);

}  // namespace reslab::model
