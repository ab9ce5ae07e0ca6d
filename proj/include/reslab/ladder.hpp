#pragma once

// Bootstrap regularity schedules for weak solutions of -Δu + Vu = λu + g(u).
//
// Starting from u ∈ L^2 (q0 = 2), each step feeds an L^{q_i} bound through the
// equation and a Sobolev embedding to reach L^{q_{i+1}}. The schedule stops at
// the first exponent ≥ N/2, after which W^{2,q} embeds into bounded continuous
// functions. All exponent arithmetic is exact.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace reslab::ladder {

using Rational = boost::multiprecision::cpp_rational;

/// Integrability exponent p of the L^p part V1 of the potential. The infinite
/// value is a sentinel meaning V1 = 0, not a large number.
class LebesgueExponent {
public:
    static LebesgueExponent infinity() { return LebesgueExponent{}; }
    static LebesgueExponent finite(Rational p) { return LebesgueExponent{std::move(p)}; }

    bool is_infinite() const noexcept { return !value_.has_value(); }
    /// Throws DomainError when infinite.
    const Rational& value() const;

    friend bool operator==(const LebesgueExponent&, const LebesgueExponent&) = default;

private:
    LebesgueExponent() = default;
    explicit LebesgueExponent(Rational p) : value_(std::move(p)) {}
    std::optional<Rational> value_;
};

enum class LadderCase {
    ZeroV1,           ///< V1 = 0 a.e.
    IntegrableHighP,  ///< p > N ≥ 4
    IntegrableMidP,   ///< N/2 < p ≤ N, N ≥ 4
    LowDim,           ///< N ≤ 3, p = 2
};

enum class RegularityClass { CB1, CB0, LqAll };

enum class FactorKind { Gamma, Rho, Theta, ThetaStar, RhoTilde, Beta, C, C0, CTilde, L, K };

std::string_view to_string(LadderCase c);
std::string_view to_string(RegularityClass r);
std::string_view to_string(FactorKind k);

/// One symbolic embedding/estimate constant, e.g. C(2, q_i, N) or ρ(q_i, q_{i+1}, N).
/// λ and ε are implicit in every γ/ρ/θ factor.
struct ChainFactor {
    FactorKind kind;
    std::vector<Rational> args;
    std::optional<double> value;

    /// Canonical binding key, e.g. "C(2,3,12)" or "rho(2,30/13,6)".
    std::string key() const;
};

struct ConstantChain {
    std::vector<ChainFactor> factors;

    std::size_t count(FactorKind kind) const;
    std::size_t size() const noexcept { return factors.size(); }
};

struct ExponentLadder {
    int dim = 0;
    LebesgueExponent p = LebesgueExponent::infinity();
    LadderCase ladder_case = LadderCase::ZeroV1;
    /// q0 = 2, q1, ..., q_{j0+1}; just {2} when the schedule is trivial.
    std::vector<Rational> exponents;
    /// nullopt marks the trivial schedule (q0 = 2 already ≥ N/2).
    std::optional<int> j0;
    /// Extra exponent used when q_{j0+1} lands exactly on N/2.
    std::optional<Rational> tail;
    RegularityClass terminal = RegularityClass::CB1;
    ConstantChain chain;
};

/// Selects the case for an admissible (N, p). Throws DomainError on an
/// inadmissible pair, naming the violated condition.
LadderCase classify(int dim, const LebesgueExponent& p);

/// Exact successor of q under the recurrence of `ladder_case`.
/// Throws LadderOverflow when the recurrence denominator is not positive and
/// DomainError when q violates the case precondition.
Rational next_exponent(const Rational& q, const LebesgueExponent& p, int dim, LadderCase ladder_case);

/// Closed form of the i-th exponent (2N/(N-4i), 2pN/((N-2i)p+2iN) or 2pN/((N-4i)p+2iN)).
Rational closed_form_exponent(int i, const LebesgueExponent& p, int dim, LadderCase ladder_case);

/// The crossing ratio r such that q_i < N/2 ⇔ i < r.
Rational critical_ratio(int dim, const LebesgueExponent& p, LadderCase ladder_case);

/// j0 from the crossing ratio alone: l if r ∈ (l, l+1), l-1 if r = l; trivial if r ≤ 0.
std::optional<int> j0_by_floor_rule(int dim, const LebesgueExponent& p, LadderCase ladder_case);

/// j0 by iterating next_exponent from q0 = 2 until the first exponent ≥ N/2.
std::optional<int> j0_by_iteration(int dim, const LebesgueExponent& p, LadderCase ladder_case);

/// Step count j0; computed both ways, and the two must agree (std::logic_error otherwise).
std::optional<int> compute_j0(int dim, const LebesgueExponent& p, LadderCase ladder_case);

/// Full schedule for one admissible (N, p). Deterministic.
ExponentLadder plan_ladder(int dim, const LebesgueExponent& p);

/// Checks the structural invariants (monotone, crossing, closed forms);
/// returns a list of violations, empty when the ladder is consistent.
std::vector<std::string> validate(const ExponentLadder& ladder);

/// Product of all chain factors. A binding (by ChainFactor::key) overrides a
/// stored value. Throws UnboundConstant listing every factor left without a value.
double evaluate_chain(const ConstantChain& chain, const std::map<std::string, double>& bindings = {});

std::string to_string(const Rational& r);
/// Parses "a", "a/b" or a terminating decimal like "4.5". Throws DomainError.
Rational parse_rational(std::string_view text);

}  // namespace reslab::ladder
