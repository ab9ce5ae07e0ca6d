#include "reslab/ladder.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include "reslab/errors.hpp"

namespace reslab::ladder {

namespace {

using boost::multiprecision::cpp_int;

Rational half_dim(int dim) { return Rational(dim, 2); }

cpp_int floor_of(const Rational& r) {
    cpp_int num = boost::multiprecision::numerator(r);
    cpp_int den = boost::multiprecision::denominator(r);
    cpp_int q = num / den;
    if (num < 0 && q * den != num) q -= 1;
    return q;
}

bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

ChainFactor factor(FactorKind kind, std::vector<Rational> args) {
    return ChainFactor{kind, std::move(args), std::nullopt};
}

// Step count upper bound used to stop runaway iteration; the schedules in
// question terminate in O(N) steps.
constexpr int kIterationGuard = 100000;

}  // namespace

const Rational& LebesgueExponent::value() const {
    if (!value_) throw DomainError("exponent p is infinite (V1 = 0)");
    return *value_;
}

std::string_view to_string(LadderCase c) {
    switch (c) {
        case LadderCase::ZeroV1: return "ZeroV1";
        case LadderCase::IntegrableHighP: return "IntegrableHighP";
        case LadderCase::IntegrableMidP: return "IntegrableMidP";
        case LadderCase::LowDim: return "LowDim";
    }
    return "?";
}

std::string_view to_string(RegularityClass r) {
    switch (r) {
        case RegularityClass::CB1: return "CB1";
        case RegularityClass::CB0: return "CB0";
        case RegularityClass::LqAll: return "LqAll";
    }
    return "?";
}

std::string_view to_string(FactorKind k) {
    switch (k) {
        case FactorKind::Gamma: return "gamma";
        case FactorKind::Rho: return "rho";
        case FactorKind::Theta: return "theta";
        case FactorKind::ThetaStar: return "theta_star";
        case FactorKind::RhoTilde: return "rho_tilde";
        case FactorKind::Beta: return "beta";
        case FactorKind::C: return "C";
        case FactorKind::C0: return "C0";
        case FactorKind::CTilde: return "C_tilde";
        case FactorKind::L: return "L";
        case FactorKind::K: return "K";
    }
    return "?";
}

std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(r);
    if (!is_integer(r)) os << '/' << boost::multiprecision::denominator(r);
    return os.str();
}

Rational parse_rational(std::string_view text) {
    auto fail = [&] { return DomainError("not a rational number: '" + std::string(text) + "'"); };
    if (text.empty()) throw fail();
    auto digits_only = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    bool negative = text.front() == '-';
    std::string_view body = negative ? text.substr(1) : text;
    Rational value;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!digits_only(num) || !digits_only(den)) throw fail();
        cpp_int d{std::string(den)};
        if (d == 0) throw fail();
        value = Rational(cpp_int(std::string(num)), d);
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        auto whole = body.substr(0, dot);
        auto frac = body.substr(dot + 1);
        if ((!whole.empty() && !digits_only(whole)) || !digits_only(frac)) throw fail();
        cpp_int scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        cpp_int w = whole.empty() ? cpp_int(0) : cpp_int(std::string(whole));
        value = Rational(w * scale + cpp_int(std::string(frac)), scale);
    } else {
        if (!digits_only(body)) throw fail();
        value = Rational(cpp_int(std::string(body)));
    }
    return negative ? Rational(-value) : value;
}

std::string ChainFactor::key() const {
    std::string out(to_string(kind));
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ',';
        out += to_string(args[i]);
    }
    out += ')';
    return out;
}

std::size_t ConstantChain::count(FactorKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(factors.begin(), factors.end(), [kind](const ChainFactor& f) { return f.kind == kind; }));
}

LadderCase classify(int dim, const LebesgueExponent& p) {
    if (dim < 1) throw DomainError("dimension must be >= 1, got " + std::to_string(dim));
    if (p.is_infinite()) return LadderCase::ZeroV1;
    const Rational& pv = p.value();
    if (dim <= 3) {
        if (pv != 2) throw DomainError("Kato-Rellich condition violated: N <= 3 requires p = 2, got p = " + to_string(pv));
        return LadderCase::LowDim;
    }
    if (dim == 4 && pv <= 2)
        throw DomainError("Kato-Rellich condition violated: N = 4 requires p > 2, got p = " + to_string(pv));
    if (dim >= 5 && pv <= half_dim(dim))
        throw DomainError("Kato-Rellich condition violated: N >= 5 requires p > N/2 = " + to_string(half_dim(dim)) +
                          ", got p = " + to_string(pv));
    return pv > dim ? LadderCase::IntegrableHighP : LadderCase::IntegrableMidP;
}

Rational next_exponent(const Rational& q, const LebesgueExponent& p, int dim, LadderCase ladder_case) {
    if (q < 2) throw DomainError("exponent must be >= 2, got " + to_string(q));
    const Rational n(dim);
    Rational numer, denom;
    switch (ladder_case) {
        case LadderCase::ZeroV1:
            // p_{i+1} = p_i N / (N - 2 p_i)
            if (q >= half_dim(dim)) throw DomainError("case V1 = 0 requires q < N/2, got q = " + to_string(q));
            numer = q * n;
            denom = n - 2 * q;
            break;
        case LadderCase::IntegrableHighP: {
            // q_{i+1} = q_i p N / ((N - q_i) p + q_i N)
            if (dim < 4) throw DomainError("case p > N requires N >= 4");
            if (q >= n) throw DomainError("case p > N requires q < N, got q = " + to_string(q));
            const Rational& pv = p.value();
            numer = q * pv * n;
            denom = (n - q) * pv + q * n;
            break;
        }
        case LadderCase::IntegrableMidP: {
            // q_{i+1} = q_i p N / ((N - 2 q_i) p + q_i N)
            if (dim < 4) throw DomainError("case N/2 < p <= N requires N >= 4");
            if (q > half_dim(dim)) throw DomainError("case N/2 < p <= N requires q <= N/2, got q = " + to_string(q));
            const Rational& pv = p.value();
            numer = q * pv * n;
            denom = (n - 2 * q) * pv + q * n;
            break;
        }
        case LadderCase::LowDim:
            throw DomainError("low-dimensional case has no bootstrap recurrence (H^2 already embeds)");
    }
    if (denom <= 0) throw LadderOverflow("ladder overflow: non-positive denominator at q = " + to_string(q));
    return numer / denom;
}

Rational closed_form_exponent(int i, const LebesgueExponent& p, int dim, LadderCase ladder_case) {
    const Rational n(dim);
    const Rational ii(i);
    Rational denom;
    Rational numer;
    switch (ladder_case) {
        case LadderCase::ZeroV1:
            numer = 2 * n;
            denom = n - 4 * ii;
            break;
        case LadderCase::IntegrableHighP:
            numer = 2 * p.value() * n;
            denom = (n - 2 * ii) * p.value() + 2 * ii * n;
            break;
        case LadderCase::IntegrableMidP:
            numer = 2 * p.value() * n;
            denom = (n - 4 * ii) * p.value() + 2 * ii * n;
            break;
        case LadderCase::LowDim:
            if (i != 0) throw DomainError("low-dimensional case has only q0");
            return Rational(2);
    }
    if (denom <= 0) throw LadderOverflow("closed form undefined at i = " + std::to_string(i));
    return numer / denom;
}

Rational critical_ratio(int dim, const LebesgueExponent& p, LadderCase ladder_case) {
    const Rational n(dim);
    switch (ladder_case) {
        case LadderCase::ZeroV1:
            return (n - 4) / 4;
        case LadderCase::IntegrableHighP: {
            const Rational& pv = p.value();
            return (n - 4) * pv / (2 * (pv - n));
        }
        case LadderCase::IntegrableMidP: {
            const Rational& pv = p.value();
            return (n - 4) * pv / (4 * pv - 2 * n);
        }
        case LadderCase::LowDim:
            break;
    }
    throw DomainError("no crossing ratio in the low-dimensional case");
}

std::optional<int> j0_by_floor_rule(int dim, const LebesgueExponent& p, LadderCase ladder_case) {
    if ((ladder_case == LadderCase::IntegrableHighP || ladder_case == LadderCase::IntegrableMidP) && dim <= 3)
        throw DomainError("N <= 3 is not covered by the integrable-V1 cases");
    if (ladder_case == LadderCase::LowDim) return std::nullopt;
    if (ladder_case == LadderCase::ZeroV1 && dim <= 4) return std::nullopt;
    const Rational ratio = critical_ratio(dim, p, ladder_case);
    if (ratio <= 0) return std::nullopt;
    const cpp_int l = floor_of(ratio);
    const cpp_int j0 = is_integer(ratio) ? cpp_int(l - 1) : l;
    return static_cast<int>(j0);
}

namespace {

// q0 = 2 and its successors through the first exponent ≥ N/2; just {2} when trivial.
std::vector<Rational> iterate_schedule(int dim, const LebesgueExponent& p, LadderCase ladder_case) {
    if ((ladder_case == LadderCase::IntegrableHighP || ladder_case == LadderCase::IntegrableMidP) && dim <= 3)
        throw DomainError("N <= 3 is not covered by the integrable-V1 cases");
    std::vector<Rational> q{Rational(2)};
    if (ladder_case == LadderCase::LowDim) return q;
    const Rational target = half_dim(dim);
    if (q.back() >= target) return q;
    for (int i = 0; i < kIterationGuard; ++i) {
        q.push_back(next_exponent(q.back(), p, dim, ladder_case));
        if (q.back() >= target) return q;
    }
    throw std::logic_error("bootstrap iteration did not cross N/2");
}

std::optional<int> j0_of(const std::vector<Rational>& schedule) {
    if (schedule.size() < 2) return std::nullopt;
    return static_cast<int>(schedule.size()) - 2;
}

}  // namespace

std::optional<int> j0_by_iteration(int dim, const LebesgueExponent& p, LadderCase ladder_case) {
    return j0_of(iterate_schedule(dim, p, ladder_case));
}

std::optional<int> compute_j0(int dim, const LebesgueExponent& p, LadderCase ladder_case) {
    if (ladder_case != LadderCase::ZeroV1 && ladder_case != LadderCase::LowDim && dim <= 3)
        throw DomainError("N <= 3 is not covered by the integrable-V1 cases");
    auto by_rule = j0_by_floor_rule(dim, p, ladder_case);
    auto by_iteration = j0_by_iteration(dim, p, ladder_case);
    if (by_rule != by_iteration) throw std::logic_error("floor rule and recurrence disagree on j0");
    return by_rule;
}

namespace {

ConstantChain build_chain(const ExponentLadder& l) {
    ConstantChain chain;
    auto& f = chain.factors;
    const Rational n(l.dim);
    const auto& q = l.exponents;
    const int last = static_cast<int>(q.size()) - 1;  // index j0+1, or 0 when trivial

    switch (l.ladder_case) {
        case LadderCase::LowDim:
            if (l.terminal == RegularityClass::LqAll)
                f.push_back(factor(FactorKind::CTilde, {1, 2, n}));
            else
                f.push_back(factor(FactorKind::C0, {2, 2, n}));
            break;
        case LadderCase::ZeroV1:
            if (l.dim <= 3) {
                f.push_back(factor(FactorKind::C0, {2, 2, n}));
                break;
            }
            if (l.tail) {
                const Rational& t = *l.tail;
                f.push_back(factor(FactorKind::C0, {2, t, n}));
                f.push_back(factor(FactorKind::CTilde, {2, q[last], t, n}));
                for (int i = 0; i < last; ++i) f.push_back(factor(FactorKind::C, {2, q[i], n}));
                f.push_back(factor(FactorKind::Gamma, {t, n}));
            } else {
                f.push_back(factor(FactorKind::C0, {2, q[last], n}));
                for (int i = 0; i < last; ++i) f.push_back(factor(FactorKind::C, {2, q[i], n}));
            }
            for (int i = 0; i <= last; ++i) f.push_back(factor(FactorKind::Gamma, {q[i], n}));
            break;
        case LadderCase::IntegrableHighP:
            if (l.tail) {
                const Rational& t = *l.tail;
                const Rational& pv = l.p.value();
                f.push_back(factor(FactorKind::C0, {2, t, n}));
                f.push_back(factor(FactorKind::RhoTilde, {q[last], t, pv / (pv - t), n}));
            } else {
                f.push_back(factor(FactorKind::C0, {2, q[last], n}));
            }
            for (int i = 0; i < last; ++i) f.push_back(factor(FactorKind::Rho, {q[i], q[i + 1], n}));
            break;
        case LadderCase::IntegrableMidP:
            if (l.tail) {
                const Rational& t = *l.tail;
                f.push_back(factor(FactorKind::C0, {2, t, n}));
                f.push_back(factor(FactorKind::ThetaStar, {q[last], l.p.value(), t, n}));
            } else {
                f.push_back(factor(FactorKind::C0, {2, q[last], n}));
            }
            for (int i = 0; i < last; ++i) f.push_back(factor(FactorKind::Theta, {q[i], q[i + 1], n}));
            break;
    }
    return chain;
}

}  // namespace

ExponentLadder plan_ladder(int dim, const LebesgueExponent& p) {
    ExponentLadder l;
    l.dim = dim;
    l.p = p;
    l.ladder_case = classify(dim, p);
    l.exponents = iterate_schedule(dim, p, l.ladder_case);
    l.j0 = j0_of(l.exponents);
    if (l.j0 != j0_by_floor_rule(dim, p, l.ladder_case))
        throw std::logic_error("floor rule and recurrence disagree on j0");

    const Rational target = half_dim(dim);
    if (l.ladder_case != LadderCase::LowDim && l.exponents.back() == target) {
        if (l.ladder_case == LadderCase::ZeroV1)
            l.tail = l.exponents.back() * 3 / 2;  // midpoint of (q, 2q)
        else
            l.tail = (l.exponents.back() + p.value()) / 2;  // midpoint of (q, p)
    }

    switch (l.ladder_case) {
        case LadderCase::ZeroV1:
        case LadderCase::IntegrableHighP:
            l.terminal = RegularityClass::CB1;
            break;
        case LadderCase::IntegrableMidP:
            l.terminal = RegularityClass::CB0;
            break;
        case LadderCase::LowDim:
            l.terminal = dim == 1 ? RegularityClass::CB1 : dim == 2 ? RegularityClass::LqAll : RegularityClass::CB0;
            break;
    }
    l.chain = build_chain(l);
    return l;
}

std::vector<std::string> validate(const ExponentLadder& l) {
    std::vector<std::string> issues;
    const Rational target = half_dim(l.dim);
    const auto& q = l.exponents;
    if (q.empty() || q.front() != 2) issues.emplace_back("exponents must start at q0 = 2");
    for (std::size_t i = 1; i < q.size(); ++i)
        if (!(q[i] > q[i - 1])) issues.push_back("exponents not strictly increasing at index " + std::to_string(i));
    if (l.ladder_case == LadderCase::LowDim) return issues;

    const std::size_t last = q.size() - 1;
    if (l.j0) {
        if (q.size() != static_cast<std::size_t>(*l.j0) + 2) issues.emplace_back("exponent count differs from j0 + 2");
        for (std::size_t i = 0; i < last; ++i)
            if (!(q[i] < target)) issues.push_back("exponent " + std::to_string(i) + " is not below N/2");
    } else if (q.size() != 1) {
        issues.emplace_back("trivial ladder must hold only q0");
    }
    if (!q.empty() && q[last] < target) issues.emplace_back("final exponent is below N/2");
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (closed_form_exponent(static_cast<int>(i), l.p, l.dim, l.ladder_case) != q[i])
            issues.push_back("exponent " + std::to_string(i) + " differs from its closed form");
    }
    if (l.tail) {
        const Rational upper = l.ladder_case == LadderCase::ZeroV1 ? Rational(2 * q[last]) : l.p.value();
        if (!(*l.tail > q[last] && *l.tail < upper)) issues.emplace_back("tail exponent outside its open interval");
    }
    return issues;
}

double evaluate_chain(const ConstantChain& chain, const std::map<std::string, double>& bindings) {
    double product = 1.0;
    std::vector<std::string> missing;
    for (const auto& f : chain.factors) {
        const std::string key = f.key();
        std::optional<double> v = f.value;
        if (auto it = bindings.find(key); it != bindings.end()) v = it->second;
        if (!v) {
            missing.push_back(key);
            continue;
        }
        if (!(*v > 0.0)) throw DomainError("constant " + key + " must be positive");
        product *= *v;
    }
    if (!missing.empty()) {
        std::string msg = "unbound constant:";
        for (const auto& m : missing) msg += " " + m;
        throw UnboundConstant(msg, std::move(missing));
    }
    return product;
}

}  // namespace reslab::ladder
