#include <doctest.h>

#include "reslab/errors.hpp"
#include "reslab/ladder.hpp"

using namespace reslab;
using namespace reslab::ladder;

namespace {

LebesgueExponent P(long long num, long long den = 1) { return LebesgueExponent::finite(Rational(num, den)); }
const LebesgueExponent kInf = LebesgueExponent::infinity();

}  // namespace

TEST_CASE("next_exponent on the three recurrences") {
    CHECK(next_exponent(2, kInf, 8, LadderCase::ZeroV1) == 4);
    CHECK(next_exponent(2, P(10), 6, LadderCase::IntegrableHighP) == Rational(30, 13));
    CHECK(next_exponent(2, P(4), 6, LadderCase::IntegrableMidP) == Rational(12, 5));
    // 2·(7/2)·5 / ((5-4)·(7/2) + 2·5) = 35 / (27/2)
    CHECK(next_exponent(2, P(7, 2), 5, LadderCase::IntegrableMidP) == Rational(70, 27));
}

TEST_CASE("next_exponent rejects inputs outside its case") {
    CHECK_THROWS_AS(next_exponent(1, kInf, 8, LadderCase::ZeroV1), DomainError);
    CHECK_THROWS_AS(next_exponent(4, kInf, 8, LadderCase::ZeroV1), DomainError);
    CHECK_THROWS_AS(next_exponent(6, P(10), 6, LadderCase::IntegrableHighP), DomainError);
    // (6 - 20)·10 + 120 < 0
    CHECK_THROWS_AS(closed_form_exponent(10, P(10), 6, LadderCase::IntegrableHighP), LadderOverflow);
}

TEST_CASE("j0 at the quoted points") {
    CHECK(compute_j0(5, P(12), LadderCase::IntegrableHighP) == 0);
    CHECK_FALSE(compute_j0(4, P(5), LadderCase::IntegrableHighP).has_value());
    CHECK(compute_j0(6, P(10), LadderCase::IntegrableHighP) == 2);
    CHECK_THROWS_AS(compute_j0(3, P(5), LadderCase::IntegrableHighP), DomainError);
}

TEST_CASE("N = 6, p = 10 schedule by hand") {
    const auto l = plan_ladder(6, P(10));
    REQUIRE(l.exponents.size() == 4);
    CHECK(l.exponents[1] == Rational(30, 13));
    CHECK(l.exponents[2] == Rational(30, 11));
    CHECK(l.exponents[3] == Rational(10, 3));
    CHECK(l.ladder_case == LadderCase::IntegrableHighP);
    CHECK(l.terminal == RegularityClass::CB1);
    CHECK_FALSE(l.tail.has_value());
    CHECK(validate(l).empty());
    // C0 plus one rho per step
    CHECK(l.chain.size() == 4);
    CHECK(l.chain.count(FactorKind::Rho) == 3);
}

TEST_CASE("plan_ladder with V1 = 0") {
    SUBCASE("N = 12 lands on N/2 and takes a tail exponent") {
        const auto l = plan_ladder(12, kInf);
        REQUIRE(l.exponents.size() == 3);
        CHECK(l.exponents[0] == 2);
        CHECK(l.exponents[1] == 3);
        CHECK(l.exponents[2] == 6);
        CHECK(l.j0 == 1);
        CHECK(l.terminal == RegularityClass::CB1);
        REQUIRE(l.tail.has_value());
        CHECK(*l.tail == 9);
        CHECK(l.chain.count(FactorKind::C0) == 1);
        CHECK(l.chain.count(FactorKind::CTilde) == 1);
        CHECK(l.chain.count(FactorKind::C) == 2);
        CHECK(l.chain.count(FactorKind::Gamma) == 4);
    }
    SUBCASE("N = 13") {
        const auto l = plan_ladder(13, kInf);
        REQUIRE(l.exponents.size() == 4);
        CHECK(l.exponents[1] == Rational(26, 9));
        CHECK(l.exponents[2] == Rational(26, 5));
        CHECK(l.exponents[3] == 26);
        CHECK(l.j0 == 2);
        CHECK_FALSE(l.tail.has_value());
        // C0, j0+1 C factors, j0+2 gamma factors
        CHECK(l.chain.size() == 1 + 3 + 4);
    }
    SUBCASE("N = 4 is trivial") {
        const auto l = plan_ladder(4, kInf);
        CHECK_FALSE(l.j0.has_value());
        CHECK(l.exponents.size() == 1);
        CHECK(l.tail == Rational(3));
    }
}

TEST_CASE("classification table") {
    CHECK(plan_ladder(2, P(2)).terminal == RegularityClass::LqAll);
    CHECK(plan_ladder(1, P(2)).terminal == RegularityClass::CB1);
    CHECK(plan_ladder(3, P(2)).terminal == RegularityClass::CB0);
    CHECK(plan_ladder(5, P(4)).terminal == RegularityClass::CB0);
    CHECK(plan_ladder(5, P(4)).ladder_case == LadderCase::IntegrableMidP);
    CHECK(plan_ladder(5, P(6)).terminal == RegularityClass::CB1);
    CHECK(plan_ladder(5, P(5)).ladder_case == LadderCase::IntegrableMidP);
}

TEST_CASE("admissibility") {
    CHECK_THROWS_AS(plan_ladder(3, P(3)), DomainError);
    CHECK_THROWS_AS(plan_ladder(4, P(2)), DomainError);
    CHECK_THROWS_AS(plan_ladder(6, P(3)), DomainError);
    CHECK_THROWS_AS(plan_ladder(0, kInf), DomainError);
    CHECK_NOTHROW(plan_ladder(4, P(201, 100)));
    CHECK_NOTHROW(plan_ladder(6, P(301, 100)));
    try {
        plan_ladder(7, P(3));
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("N/2") != std::string::npos);
    }
}

TEST_CASE("iteration matches closed forms and floor rule over a sweep") {
    for (int n = 4; n <= 30; ++n) {
        for (int s = 1; s <= 12; ++s) {
            const auto p = LebesgueExponent::finite(Rational(n, 2) + Rational(s * n, 5));
            const auto c = classify(n, p);
            CHECK(j0_by_floor_rule(n, p, c) == j0_by_iteration(n, p, c));
            const auto l = plan_ladder(n, p);
            CHECK(validate(l).empty());
        }
    }
}

TEST_CASE("deterministic") {
    const auto a = plan_ladder(17, P(40, 3));
    const auto b = plan_ladder(17, P(40, 3));
    CHECK(a.exponents == b.exponents);
    CHECK(a.chain.size() == b.chain.size());
    for (std::size_t i = 0; i < a.chain.size(); ++i) CHECK(a.chain.factors[i].key() == b.chain.factors[i].key());
}

TEST_CASE("evaluate_chain") {
    ConstantChain chain;
    chain.factors.push_back({FactorKind::C, {2, 3, 12}, 2.0});
    chain.factors.push_back({FactorKind::Gamma, {2, 12}, 3.0});
    chain.factors.push_back({FactorKind::C0, {2, 6, 12}, std::nullopt});
    CHECK_THROWS_AS(evaluate_chain(chain), UnboundConstant);
    try {
        evaluate_chain(chain);
    } catch (const UnboundConstant& e) {
        REQUIRE(e.missing().size() == 1);
        CHECK(e.missing()[0] == "C0(2,6,12)");
    }
    std::map<std::string, double> b{{"C0(2,6,12)", 5.0}};
    CHECK(evaluate_chain(chain, b) == doctest::Approx(30.0));
    // scaling one binding scales the product exactly
    b["C0(2,6,12)"] = 5.0 * 7.0;
    CHECK(evaluate_chain(chain, b) == doctest::Approx(210.0));

    const auto l = plan_ladder(12, kInf);
    std::map<std::string, double> ones;
    for (const auto& f : l.chain.factors) ones[f.key()] = 1.0;
    CHECK(evaluate_chain(l.chain, ones) == 1.0);
}

TEST_CASE("parse_rational") {
    CHECK(parse_rational("7") == 7);
    CHECK(parse_rational("7/3") == Rational(7, 3));
    CHECK(parse_rational("2.5") == Rational(5, 2));
    CHECK(parse_rational("-1/2") == Rational(-1, 2));
    CHECK_THROWS_AS(parse_rational("x"), DomainError);
    CHECK_THROWS_AS(parse_rational("1/0"), DomainError);
    CHECK(to_string(Rational(30, 13)) == "30/13");
}
