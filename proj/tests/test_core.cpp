#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gwfock/json_io.hpp"
#include "gwfock/poly.hpp"
#include "gwfock/rational.hpp"

#include <random>

using namespace gwfock;

namespace {

const TruncationSpec kSpec{2, 3, 6, 2, 4};

PolyT t_var(int mu, int k) { return PolyT::variable(kSpec, VarIndex{mu, k}); }

Monomial mono(std::vector<std::pair<int, int>> vars)
{
    Monomial m;
    for (auto [mu, k] : vars)
        m = m.times(VarIndex{mu, k});
    return m;
}

// Deterministic random polynomial with small coefficients.
PolyT random_poly(std::mt19937_64& rng, int terms)
{
    std::uniform_int_distribution<int> mu(0, kSpec.rank - 1);
    std::uniform_int_distribution<int> k(0, kSpec.max_desc);
    std::uniform_int_distribution<int> deg(0, 3);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 9);
    PolyT p(kSpec);
    for (int i = 0; i < terms; ++i) {
        Monomial m;
        int d = deg(rng);
        for (int j = 0; j < d; ++j)
            m = m.times(VarIndex{mu(rng), k(rng)});
        p.add_term(m, Rational(num(rng), den(rng)));
    }
    return p;
}

} // namespace

TEST_CASE("rational parsing canonicalizes")
{
    CHECK(parse_rational("2/4") == Rational(1, 2));
    CHECK(parse_rational("-3/9") == Rational(-1, 3));
    CHECK(parse_rational("7") == Rational(7));
    CHECK(parse_rational("0/5") == Rational(0));
    CHECK(to_string(Rational(1, 24)) == "1/24");
    CHECK(to_string(Rational(-5)) == "-5");
    CHECK(denominator(parse_rational("10/-4")) > 0);
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("x"));
    CHECK_THROWS(parse_rational(""));
}

TEST_CASE("double factorial helper")
{
    CHECK(odd_double_factorial(0) == 1);  // (-1)!!
    CHECK(odd_double_factorial(1) == 1);  // 1!!
    CHECK(odd_double_factorial(2) == 3);  // 3!!
    CHECK(odd_double_factorial(3) == 15); // 5!!
    CHECK(odd_double_factorial(4) == 105);
}

TEST_CASE("monomial product of variables")
{
    // (t^0_0) * (t^0_0) = (t^0_0)^2 with coefficient 1.
    PolyT p = t_var(0, 0) * t_var(0, 0);
    CHECK(p.term_count() == 1);
    CHECK(p.coefficient(mono({{0, 0}, {0, 0}})) == 1);
}

TEST_CASE("additive inverse cancels")
{
    std::mt19937_64 rng(7);
    PolyT a = random_poly(rng, 12);
    PolyT minus = a;
    minus.scale(Rational(-1));
    CHECK((a + minus).is_zero());
}

TEST_CASE("degree cutoff truncates products")
{
    TruncationSpec tight{1, 3, 3, 2, 4};
    PolyT a(tight), b(tight);
    Monomial t0sq = mono({{0, 0}, {0, 0}});
    a.add_term(t0sq, Rational(1, 2));
    b.add_term(t0sq, Rational(1, 3));
    CHECK((a * b).is_zero()); // degree-4 term cut at D = 3
}

TEST_CASE("ring axioms on random triples")
{
    std::mt19937_64 rng(20240817);
    for (int i = 0; i < 20; ++i) {
        PolyT a = random_poly(rng, 6);
        PolyT b = random_poly(rng, 6);
        PolyT c = random_poly(rng, 6);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
    }
}

TEST_CASE("mixed specs are rejected")
{
    TruncationSpec other = kSpec;
    other.max_degree = 5;
    PolyT a(kSpec), b(other);
    a.add_term(Monomial{}, Rational(1));
    b.add_term(Monomial{}, Rational(1));
    CHECK_THROWS_AS(a + b, SpecMismatchError);
    CHECK_THROWS_AS(a * b, SpecMismatchError);
}

TEST_CASE("variable indices outside the spec are rejected")
{
    PolyT p(kSpec);
    CHECK_THROWS(p.add_term(Monomial::variable(VarIndex{2, 0}), Rational(1)));
    CHECK_THROWS(p.add_term(Monomial::variable(VarIndex{0, 4}), Rational(1)));
}

TEST_CASE("formal derivative")
{
    // d/dt_0 (t_0^3 / 6) = t_0^2 / 2, third derivative 1, absent variable 0.
    PolyT cube(kSpec);
    cube.add_term(mono({{0, 0}, {0, 0}, {0, 0}}), Rational(1, 6));
    PolyT d1 = diff(cube, VarIndex{0, 0});
    CHECK(d1.coefficient(mono({{0, 0}, {0, 0}})) == Rational(1, 2));
    CHECK(diff(cube, VarIndex{0, 1}).is_zero());
    PolyT d3 = diff(diff(d1, VarIndex{0, 0}), VarIndex{0, 0});
    CHECK(d3.coefficient(Monomial{}) == 1);
}

TEST_CASE("derivatives commute")
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 10; ++i) {
        PolyT p = random_poly(rng, 10);
        VarIndex u{0, 1}, v{1, 2};
        CHECK(diff(diff(p, u), v) == diff(diff(p, v), u));
    }
}

TEST_CASE("dilaton shift moves the unit descendent variable")
{
    // t^unit_1 -> q^unit_1 + 1.
    PolyT t11 = t_var(0, 1);
    PolyQ shifted = dilaton_shift_to_q(t11);
    CHECK(shifted.coefficient(mono({{0, 1}})) == 1);
    CHECK(shifted.coefficient(Monomial{}) == 1);
    CHECK(shifted.term_count() == 2);
}

TEST_CASE("dilaton shift leaves other variables alone")
{
    PolyT p = t_var(1, 1) + t_var(0, 2) * t_var(0, 0);
    PolyQ shifted = dilaton_shift_to_q(p);
    CHECK(shifted.term_count() == p.term_count());
    CHECK(shifted.coefficient(mono({{1, 1}})) == 1);
    CHECK(shifted.coefficient(mono({{0, 2}, {0, 0}})) == 1);
}

TEST_CASE("dilaton shift round trips")
{
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 10; ++i) {
        PolyT p = random_poly(rng, 10);
        CHECK(dilaton_shift_to_t(dilaton_shift_to_q(p)) == p);
    }
    PolyT sq = t_var(0, 1) * t_var(0, 1);
    CHECK(dilaton_shift_to_t(dilaton_shift_to_q(sq)) == sq);
}

TEST_CASE("dilaton shift is an algebra homomorphism up to the cutoff")
{
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 8; ++i) {
        PolyT a = random_poly(rng, 5);
        PolyT b = random_poly(rng, 5);
        // Shifting can only lower degrees, so no truncation slack is needed.
        CHECK(dilaton_shift_to_q(a * b) == dilaton_shift_to_q(a) * dilaton_shift_to_q(b));
    }
}

TEST_CASE("dilaton shift needs the k=1 slot")
{
    TruncationSpec no_k1{1, 0, 4, 1, 2};
    PolyT p(no_k1);
    p.add_term(Monomial::variable(VarIndex{0, 0}), Rational(1));
    CHECK_THROWS(dilaton_shift_to_q(p));
}

TEST_CASE("coefficient reads")
{
    PolyT cube(kSpec);
    cube.add_term(mono({{0, 0}, {0, 0}, {0, 0}}), Rational(1, 6));
    CHECK(cube.coefficient(mono({{0, 0}, {0, 0}, {0, 0}})) == Rational(1, 6));
    CHECK(cube.coefficient(mono({{0, 0}, {0, 0}})) == 0);
    std::mt19937_64 rng(5);
    PolyT a = random_poly(rng, 8), b = random_poly(rng, 8);
    Monomial m = mono({{0, 1}, {1, 0}});
    CHECK((a + b).coefficient(m) == a.coefficient(m) + b.coefficient(m));
}

TEST_CASE("small phase space evaluation")
{
    PolyT p = t_var(0, 0) * t_var(1, 0) + t_var(0, 1);
    CHECK(evaluate_small_phase(p, {Rational(2), Rational(3)}) == 6); // t_1 slot vanishes
    CHECK(evaluate_small_phase(p, {Rational(0), Rational(3)}) == 0);
}

TEST_CASE("polynomial json round trip is exact")
{
    std::mt19937_64 rng(777);
    for (int i = 0; i < 6; ++i) {
        PolyT p = random_poly(rng, 12);
        Json j = to_json(p);
        CHECK(poly_t_from_json(j) == p);
        // byte-identical re-serialization
        CHECK(to_json(poly_t_from_json(j)).dump() == j.dump());
    }
}

TEST_CASE("frame tags are enforced on load")
{
    PolyT p = t_var(0, 0);
    Json j = to_json(p);
    CHECK_THROWS(poly_q_from_json(j));
    j["frame"] = "q";
    CHECK(poly_q_from_json(j).coefficient(mono({{0, 0}})) == 1);
}

TEST_CASE("truncation spec validation")
{
    CHECK_THROWS(TruncationSpec{0, 3, 6, 2, 4}.validate());
    CHECK_THROWS(TruncationSpec{1, -1, 6, 2, 4}.validate());
    CHECK_THROWS(TruncationSpec{1, 3, 0, 2, 4}.validate());
    TruncationSpec ok{1, 0, 1, 0, 0};
    ok.validate();
}
