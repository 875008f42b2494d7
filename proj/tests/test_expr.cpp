#include <doctest.h>

#include "support.hpp"
#include "thhcalc/error.hpp"
#include "thhcalc/expr.hpp"

using namespace thhcalc;
using namespace thhcalc::testing;

namespace {

long long ev(std::string_view text, int p = 3, int k = 2)
{
    return eval_int(text, {1, 1}, {p, k}, "test");
}

}  // namespace

TEST_CASE("integer expressions")
{
    CHECK(ev("2p^2-2") == 16);
    CHECK(ev("2p^2-2", 5) == 48);
    CHECK(ev("(p-1)*(2p-2)", 5) == 32);
    CHECK(ev("p^k") == 9);
    CHECK(ev("2^3^2") == 512);
    CHECK(ev("-p+1") == -2);
    CHECK(ev("2(p+1)") == 8);
    CHECK(ev(" 7 ") == 7);
}

TEST_CASE("parse errors carry line and column")
{
    try {
        ev("2p +");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 5);
    }
    try {
        eval_int("1 $ 2", {4, 10}, {3, 2}, "x");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
        CHECK(e.column() == 12);
    }
    CHECK_THROWS_AS(ev("(1+2"), ParseError);
    CHECK_THROWS_AS(ev(""), ParseError);
}

TEST_CASE("unknown integer variables are semantic errors")
{
    try {
        ev("q+1");
        FAIL("no error");
    } catch (const ScenarioError& e) {
        CHECK(e.field() == "test");
    }
}

TEST_CASE("element expressions")
{
    const Presentation A(PrimeField(3), {gen("x", 2, 0), gen("e", 1, 1, GeneratorKind::Exterior)}, {}, {0, 12, 4});
    const Element a = eval_element("x^2 e - 2 e x^2", {1, 1}, A, {3, 2}, "t");
    const Element x2e = A.multiply(A.generator(0), A.multiply(A.generator(0), A.generator(1)));
    CHECK(a == A.multiply(A.scalar(2), x2e));
    CHECK(eval_element("e e", {1, 1}, A, {3, 2}, "t").is_zero());
    CHECK(eval_element("x^(p-1)", {1, 1}, A, {3, 2}, "t") == A.multiply(A.generator(0), A.generator(0)));
    CHECK_THROWS_AS(eval_element("y", {1, 1}, A, {3, 2}, "t"), ScenarioError);
    CHECK_THROWS_AS(eval_element("x^-1", {1, 1}, A, {3, 2}, "t"), ScenarioError);
}

TEST_CASE("divided powers by name")
{
    auto gens = expand_generators({gen("g", 2, 2, GeneratorKind::DividedPower)}, 3, 20);
    const Presentation A(PrimeField(3), gens, {}, {0, 20, 20});
    const Element g1 = A.generator(0);
    // gamma_4 = gamma_1 gamma_3 and g^4 = 4! gamma_4 = 0 mod 3
    const Element g4 = eval_element("gamma(4, g)", {1, 1}, A, {3, 2}, "t");
    CHECK_FALSE(g4.is_zero());
    CHECK(g4 == A.multiply(g1, eval_element("gamma(3, g)", {1, 1}, A, {3, 2}, "t")));
    CHECK(eval_element("g^3", {1, 1}, A, {3, 2}, "t").is_zero());
    CHECK_THROWS_AS(eval_element("gamma(2, x)", {1, 1}, A, {3, 2}, "t"), ScenarioError);
}
