#include <doctest.h>

#include <random>

#include "thhcalc/error.hpp"
#include "thhcalc/presentation.hpp"
#include "support.hpp"

using namespace thhcalc;
using namespace thhcalc::testing;

namespace {

// Values of a (0,0) element at every point of F_p^k, in the coordinates y_i.
std::vector<Fp> values(const Presentation& A, const Element& e)
{
    const int p = A.p();
    const std::size_t k = A.num_generators();
    std::size_t count = 1;
    for (std::size_t i = 0; i < k; ++i)
        count *= static_cast<std::size_t>(p);
    std::vector<Fp> out(count, 0);
    for (std::size_t pt = 0; pt < count; ++pt) {
        std::size_t rest = pt;
        std::vector<int> y(k);
        for (std::size_t i = 0; i < k; ++i) {
            y[i] = static_cast<int>(rest % static_cast<std::size_t>(p));
            rest /= static_cast<std::size_t>(p);
        }
        int acc = 0;
        for (const auto& [m, c] : e.terms) {
            int t = c;
            for (std::size_t i = 0; i < k; ++i)
                for (int j = 0; j < m[i]; ++j)
                    t = t * y[i] % p;
            acc = (acc + t) % p;
        }
        out[pt] = static_cast<Fp>(acc);
    }
    return out;
}

}  // namespace

TEST_CASE("basis of F3[s]⊗Λ[d] in bidegree (3,1)")
{
    Presentation A(PrimeField(3), {gen("s", 2, 0), gen("d", 1, 1, GeneratorKind::Exterior)}, {}, {0, 12, 6});
    const auto& b = A.basis({3, 1});
    REQUIRE(b.size() == 1);
    CHECK(A.format_monomial(b[0]) == "s*d");
    CHECK(A.dim({4, 0}) == 1);
    CHECK(A.dim({4, 1}) == 0);
    CHECK_FALSE(A.weight_truncated());
}

TEST_CASE("trivial presentation has the unit only")
{
    auto T = Presentation::trivial(PrimeField(3), {0, 5, 5});
    REQUIRE(T.dim({0, 0}) == 1);
    CHECK(T.format_monomial(T.basis({0, 0})[0]) == "1");
    CHECK(T.dim({1, 0}) == 0);
}

TEST_CASE("bounded exponent at (0,0)")
{
    auto A = separable(3, 1);
    CHECK(A.dim({0, 0}) == 3);
    CHECK(A.multiply(A.generator(0), A.power(A.generator(0), 2)) == A.generator(0));
}

TEST_CASE("window violations and local finiteness")
{
    Presentation A(PrimeField(3), {gen("s", 2, 0)}, {}, {0, 10, 0});
    CHECK_THROWS_AS(A.basis({12, 0}), WindowError);
    CHECK_THROWS_AS(Presentation(PrimeField(3), {gen("y", 0, 0)}, {}, {0, 4, 4}), PresentationError);
    CHECK_THROWS_AS(Presentation(PrimeField(3), {gen("z", -2, 0)}, {}, {0, 4, 4}), PresentationError);
    CHECK_THROWS_AS(Presentation(PrimeField(3), {gen("e", 2, 0, GeneratorKind::Exterior)}, {}, {0, 4, 4}),
                    PresentationError);
    CHECK_THROWS_AS(Presentation(PrimeField(3), {gen("a", 2, 0), gen("a", 4, 0)}, {}, {0, 4, 4}), PresentationError);
}

TEST_CASE("rules must be homogeneous and triangular")
{
    // b^2 -> a*b with a declared after b is not decreasing.
    std::vector<GeneratorSpec> g{gen("b", 2, 0), gen("a", 2, 0)};
    CHECK_THROWS_AS(Presentation(PrimeField(2), g, {{0, 2, mono({1, 1})}}, {0, 8, 0}), PresentationError);
    CHECK_NOTHROW(Presentation(PrimeField(2), g, {{1, 2, mono({1, 1})}}, {0, 8, 0}));
    CHECK_THROWS_AS(Presentation(PrimeField(2), g, {{1, 2, mono({1, 0})}}, {0, 8, 0}), PresentationError);
}

TEST_CASE("(d eta)^2 = v1 d eta at p = 2")
{
    Presentation A(PrimeField(2), {gen("v1", 2, 0), gen("deta", 2, 0)}, {{1, 2, mono({1, 1})}}, {0, 12, 0});
    const auto de = A.generator(1);
    CHECK(A.format(A.multiply(de, de)) == "v1*deta");
    // deta^3 = v1 deta^2 = v1^2 deta
    CHECK(A.format(A.power(de, 3)) == "v1^2*deta");
    CHECK(A.dim({4, 0}) == 2);
}

TEST_CASE("Koszul signs")
{
    Presentation A(PrimeField(3),
                   {gen("l1", 5, 0, GeneratorKind::Exterior), gen("l2", 17, 4, GeneratorKind::Exterior),
                    gen("s", 6, 0)},
                   {}, {0, 40, 10});
    const auto l1 = A.generator(0), l2 = A.generator(1), s = A.generator(2);
    CHECK(A.multiply(l1, l2) == A.scale(A.multiply(l2, l1), 2));
    CHECK(A.multiply(l1, l1).is_zero());
    CHECK(A.multiply(s, l1) == A.multiply(l1, s));
    CHECK(A.multiply(A.unit(), l2) == l2);
}

TEST_CASE("divided power expansion")
{
    auto g = expand_divided_powers(gen("b", 12, 0, GeneratorKind::DividedPower), 3, 40);
    REQUIRE(g.size() == 2);
    CHECK(g[0].name == "b");
    CHECK(g[0].degree == Bidegree{12, 0});
    CHECK(g[1].degree == Bidegree{36, 0});
    CHECK(g[1].kind == GeneratorKind::Bounded);
    CHECK(g[1].height == 3);

    CHECK(expand_divided_powers(gen("x", 50, 0, GeneratorKind::DividedPower), 3, 40).empty());
    CHECK_THROWS_AS(expand_divided_powers(gen("x", 3, 0, GeneratorKind::DividedPower), 3, 40), PresentationError);
    CHECK_THROWS_AS(expand_divided_powers(gen("x", 0, 0, GeneratorKind::DividedPower), 3, 40), PresentationError);

    // Γ[dα₁] at p = 5: one class in each degree k(2p-2).
    const int p = 5;
    auto dg = expand_generators({gen("da", 8, 8, GeneratorKind::DividedPower)}, p, 90);
    Presentation G(PrimeField(p), dg, {}, {0, 90, 90});
    for (int k = 0; k < 11; ++k)
        CHECK(G.dim({8 * k, 8 * k}) == 1);
    // γ_a γ_b = binom(a+b, a) γ_{a+b}
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; b + a <= 11; ++b) {
            long long binom = 1;
            for (int i = 1; i <= a; ++i)
                binom = binom * (a + b - i + 1) / i;
            CHECK(G.multiply(G.divided_power("da", a), G.divided_power("da", b)) ==
                  G.scale(G.divided_power("da", a + b), G.field().reduce(binom)));
        }
}

TEST_CASE("tensor products")
{
    PrimeField F(3);
    Presentation S(F, {gen("s", 2, 0)}, {}, {0, 20, 4});
    Presentation D(F, {gen("d", 1, 1, GeneratorKind::Exterior)}, {}, {0, 20, 4});
    auto T = tensor(S, D);
    Presentation direct(F, {gen("s", 2, 0), gen("d", 1, 1, GeneratorKind::Exterior)}, {}, {0, 20, 4});
    for (int n = 0; n <= 20; ++n)
        for (int w = 0; w <= 4; ++w)
            CHECK(T.dim({n, w}) == direct.dim({n, w}));

    auto U = tensor(T, Presentation::trivial(F, {0, 20, 4}));
    for (int n = 0; n <= 20; ++n)
        for (int w = 0; w <= 4; ++w)
            CHECK(U.dim({n, w}) == T.dim({n, w}));

    // Convolution against brute force, with a name clash and a rule.
    Presentation A(F, {gen("x", 2, 1), gen("e", 3, 0, GeneratorKind::Exterior)}, {{0, 3, {}}}, {-2, 24, 8});
    Presentation B(F, {gen("x", 4, 0), gen("z", -1, 0, GeneratorKind::Exterior)}, {}, {-2, 24, 8});
    auto AB = tensor(A, B);
    CHECK(AB.find_generator("x_2").has_value());
    for (int n = -1; n <= 24; ++n)
        for (int w = 0; w <= 8; ++w) {
            std::size_t conv = 0;
            for (int i = -2; i <= 24; ++i)
                for (int j = 0; j <= w; ++j) {
                    const int n2 = n - i;
                    if (n2 < -2 || n2 > 24)
                        continue;
                    conv += A.dim({i, j}) * B.dim({n2, w - j});
                }
            CHECK(AB.dim({n, w}) == conv);
        }

    CHECK_THROWS_AS(tensor(Presentation::trivial(F, {0, 3, 0}), Presentation::trivial(F, {5, 8, 0})), WindowError);
}

TEST_CASE("graded commutativity and associativity on random monomials")
{
    // ko-like ring with a nontrivial rule, odd generators and a (0,0) block.
    for (int p : {2, 3}) {
        PrimeField F(p);
        std::vector<GeneratorSpec> g{gen("v1", 2, 0), gen("deta", 2, 0),
                                     gen("l", 3, 0, GeneratorKind::Exterior), gen("a", 5, 2, GeneratorKind::Exterior),
                                     gen("z", -1, 0, GeneratorKind::Exterior), gen("y", 0, 0)};
        if (p == 3) {
            g[0].degree = {4, 0};
            g[1].degree = {4, 0};
        }
        std::vector<RewriteRule> rules{{1, 2, mono({1, 1, 0, 0, 0, 0})}, {5, p, mono({0, 0, 0, 0, 0, 1})}};
        Presentation A(F, g, rules, {-1, 24, 6});

        std::vector<Monomial> all;
        for (const auto& b : A.support())
            for (const auto& m : A.basis(b))
                all.push_back(m);
        std::mt19937 rng(17 + p);
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        for (int t = 0; t < 1000; ++t) {
            const auto& a = all[pick(rng)];
            const auto& b = all[pick(rng)];
            const auto& c = all[pick(rng)];
            const Element ea = A.monomial_element(a), eb = A.monomial_element(b), ec = A.monomial_element(c);
            const int sgn = A.parity(a) * A.parity(b);
            CHECK(A.multiply(ea, eb) == A.scale(A.multiply(eb, ea), sgn ? F.neg(1) : 1));
            CHECK(A.multiply(A.multiply(ea, eb), ec) == A.multiply(ea, A.multiply(eb, ec)));
            CHECK(A.normalize(a) == ea);
        }
        CHECK(A.multiply(A.generator(2), A.generator(2)).is_zero());
    }
}

TEST_CASE("separable model idempotents")
{
    for (int p : {2, 3, 5}) {
        const int level = p == 5 ? 1 : 2;
        auto A = separable(p, level);
        std::size_t expect = 1;
        for (int i = 0; i < level; ++i)
            expect *= static_cast<std::size_t>(p);
        CHECK(A.dim({0, 0}) == expect);

        std::vector<Element> idem{A.unit()};
        for (int i = 0; i < level; ++i) {
            std::vector<Element> next;
            for (const auto& e : idem)
                for (int c = 0; c < p; ++c) {
                    // e_c = 1 - (y - c)^{p-1}
                    auto shifted = A.sub(A.generator(static_cast<std::size_t>(i)), A.scalar(c));
                    auto ec = A.sub(A.unit(), A.power(shifted, p - 1));
                    next.push_back(A.multiply(e, ec));
                }
            idem = std::move(next);
        }
        REQUIRE(idem.size() == expect);
        Element sum;
        std::vector<FpVector> rows;
        for (std::size_t i = 0; i < idem.size(); ++i) {
            CHECK(A.multiply(idem[i], idem[i]) == idem[i]);
            for (std::size_t j = i + 1; j < idem.size(); ++j)
                CHECK(A.multiply(idem[i], idem[j]).is_zero());
            sum = A.add(sum, idem[i]);
            rows.push_back(A.to_vector(idem[i], {0, 0}));
        }
        CHECK(sum == A.unit());
        CHECK(rank(FpMatrix::from_rows(expect, rows), A.field()) == expect);
    }
}

TEST_CASE("identity homomorphism and zeta to zero")
{
    PrimeField F(3);
    Presentation A(F, {gen("s", 4, 0), gen("z", -1, 0, GeneratorKind::Exterior)}, {}, {-1, 12, 0});
    auto id = apply_hom(A, A, {A.generator(0), A.generator(1)});
    for (const auto& [b, m] : id.matrices)
        CHECK(m == FpMatrix::identity(A.dim(b)));

    Presentation L(F, {gen("z", -1, 0, GeneratorKind::Exterior)}, {}, {-1, 0, 0});
    auto kill = apply_hom(L, L, {Element{}});
    CHECK(kill.rank_at({-1, 0}, F) == 0);
    CHECK(kill.rank_at({0, 0}, F) == 1);

    auto Y = separable(3, 1);
    CHECK_NOTHROW(apply_hom(Y, Y, {Y.scalar(2)}));
    CHECK_THROWS_AS(apply_hom(A, A, {A.generator(1), A.generator(1)}), PresentationError);
}

TEST_CASE("restriction of functions on Z/9 to 3Z/9")
{
    // Witt coordinates of x: y0 = x, y1 = (y0^3 - y0)/3, read mod 3.
    auto witt = [](long long x) {
        const long long y1 = (x * x * x - x) / 3;
        return std::pair<int, int>{static_cast<int>(((x % 3) + 3) % 3), static_cast<int>(((y1 % 3) + 3) % 3)};
    };
    auto src = separable(3, 2);
    auto tgt = separable(3, 1);
    const PrimeField& F = src.field();

    // Interpolate each restricted coordinate as a polynomial in the target y0 (= t mod 3).
    FpMatrix vander(3, 3);
    for (int t = 0; t < 3; ++t)
        for (int j = 0; j < 3; ++j)
            vander.at(static_cast<std::size_t>(t), static_cast<std::size_t>(j)) = F.pow(static_cast<Fp>(t), j);
    std::vector<Element> images;
    for (int coord = 0; coord < 2; ++coord) {
        FpMatrix aug(3, 4);
        for (int t = 0; t < 3; ++t) {
            auto [y0, y1] = witt(3 * t);
            for (int j = 0; j < 3; ++j)
                aug.at(static_cast<std::size_t>(t), static_cast<std::size_t>(j)) =
                    vander.at(static_cast<std::size_t>(t), static_cast<std::size_t>(j));
            aug.at(static_cast<std::size_t>(t), 3) = static_cast<Fp>(coord == 0 ? y0 : y1);
        }
        auto r = rref(aug, F);
        Element img;
        for (std::size_t row = 0; row < r.rank; ++row) {
            const Fp c = r.reduced.at(row, 3);
            if (c == 0)
                continue;
            img = tgt.add(img, tgt.scale(tgt.power(tgt.generator(0), static_cast<int>(r.pivots[row])), c));
        }
        images.push_back(img);
    }
    CHECK(images[0].is_zero());
    CHECK(images[1] == tgt.scale(tgt.generator(0), 2));

    auto h = apply_hom(src, tgt, images);
    CHECK(src.dim({0, 0}) == 9);
    CHECK(h.rank_at({0, 0}, F) == 3);

    // The map on values: image function at t equals source function at 3t.
    for (const auto& m : src.basis({0, 0})) {
        auto sv = values(src, src.monomial_element(m));
        auto tv = values(tgt, evaluate_monomial(src, tgt, images, m));
        for (int t = 0; t < 3; ++t) {
            auto [y0, y1] = witt(3 * t);
            CHECK(tv[static_cast<std::size_t>(t)] == sv[static_cast<std::size_t>(y0 + 3 * y1)]);
        }
    }
}
