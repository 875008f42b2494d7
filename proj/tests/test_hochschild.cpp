#include <doctest.h>

#include <random>

#include "support.hpp"
#include "thhcalc/error.hpp"
#include "thhcalc/hochschild.hpp"

using namespace thhcalc;
using namespace thhcalc::testing;

namespace {

Presentation poly(int p, int n, int w, Window win)
{
    return Presentation(PrimeField(p), {gen("x", n, w)}, {}, win);
}

BarChain neg(const BarChain& c, const PrimeField& F)
{
    BarChain out;
    for (const auto& [t, x] : c)
        out.emplace(t, F.neg(x));
    return out;
}

BarChain sum(BarChain a, const BarChain& b, const PrimeField& F)
{
    for (const auto& [t, x] : b) {
        auto [it, ins] = a.emplace(t, x);
        if (!ins) {
            it->second = F.add(it->second, x);
            if (it->second == 0)
                a.erase(it);
        }
    }
    return a;
}

BarChain boundary(const BarComplex& C, const BarChain& c)
{
    const PrimeField& F = C.algebra().field();
    BarChain out;
    for (const auto& [t, x] : c) {
        BarChain d;
        for (const auto& [u, y] : C.boundary(t))
            d.emplace(u, F.mul(x, y));
        out = sum(out, d, F);
    }
    return out;
}

std::vector<std::size_t> by_degree(const std::map<int, std::size_t>& m)
{
    std::vector<std::size_t> out;
    for (const auto& [n, d] : m)
        out.push_back(d);
    return out;
}

}  // namespace

TEST_CASE("HH of F_p is F_p in degree 0")
{
    for (int p : {2, 3, 5}) {
        auto A = Presentation::trivial(PrimeField(p), {0, 6, 2});
        BarComplex C(A, 4, {0, 6, 2});
        HHResult H(C);
        auto dims = H.dims();
        REQUIRE(dims.size() == 1);
        CHECK(dims.begin()->first == Bidegree{0, 0});
        CHECK(dims.begin()->second == 1);
    }
}

TEST_CASE("HKR for F3[x], |x| = 2")
{
    auto A = poly(3, 2, 0, {0, 8, 0});
    BarComplex C(A, 3, {0, 8, 0});
    CHECK(C.cap_sufficient());
    HHResult H(C);
    CHECK(by_degree(H.degree_dims()) == std::vector<std::size_t>{1, 0, 1, 1, 1, 1, 1, 1, 1});

    BarComplex short_cap(A, 2, {0, 8, 0});
    CHECK_FALSE(short_cap.cap_sufficient());
}

TEST_CASE("b squares to zero")
{
    std::vector<Presentation> algebras;
    algebras.push_back(Presentation(PrimeField(3), {gen("x", 2, 0), gen("e", 3, 1, GeneratorKind::Exterior)}, {},
                                    {0, 9, 2}));
    algebras.push_back(Presentation(PrimeField(2), {gen("v", 2, 1), gen("t", 2, 1)},
                                    {{1, 2, mono({1, 1})}}, {0, 8, 3}));
    algebras.push_back(Presentation(PrimeField(5), {gen("v", 0, 1), gen("a", 3, 0, GeneratorKind::Exterior)}, {},
                                    {0, 8, 3}));
    for (const auto& A : algebras) {
        BarComplex C(A, 4, {0, A.window().n_max, A.window().w_max});
        const PrimeField& F = A.field();
        for (const auto& key : C.keys()) {
            if (key.k < 2)
                continue;
            const FpMatrix d1 = C.boundary_matrix(key);
            const FpMatrix d2 = C.boundary_matrix({key.m, key.w, key.k - 1});
            CHECK(d1.multiply(d2, F).is_zero());
        }
        CHECK_NOTHROW(HHResult{C});
    }
}

TEST_CASE("shuffle product: unit, chain map, graded commutativity")
{
    auto A = Presentation(PrimeField(3), {gen("x", 2, 0), gen("e", 3, 1, GeneratorKind::Exterior)}, {},
                          {0, 12, 3});
    BarComplex C(A, 4, {0, 12, 3});
    const PrimeField& F = A.field();
    std::mt19937 rng(7);
    std::vector<BarTensor> pool;
    for (const auto& key : C.keys())
        if (key.total().n <= 6)
            for (const auto& t : C.basis(key))
                pool.push_back(t);
    REQUIRE(pool.size() > 10);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);

    const BarTensor one{A.unit_monomial()};
    for (int s = 0; s < 200; ++s) {
        const BarTensor& x = pool[pick(rng)];
        const BarTensor& y = pool[pick(rng)];
        const int nx = C.key_of(x).total().n, ny = C.key_of(y).total().n;

        BarChain cx, cy;
        cx.emplace(x, 1);
        cy.emplace(y, 1);
        CHECK(C.shuffle(one, x) == cx);

        // d(x * y) = dx * y + (-1)^|x| x * dy
        const BarChain lhs = boundary(C, C.shuffle(cx, cy));
        BarChain right = C.shuffle(cx, boundary(C, cy));
        if (nx & 1)
            right = neg(right, F);
        CHECK(lhs == sum(C.shuffle(boundary(C, cx), cy), right, F));

        BarChain yx = C.shuffle(cy, cx);
        if ((nx * ny) & 1)
            yx = neg(yx, F);
        CHECK(C.shuffle(cx, cy) == yx);
    }
}

TEST_CASE("bar complex agrees with the closed form")
{
    struct Case {
        Presentation A;
        Window w;
    };
    std::vector<Case> cases{
        {poly(3, 2, 0, {0, 10, 0}), {0, 10, 0}},
        {poly(2, 1, 0, {0, 8, 0}), {0, 8, 0}},
        {poly(5, 0, 1, {0, 6, 4}), {0, 6, 4}},
        {Presentation(PrimeField(3), {gen("e", 3, 0, GeneratorKind::Exterior)}, {}, {0, 12, 0}), {0, 12, 0}},
        {Presentation(PrimeField(3), {gen("x", 2, 0), gen("e", 1, 1, GeneratorKind::Exterior)}, {}, {0, 8, 2}),
         {0, 8, 2}},
    };
    for (const auto& c : cases) {
        BarComplex C(c.A, c.w.n_max + 1, c.w);
        REQUIRE(C.cap_sufficient());
        HHResult H(C);
        const Presentation E = hkr_expected(c.A, 1);
        std::map<Bidegree, std::size_t> expected;
        for (const auto& b : E.support())
            if (c.w.contains(b))
                expected[b] = E.dim(b);
        CHECK(H.dims() == expected);
    }
}

TEST_CASE("closed form rejects unrecognized blocks")
{
    Presentation A(PrimeField(2), {gen("v", 2, 1), gen("t", 2, 1)}, {{1, 2, mono({1, 1})}}, {0, 8, 3});
    CHECK_THROWS_AS(hkr_expected(A, 1), PresentationError);
}

TEST_CASE("cap stability")
{
    auto A = Presentation(PrimeField(3), {gen("x", 2, 0), gen("e", 3, 1, GeneratorKind::Exterior)}, {},
                          {0, 10, 2});
    const Window w{0, 10, 2};
    int cap = 1;
    while (!BarComplex(A, cap, w).cap_sufficient())
        ++cap;
    BarComplex C1(A, cap, w), C2(A, cap + 1, w);
    CHECK(HHResult(C1).dims() == HHResult(C2).dims());
}

TEST_CASE("Kunneth for F3[v0] and F3[v1]")
{
    Presentation a(PrimeField(3), {gen("v0", 0, 1)}, {}, {0, 12, 3});
    Presentation b(PrimeField(3), {gen("v1", 4, 0)}, {}, {0, 12, 3});
    auto rep = kunneth_check(a, b, {0, 12, 3}, 13, 1);
    CHECK(rep.ok);
    for (const auto& m : rep.mismatches)
        MESSAGE(m);
}

TEST_CASE("suspension classes and products")
{
    auto A = poly(3, 2, 0, {0, 8, 0});
    BarComplex C(A, 3, {0, 8, 0});
    HHResult H(C);
    const HHClass dx = H.suspension(0);
    CHECK_FALSE(H.is_zero(dx));
    CHECK(dx.key == BarKey{2, 0, 1});
    // (dx)^2 = 0 and x dx != 0
    CHECK(H.is_zero(H.product(dx, dx)));
    const HHClass x = H.unit_class(A.generator(0));
    CHECK_FALSE(H.is_zero(H.product(x, dx)));
    CHECK_THROWS_AS(H.product(H.product(dx, dx), H.product(dx, dx)), Error);
}

TEST_CASE("non-connected algebras go through the closed form")
{
    Presentation A(PrimeField(3), {gen("z", -1, 0, GeneratorKind::Exterior)}, {}, {-1, 4, 0});
    CHECK_FALSE(is_connected(A));
    CHECK_THROWS_AS(BarComplex(A, 2, {0, 4, 0}), PresentationError);
    auto dims = hh_dims(A, {-1, 4, 0}, 2, 2);
    CHECK(dims[Bidegree{0, 0}] == 9);
    CHECK(dims[Bidegree{-1, 0}] == 9);
}
