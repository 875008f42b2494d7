#include "thhcalc/dga.hpp"

#include <fmt/format.h>

#include "thhcalc/error.hpp"

namespace thhcalc {

Differential Differential::zero(const Presentation& A, int jump)
{
    return {jump, std::vector<Element>(A.num_generators())};
}

void check_differential_degrees(const Presentation& A, const Differential& d)
{
    if (d.jump < 1)
        throw DifferentialError(fmt::format("weight jump {} is not positive", d.jump));
    if (d.values.size() != A.num_generators())
        throw DifferentialError("differential needs one value per generator");
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        const auto& g = A.generators()[i];
        const auto& v = d.values[i];
        if (v.is_zero())
            continue;
        auto deg = A.homogeneous_degree(v);
        if (!deg)
            throw DifferentialError(fmt::format("d({}) is inhomogeneous", g.name));
        const Bidegree want{g.degree.n - 1, g.degree.w + d.jump};
        if (*deg != want)
            throw DifferentialError(
                fmt::format("d({}) has bidegree {}, expected {}", g.name, to_string(*deg), to_string(want)));
    }
}

LeibnizExtension::LeibnizExtension(const Presentation& A, Differential d)
    : A_(&A), d_(std::move(d)), cache_(std::make_shared<std::map<Monomial, Element>>()),
      truncated_(std::make_shared<bool>(false))
{
    check_differential_degrees(A, d_);
    check_relations();
}

void LeibnizExtension::check_relations() const
{
    const Presentation& A = *A_;
    const PrimeField& F = A.field();
    for (std::size_t i = 0; i < A.num_generators(); ++i) {
        auto c = A.cap(i);
        if (!c || d_.values[i].is_zero())
            continue;
        const auto& g = A.generators()[i];
        const Element gi = A.generator(i);
        Element lhs;
        Element left = A.unit();
        for (int t = 0; t < *c; ++t) {
            Element term = A.multiply(A.multiply(left, d_.values[i]), A.power(gi, *c - 1 - t));
            if ((t * g.degree.n) & 1)
                term = A.scale(term, F.neg(1));
            lhs = A.add(lhs, term);
            left = A.multiply(left, gi);
        }
        Element rhs;
        if (const RewriteRule* r = A.rule_for(i))
            for (const auto& [m, coef] : r->rhs.terms)
                rhs = A.add(rhs, A.scale(apply(m), coef));
        if (!(lhs == rhs))
            throw DifferentialError(fmt::format("d does not respect the relation on {}^{}: {} != {}", g.name, *c,
                                                A.format(lhs), A.format(rhs)));
    }
}

const Element& LeibnizExtension::apply(const Monomial& m) const
{
    auto it = cache_->find(m);
    if (it != cache_->end())
        return it->second;

    const Presentation& A = *A_;
    std::size_t j = m.size();
    while (j > 0 && m[j - 1] == 0)
        --j;
    Element out;
    if (j > 0) {
        const std::size_t g = j - 1;
        Monomial rest = m;
        --rest[g];
        // d(rest * g) = d(rest) g + (-1)^{|rest|} rest d(g)
        const Element first = A.multiply(apply(rest), A.generator(g));
        Element second = A.multiply(A.monomial_element(rest), d_.values[g]);
        if (A.parity(rest))
            second = A.scale(second, A.field().neg(1));
        out = A.add(first, second);
    }
    return cache_->emplace(m, std::move(out)).first->second;
}

Element LeibnizExtension::apply(const Element& e) const
{
    Element out;
    for (const auto& [m, c] : e.terms)
        out = A_->add(out, A_->scale(apply(m), c));
    return out;
}

FpVector LeibnizExtension::apply_vector(const FpVector& v, const Bidegree& b) const
{
    const Bidegree t = target(b);
    const Element image = apply(A_->from_vector(v, b));
    if (!A_->window().contains(t)) {
        if (!image.is_zero())
            *truncated_ = true;
        return {};
    }
    return A_->to_vector(image, t);
}

FpMatrix LeibnizExtension::matrix(const Bidegree& b) const
{
    const auto& rows = A_->basis(b);
    const Bidegree t = target(b);
    const bool inside = A_->window().contains(t);
    FpMatrix m(rows.size(), inside ? A_->dim(t) : 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Element& image = apply(rows[r]);
        if (!inside) {
            if (!image.is_zero())
                *truncated_ = true;
            continue;
        }
        const FpVector v = A_->to_vector(image, t);
        for (std::size_t c = 0; c < v.size(); ++c)
            m.at(r, c) = v[c];
    }
    return m;
}

BoundaryMatrices extend_leibniz(const Presentation& A, const Differential& d)
{
    LeibnizExtension D(A, d);
    BoundaryMatrices out;
    out.jump = d.jump;
    for (const auto& b : A.support())
        out.matrices.emplace(b, D.matrix(b));
    out.truncated = D.truncated();
    return out;
}

DSquaredReport check_d_squared(const Presentation& A, const Differential& d)
{
    LeibnizExtension D(A, d);
    DSquaredReport rep;
    for (const auto& b : A.support())
        for (const auto& m : A.basis(b)) {
            ++rep.checked;
            const Element dd = D.apply(D.apply(m));
            if (!dd.is_zero()) {
                rep.ok = false;
                rep.violations.push_back(
                    fmt::format("d^2({}) = {} at {}", A.format_monomial(m), A.format(dd), to_string(b)));
            }
        }
    return rep;
}

std::size_t DgaHomology::dim(const Bidegree& b) const
{
    auto it = blocks.find(b);
    return it == blocks.end() ? 0 : it->second.dim();
}

std::map<Bidegree, std::size_t> DgaHomology::dims() const
{
    std::map<Bidegree, std::size_t> out;
    for (const auto& [b, sq] : blocks)
        if (sq.dim() > 0)
            out.emplace(b, sq.dim());
    return out;
}

std::map<Bidegree, std::size_t> DgaHomology::exact_dims() const
{
    auto out = dims();
    for (const auto& b : incomplete)
        out.erase(b);
    return out;
}

std::size_t DgaHomology::total_dim() const
{
    std::size_t s = 0;
    for (const auto& [b, sq] : blocks)
        s += sq.dim();
    return s;
}

Element DgaHomology::representative(const Bidegree& b, std::size_t i) const
{
    return algebra->from_vector(blocks.at(b).representatives().row_vector(i), b);
}

FpVector DgaHomology::class_of(const Element& z, const Bidegree& b) const
{
    auto it = blocks.find(b);
    if (it == blocks.end())
        return {};
    return it->second.class_of(algebra->to_vector(z, b));
}

std::optional<FpVector> DgaHomology::product(const Bidegree& a, const FpVector& x, const Bidegree& b,
                                             const FpVector& y) const
{
    const Bidegree c = a + b;
    if (!algebra->window().contains(c))
        return std::nullopt;
    Element ex, ey;
    const auto& sa = blocks.at(a);
    const auto& sb = blocks.at(b);
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i])
            ex = algebra->add(ex, algebra->scale(algebra->from_vector(sa.representatives().row_vector(i), a), x[i]));
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i])
            ey = algebra->add(ey, algebra->scale(algebra->from_vector(sb.representatives().row_vector(i), b), y[i]));
    const Element prod = algebra->multiply(ex, ey);
    auto it = blocks.find(c);
    if (it == blocks.end())
        return FpVector{};
    return it->second.class_of(algebra->to_vector(prod, c));
}

DgaHomology homology(const Presentation& A, const Differential& d)
{
    LeibnizExtension D(A, d);
    const PrimeField& F = A.field();
    DgaHomology h;
    h.algebra = &A;
    for (const auto& b : A.support()) {
        const std::size_t n = A.dim(b);
        const FpMatrix out = D.matrix(b);
        FpMatrix cycles = out.cols() == 0 ? FpMatrix::identity(n)
                                          : FpMatrix::from_rows(n, left_kernel_basis(out, F));
        FpMatrix boundaries(0, n);
        const Bidegree s = D.source(b);
        if (!A.window().contains(D.target(b))) {
            for (const auto& m : A.basis(b))
                if (!D.apply(m).is_zero()) {
                    h.incomplete.push_back(b);
                    break;
                }
        }
        if (A.window().contains(s)) {
            boundaries = D.matrix(s);
        } else if (s.n > A.window().n_max && s.w >= 0) {
            h.incomplete.push_back(b);
        }
        try {
            h.blocks.emplace(b, Subquotient(std::move(cycles), std::move(boundaries), F));
        } catch (const ContainmentError& e) {
            const auto& src = A.basis(s);
            throw DifferentialError(fmt::format("d^2 != 0: d^2({}) is nonzero", A.format_monomial(src.at(e.boundary_index()))));
        }
    }
    return h;
}

}  // namespace thhcalc
