#include "thhcalc/presentation.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "thhcalc/error.hpp"

namespace thhcalc {

std::string to_string(const Bidegree& b)
{
    return fmt::format("({},{})", b.n, b.w);
}

std::vector<GeneratorSpec> expand_divided_powers(const GeneratorSpec& g, int p, int n_max)
{
    if (g.kind != GeneratorKind::DividedPower)
        throw PresentationError(fmt::format("{} is not a divided power generator", g.name));
    if (g.degree.n <= 0)
        throw PresentationError(fmt::format("divided power generator {} needs positive degree", g.name));
    if (p != 2 && g.degree.n % 2 != 0)
        throw PresentationError(fmt::format("divided power generator {} has odd degree", g.name));

    std::vector<GeneratorSpec> out;
    long long scale = 1;
    for (int level = 0; scale * g.degree.n <= n_max; ++level, scale *= p) {
        GeneratorSpec s;
        s.name = level == 0 ? g.name : fmt::format("{}_p{}", g.name, scale);
        s.degree = g.degree.scaled(static_cast<int>(scale));
        s.kind = GeneratorKind::Bounded;
        s.height = p;
        s.divided_parent = g.name;
        s.divided_level = level;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<GeneratorSpec> expand_generators(const std::vector<GeneratorSpec>& specs, int p, int n_max)
{
    std::vector<GeneratorSpec> out;
    for (const auto& g : specs) {
        if (g.kind == GeneratorKind::DividedPower) {
            auto ex = expand_divided_powers(g, p, n_max);
            out.insert(out.end(), ex.begin(), ex.end());
        } else {
            out.push_back(g);
        }
    }
    return out;
}

std::vector<GeneratorSpec> separable_generators(const std::string& prefix, int level)
{
    std::vector<GeneratorSpec> out;
    for (int i = 0; i < level; ++i)
        out.push_back({fmt::format("{}{}", prefix, i), {0, 0}, GeneratorKind::Polynomial, 0, {}, 0});
    return out;
}

Presentation::Presentation(PrimeField field, std::vector<GeneratorSpec> generators, std::vector<RewriteRule> rules,
                           Window window)
    : field_(field), gens_(std::move(generators)), rules_(std::move(rules)), window_(window)
{
    validate();
    enumerate();
}

Presentation Presentation::trivial(PrimeField field, Window window)
{
    return Presentation(field, {}, {}, window);
}

void Presentation::validate()
{
    const int p = field_.p();
    const std::size_t k = gens_.size();
    if (window_.n_min > window_.n_max || window_.w_max < 0)
        throw WindowError(fmt::format("empty window [{}, {}] x [0, {}]", window_.n_min, window_.n_max, window_.w_max));

    std::map<std::string, std::size_t> names;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& g = gens_[i];
        if (g.name.empty())
            throw PresentationError("generator with empty name");
        if (!names.emplace(g.name, i).second)
            throw PresentationError(fmt::format("duplicate generator name {}", g.name));
        if (g.degree.w < 0)
            throw PresentationError(fmt::format("generator {} has negative weight", g.name));
        switch (g.kind) {
        case GeneratorKind::DividedPower:
            throw PresentationError(fmt::format("divided power generator {} must be expanded first", g.name));
        case GeneratorKind::Exterior:
            if (p != 2 && g.degree.n % 2 == 0)
                throw PresentationError(fmt::format("exterior generator {} has even degree at odd p", g.name));
            break;
        case GeneratorKind::Polynomial:
            if (p != 2 && g.degree.n % 2 != 0)
                throw PresentationError(fmt::format("polynomial generator {} has odd degree at odd p", g.name));
            break;
        case GeneratorKind::Bounded:
            if (g.height < 1)
                throw PresentationError(fmt::format("bounded generator {} needs height >= 1", g.name));
            if (p != 2 && g.degree.n % 2 != 0 && g.height > 2)
                throw PresentationError(fmt::format("odd generator {} cannot have height above 2", g.name));
            break;
        }
    }

    rule_of_.assign(k, -1);
    caps_.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        if (gens_[i].kind == GeneratorKind::Exterior)
            caps_[i] = 2;
        else if (gens_[i].kind == GeneratorKind::Bounded)
            caps_[i] = gens_[i].height;
    }
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        const auto& rule = rules_[r];
        if (rule.generator >= k)
            throw PresentationError("rule refers to an unknown generator");
        const auto& g = gens_[rule.generator];
        if (rule.power < 1)
            throw PresentationError(fmt::format("rule for {} has nonpositive power", g.name));
        if (rule_of_[rule.generator] >= 0 || caps_[rule.generator] != 0)
            throw PresentationError(fmt::format("generator {} already has a relation", g.name));
        rule_of_[rule.generator] = static_cast<int>(r);
        caps_[rule.generator] = rule.power;
    }

    for (const auto& rule : rules_) {
        const auto& g = gens_[rule.generator];
        Monomial lhs(k, 0);
        lhs[rule.generator] = static_cast<std::uint16_t>(rule.power);
        const Bidegree target = g.degree.scaled(rule.power);
        for (const auto& [m, c] : rule.rhs.terms) {
            if (m.size() != k || c == 0 || c >= p)
                throw PresentationError(fmt::format("malformed right-hand side in rule for {}", g.name));
            for (std::size_t i = 0; i < k; ++i)
                if (caps_[i] != 0 && m[i] >= caps_[i])
                    throw PresentationError(
                        fmt::format("right-hand side of rule for {} is not in normal form", g.name));
            if (degree(m) != target)
                throw PresentationError(fmt::format("rule {}^{} -> ... is not homogeneous: {} vs {}", g.name,
                                                    rule.power, to_string(degree(m)), to_string(target)));
            if (!monomial_less(m, lhs))
                throw PresentationError(fmt::format("rule for {} is not triangular: {} does not precede {}^{}", g.name,
                                                    format_monomial(m), g.name, rule.power));
        }
    }

    std::vector<std::string> bad;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& g = gens_[i];
        if (caps_[i] == 0 && (g.degree.n < 0 || (g.degree.n == 0 && g.degree.w == 0)))
            bad.push_back(g.name);
    }
    if (!bad.empty()) {
        std::string list;
        for (const auto& b : bad)
            list += (list.empty() ? "" : ", ") + b;
        throw PresentationError(fmt::format("presentation is not locally finite: unbounded generators {{{}}}", list));
    }
}

void Presentation::enumerate()
{
    const std::size_t k = gens_.size();
    // Lowest topological degree reachable from generators i.. onwards.
    std::vector<long long> suffix_min(k + 1, 0);
    for (std::size_t i = k; i-- > 0;) {
        long long c = 0;
        if (gens_[i].degree.n < 0)
            c = static_cast<long long>(gens_[i].degree.n) * (caps_[i] - 1);
        suffix_min[i] = suffix_min[i + 1] + c;
    }

    std::vector<int> max_exp(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& d = gens_[i].degree;
        int bound = std::numeric_limits<int>::max();
        if (caps_[i] != 0)
            bound = caps_[i] - 1;
        if (d.n > 0)
            bound = std::min<long long>(bound, (window_.n_max - suffix_min[0]) / d.n);
        else if (d.n == 0 && d.w > 0)
            bound = std::min(bound, window_.w_max / d.w);
        max_exp[i] = bound;
    }

    Monomial cur(k, 0);
    auto rec = [&](auto&& self, std::size_t i, long long n, long long w) -> void {
        if (i == k) {
            if (n >= window_.n_min && n <= window_.n_max)
                basis_[Bidegree{static_cast<int>(n), static_cast<int>(w)}].push_back(cur);
            return;
        }
        const auto& d = gens_[i].degree;
        for (int e = 0; e <= max_exp[i]; ++e) {
            const long long n2 = n + static_cast<long long>(e) * d.n;
            const long long w2 = w + static_cast<long long>(e) * d.w;
            if (n2 + suffix_min[i + 1] > window_.n_max && d.n >= 0)
                break;
            if (w2 > window_.w_max) {
                if (n2 + suffix_min[i + 1] <= window_.n_max)
                    weight_truncated_ = true;
                break;
            }
            cur[i] = static_cast<std::uint16_t>(e);
            self(self, i + 1, n2, w2);
        }
        cur[i] = 0;
    };
    rec(rec, 0, 0, 0);

    for (auto& [bd, list] : basis_) {
        std::sort(list.begin(), list.end(), [this](const Monomial& a, const Monomial& b) { return monomial_less(a, b); });
        for (std::size_t j = 0; j < list.size(); ++j)
            index_.emplace(list[j], j);
    }
}

std::optional<std::size_t> Presentation::find_generator(const std::string& name) const
{
    for (std::size_t i = 0; i < gens_.size(); ++i)
        if (gens_[i].name == name)
            return i;
    return std::nullopt;
}

std::size_t Presentation::generator_index(const std::string& name) const
{
    auto i = find_generator(name);
    if (!i)
        throw PresentationError(fmt::format("unknown generator {}", name));
    return *i;
}

std::optional<int> Presentation::cap(std::size_t i) const
{
    if (caps_[i] == 0)
        return std::nullopt;
    return caps_[i];
}

const RewriteRule* Presentation::rule_for(std::size_t i) const
{
    return rule_of_[i] < 0 ? nullptr : &rules_[static_cast<std::size_t>(rule_of_[i])];
}

Bidegree Presentation::degree(const Monomial& m) const
{
    Bidegree b;
    for (std::size_t i = 0; i < gens_.size(); ++i)
        if (m[i] != 0)
            b = b + gens_[i].degree.scaled(m[i]);
    return b;
}

int Presentation::parity(const Monomial& m) const
{
    int s = 0;
    for (std::size_t i = 0; i < gens_.size(); ++i)
        s += (gens_[i].degree.n & 1) * (m[i] & 1);
    return s & 1;
}

Monomial Presentation::generator_monomial(std::size_t i) const
{
    Monomial m(gens_.size(), 0);
    m[i] = 1;
    return m;
}

std::string Presentation::format_monomial(const Monomial& m) const
{
    std::string out;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        if (m[i] == 0)
            continue;
        if (!out.empty())
            out += "*";
        out += gens_[i].name;
        if (m[i] > 1)
            out += fmt::format("^{}", m[i]);
    }
    return out.empty() ? "1" : out;
}

std::string Presentation::format(const Element& e) const
{
    if (e.is_zero())
        return "0";
    std::vector<Monomial> order;
    for (const auto& [m, c] : e.terms)
        order.push_back(m);
    std::sort(order.begin(), order.end(), [this](const Monomial& a, const Monomial& b) { return monomial_less(b, a); });
    std::string out;
    for (const auto& m : order) {
        const Fp c = e.terms.at(m);
        if (!out.empty())
            out += " + ";
        const std::string mono = format_monomial(m);
        if (c == 1)
            out += mono;
        else if (mono == "1")
            out += fmt::format("{}", c);
        else
            out += fmt::format("{}*{}", c, mono);
    }
    return out;
}

bool Presentation::monomial_less(const Monomial& a, const Monomial& b) const
{
    const Bidegree da = degree(a), db = degree(b);
    if (da != db)
        return da < db;
    for (std::size_t i = gens_.size(); i-- > 0;)
        if (a[i] != b[i])
            return a[i] < b[i];
    return false;
}

const std::vector<Monomial>& Presentation::basis(const Bidegree& b) const
{
    static const std::vector<Monomial> empty;
    if (!window_.contains(b))
        throw WindowError(fmt::format("bidegree {} outside window", to_string(b)));
    auto it = basis_.find(b);
    return it == basis_.end() ? empty : it->second;
}

std::optional<std::size_t> Presentation::basis_index(const Monomial& m) const
{
    auto it = index_.find(m);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::vector<Bidegree> Presentation::support() const
{
    std::vector<Bidegree> out;
    for (const auto& [b, list] : basis_)
        if (!list.empty())
            out.push_back(b);
    return out;
}

Element Presentation::unit() const
{
    return monomial_element(unit_monomial());
}

Element Presentation::scalar(long long c) const
{
    return monomial_element(unit_monomial(), field_.reduce(c));
}

Element Presentation::generator(std::size_t i) const
{
    return normalize(generator_monomial(i));
}

Element Presentation::monomial_element(const Monomial& m, Fp c) const
{
    Element e;
    if (c % field_.p() != 0)
        e.terms.emplace(m, static_cast<Fp>(c % field_.p()));
    return e;
}

namespace {

void accumulate(Element& into, const Monomial& m, Fp c, const PrimeField& F)
{
    if (c == 0)
        return;
    auto [it, inserted] = into.terms.emplace(m, c);
    if (!inserted) {
        it->second = F.add(it->second, c);
        if (it->second == 0)
            into.terms.erase(it);
    }
}

}  // namespace

Element Presentation::add(const Element& a, const Element& b) const
{
    Element out = a;
    for (const auto& [m, c] : b.terms)
        accumulate(out, m, c, field_);
    return out;
}

Element Presentation::sub(const Element& a, const Element& b) const
{
    Element out = a;
    for (const auto& [m, c] : b.terms)
        accumulate(out, m, field_.neg(c), field_);
    return out;
}

Element Presentation::scale(const Element& a, Fp c) const
{
    Element out;
    c = static_cast<Fp>(c % field_.p());
    if (c == 0)
        return out;
    for (const auto& [m, v] : a.terms)
        out.terms.emplace(m, field_.mul(v, c));
    return out;
}

Element Presentation::multiply_monomials(const Monomial& a, const Monomial& b) const
{
    const std::size_t k = gens_.size();
    // Move each factor of b left past the later factors of a.
    int sign = 0;
    int odd_after = 0;
    for (std::size_t j = k; j-- > 0;) {
        const int odd = gens_[j].degree.n & 1;
        if (odd)
            sign += (b[j] & 1) * (odd_after & 1);
        if (odd)
            odd_after += a[j];
    }
    Monomial e(k);
    for (std::size_t i = 0; i < k; ++i)
        e[i] = static_cast<std::uint16_t>(a[i] + b[i]);
    return normalize(e, (sign & 1) ? field_.neg(1) : Fp{1});
}

Element Presentation::normalize(const Monomial& m, Fp c) const
{
    Element out;
    c = static_cast<Fp>(c % field_.p());
    if (c == 0)
        return out;
    const std::size_t k = gens_.size();
    std::size_t i = 0;
    while (i < k && (caps_[i] == 0 || m[i] < caps_[i]))
        ++i;
    if (i == k) {
        out.terms.emplace(m, c);
        return out;
    }
    const RewriteRule* rule = rule_for(i);
    if (!rule)
        return out;

    // Move g_i^k to the end, then replace it by the right-hand side.
    const int power = rule->power;
    int later_odd = 0;
    for (std::size_t j = i + 1; j < k; ++j)
        later_odd += (gens_[j].degree.n & 1) * m[j];
    const bool neg = ((gens_[i].degree.n & 1) * power * later_odd) & 1;
    const Fp coeff = neg ? field_.neg(c) : c;

    Monomial rest = m;
    rest[i] = static_cast<std::uint16_t>(rest[i] - power);
    for (const auto& [t, tc] : rule->rhs.terms) {
        Element part = multiply_monomials(rest, t);
        for (const auto& [pm, pc] : part.terms)
            accumulate(out, pm, field_.mul(field_.mul(pc, tc), coeff), field_);
    }
    return out;
}

Element Presentation::multiply(const Element& a, const Element& b) const
{
    Element out;
    for (const auto& [ma, ca] : a.terms)
        for (const auto& [mb, cb] : b.terms) {
            const Fp c = field_.mul(ca, cb);
            for (const auto& [m, v] : multiply_monomials(ma, mb).terms)
                accumulate(out, m, field_.mul(v, c), field_);
        }
    return out;
}

Element Presentation::power(const Element& a, int e) const
{
    Element out = unit();
    for (int i = 0; i < e; ++i)
        out = multiply(out, a);
    return out;
}

Element Presentation::divided_power(const std::string& parent, int k) const
{
    if (k < 0)
        throw PresentationError("negative divided power");
    const int p = field_.p();
    Element out = unit();
    int rest = k;
    for (int level = 0; rest > 0; ++level) {
        const int digit = rest % p;
        rest /= p;
        if (digit == 0)
            continue;
        std::optional<std::size_t> idx;
        for (std::size_t i = 0; i < gens_.size(); ++i)
            if (gens_[i].divided_parent == parent && gens_[i].divided_level == level)
                idx = i;
        if (!idx)
            throw PresentationError(fmt::format("gamma_{}({}) lies outside the expanded range", k, parent));
        // gamma_{p^i}^d = d! gamma_{d p^i}
        Fp fact = 1;
        for (int j = 2; j <= digit; ++j)
            fact = field_.mul(fact, static_cast<Fp>(j));
        out = multiply(out, scale(power(generator(*idx), digit), field_.inv(fact)));
    }
    return out;
}

std::optional<Bidegree> Presentation::homogeneous_degree(const Element& e) const
{
    if (e.is_zero())
        return std::nullopt;
    const Bidegree b = degree(e.terms.begin()->first);
    for (const auto& [m, c] : e.terms)
        if (degree(m) != b)
            return std::nullopt;
    return b;
}

bool Presentation::is_homogeneous(const Element& e) const
{
    return e.is_zero() || homogeneous_degree(e).has_value();
}

FpVector Presentation::to_vector(const Element& e, const Bidegree& b) const
{
    const auto& list = basis(b);
    FpVector v(list.size(), 0);
    for (const auto& [m, c] : e.terms) {
        auto idx = basis_index(m);
        if (!idx || degree(m) != b)
            throw PresentationError(fmt::format("term {} is not a basis monomial of {}", format_monomial(m), to_string(b)));
        v[*idx] = c;
    }
    return v;
}

Element Presentation::from_vector(const FpVector& v, const Bidegree& b) const
{
    const auto& list = basis(b);
    Element e;
    for (std::size_t i = 0; i < list.size() && i < v.size(); ++i)
        if (v[i] != 0)
            e.terms.emplace(list[i], v[i]);
    return e;
}

Presentation tensor(const Presentation& a, const Presentation& b)
{
    if (!(a.field() == b.field()))
        throw PresentationError("tensor product of presentations over different primes");
    const Window wa = a.window(), wb = b.window();
    const Window w{std::max(wa.n_min, wb.n_min), std::min(wa.n_max, wb.n_max), std::min(wa.w_max, wb.w_max)};
    if (w.n_min > w.n_max || w.w_max < 0)
        throw WindowError("tensor product windows do not intersect");

    std::vector<GeneratorSpec> gens = a.generators();
    std::map<std::string, std::string> renamed;
    auto taken = [&](const std::string& n) {
        return std::any_of(gens.begin(), gens.end(), [&](const GeneratorSpec& g) { return g.name == n; });
    };
    for (auto g : b.generators()) {
        if (taken(g.name)) {
            std::string fresh;
            for (int s = 2;; ++s) {
                fresh = fmt::format("{}_{}", g.name, s);
                if (!taken(fresh))
                    break;
            }
            renamed[g.name] = fresh;
            g.name = fresh;
        }
        gens.push_back(std::move(g));
    }
    for (std::size_t i = a.num_generators(); i < gens.size(); ++i) {
        auto it = renamed.find(gens[i].divided_parent);
        if (it != renamed.end())
            gens[i].divided_parent = it->second;
    }

    const std::size_t ka = a.num_generators(), k = gens.size();
    std::vector<RewriteRule> rules;
    for (const auto& r : a.rules()) {
        RewriteRule nr{r.generator, r.power, {}};
        for (const auto& [m, c] : r.rhs.terms) {
            Monomial x(k, 0);
            std::copy(m.begin(), m.end(), x.begin());
            nr.rhs.terms.emplace(std::move(x), c);
        }
        rules.push_back(std::move(nr));
    }
    for (const auto& r : b.rules()) {
        RewriteRule nr{r.generator + ka, r.power, {}};
        for (const auto& [m, c] : r.rhs.terms) {
            Monomial x(k, 0);
            std::copy(m.begin(), m.end(), x.begin() + static_cast<std::ptrdiff_t>(ka));
            nr.rhs.terms.emplace(std::move(x), c);
        }
        rules.push_back(std::move(nr));
    }
    return Presentation(a.field(), std::move(gens), std::move(rules), w);
}

std::size_t Homomorphism::rank_at(const Bidegree& b, const PrimeField& F) const
{
    auto it = matrices.find(b);
    return it == matrices.end() ? 0 : rank(it->second, F);
}

Element evaluate_monomial(const Presentation& source, const Presentation& target, const std::vector<Element>& images,
                          const Monomial& m)
{
    Element out = target.unit();
    for (std::size_t i = 0; i < source.num_generators(); ++i)
        if (m[i] != 0)
            out = target.multiply(out, target.power(images[i], m[i]));
    return out;
}

Homomorphism apply_hom(const Presentation& source, const Presentation& target, const std::vector<Element>& images)
{
    if (images.size() != source.num_generators())
        throw PresentationError("homomorphism needs one image per source generator");
    if (!(source.field() == target.field()))
        throw PresentationError("homomorphism between presentations over different primes");
    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto& g = source.generators()[i];
        if (!target.is_homogeneous(images[i]))
            throw PresentationError(fmt::format("image of {} is inhomogeneous", g.name));
        auto d = target.homogeneous_degree(images[i]);
        if (d && *d != g.degree)
            throw PresentationError(fmt::format("image of {} has bidegree {}, expected {}", g.name, to_string(*d),
                                                to_string(g.degree)));
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        auto c = source.cap(i);
        if (!c)
            continue;
        const auto& g = source.generators()[i];
        const Element lhs = target.power(images[i], *c);
        Element rhs;
        if (const RewriteRule* r = source.rule_for(i))
            for (const auto& [m, coef] : r->rhs.terms)
                rhs = target.add(rhs, target.scale(evaluate_monomial(source, target, images, m), coef));
        if (!(lhs == rhs))
            throw PresentationError(fmt::format("relation {}^{} -> ... is not respected: {} != {}", g.name, *c,
                                                target.format(lhs), target.format(rhs)));
    }

    Homomorphism h;
    h.images = images;
    for (const auto& b : source.support()) {
        if (!target.window().contains(b))
            continue;
        const auto& rows = source.basis(b);
        FpMatrix mat(rows.size(), target.dim(b));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const FpVector v = target.to_vector(evaluate_monomial(source, target, images, rows[r]), b);
            for (std::size_t c = 0; c < v.size(); ++c)
                mat.at(r, c) = v[c];
        }
        h.matrices.emplace(b, std::move(mat));
    }
    return h;
}

}  // namespace thhcalc
