#include "thhcalc/hochschild.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "thhcalc/error.hpp"

namespace thhcalc {

namespace {

bool positive(const Bidegree& b)
{
    return b.n > 0 || (b.n == 0 && b.w > 0);
}

void accumulate(BarChain& into, BarTensor t, Fp c, const PrimeField& F)
{
    if (c == 0)
        return;
    auto [it, inserted] = into.emplace(std::move(t), c);
    if (!inserted) {
        it->second = F.add(it->second, c);
        if (it->second == 0)
            into.erase(it);
    }
}

}  // namespace

bool is_connected(const Presentation& A)
{
    return std::all_of(A.generators().begin(), A.generators().end(),
                       [](const GeneratorSpec& g) { return positive(g.degree); });
}

BarComplex::BarComplex(const Presentation& A, int cap, const Window& window) : A_(&A), cap_(cap), window_(window)
{
    if (!is_connected(A))
        throw PresentationError("bar complex needs a connected algebra; use the closed form for this factor");
    if (cap < 0)
        throw Error("bar length cap must be nonnegative");
    if (A.window().n_max < window.n_max || A.window().w_max < window.w_max || A.window().n_min > 0)
        throw WindowError("algebra window does not cover the internal degrees of the bar complex");
    enumerate();
}

void BarComplex::enumerate()
{
    const Presentation& A = *A_;
    std::vector<std::pair<Bidegree, const Monomial*>> all, pos;
    for (const auto& b : A.support()) {
        if (b.n > window_.n_max || b.w > window_.w_max)
            continue;
        for (const auto& m : A.basis(b)) {
            all.emplace_back(b, &m);
            if (positive(b))
                pos.emplace_back(b, &m);
        }
    }

    // Chains one degree above the window carry the boundaries into its top.
    const int bound = window_.n_max + 1;
    BarTensor cur;
    auto rec = [&](auto&& self, int k_left, int n, int w, int k) -> void {
        if (k_left == 0) {
            const BarKey key{n - k, w, k};
            auto& list = basis_[key];
            index_[key].emplace(cur, list.size());
            list.push_back(cur);
            return;
        }
        for (const auto& [b, m] : pos) {
            if (n + b.n + 1 > bound || w + b.w > window_.w_max)
                continue;
            cur.push_back(*m);
            self(self, k_left - 1, n + b.n + 1, w + b.w, k);
            cur.pop_back();
        }
    };
    for (int k = 0; k <= cap_; ++k)
        for (const auto& [b, m] : all) {
            if (b.n + k > bound)
                continue;
            cur.assign(1, *m);
            rec(rec, k, b.n, b.w, k);
        }

    // Can cap + 1 positive slots fit in total degree n_max + 1?
    const int budget = window_.n_max + 1;
    const int inf = std::numeric_limits<int>::max() / 2;
    std::vector<int> best(static_cast<std::size_t>(std::max(budget, 0) + 1), inf);
    if (budget >= 0) {
        best[0] = 0;
        for (int j = 0; j <= cap_; ++j) {
            std::vector<int> next(best.size(), inf);
            for (std::size_t s = 0; s < best.size(); ++s) {
                if (best[s] == inf)
                    continue;
                for (const auto& [b, m] : pos) {
                    const std::size_t s2 = s + static_cast<std::size_t>(b.n + 1);
                    if (s2 < next.size())
                        next[s2] = std::min(next[s2], best[s] + b.w);
                }
            }
            best = std::move(next);
        }
        cap_sufficient_ = std::none_of(best.begin(), best.end(), [&](int w) { return w <= window_.w_max; });
    }
}

const std::vector<BarTensor>& BarComplex::basis(const BarKey& key) const
{
    static const std::vector<BarTensor> empty;
    auto it = basis_.find(key);
    return it == basis_.end() ? empty : it->second;
}

std::optional<std::size_t> BarComplex::index(const BarKey& key, const BarTensor& t) const
{
    auto it = index_.find(key);
    if (it == index_.end())
        return std::nullopt;
    auto jt = it->second.find(t);
    if (jt == it->second.end())
        return std::nullopt;
    return jt->second;
}

std::vector<BarKey> BarComplex::keys() const
{
    std::vector<BarKey> out;
    for (const auto& [k, v] : basis_)
        out.push_back(k);
    return out;
}

BarKey BarComplex::key_of(const BarTensor& t) const
{
    BarKey key;
    key.k = static_cast<int>(t.size()) - 1;
    for (const auto& m : t) {
        const Bidegree b = A_->degree(m);
        key.m += b.n;
        key.w += b.w;
    }
    return key;
}

BarChain BarComplex::boundary(const BarTensor& t) const
{
    const Presentation& A = *A_;
    const PrimeField& F = A.field();
    BarChain out;
    const std::size_t k = t.size() - 1;
    if (k == 0)
        return out;
    // Signs use the suspended degrees |a_i| + 1 for i >= 1.
    int eps = A.parity(t[0]);
    for (std::size_t i = 0; i < k; ++i) {
        if (i > 0)
            eps += A.parity(t[i]) + 1;
        const Element prod = A.multiply_monomials(t[i], t[i + 1]);
        const Fp sign = (eps & 1) ? F.neg(1) : Fp{1};
        for (const auto& [m, c] : prod.terms) {
            BarTensor u;
            u.reserve(k);
            for (std::size_t j = 0; j < i; ++j)
                u.push_back(t[j]);
            u.push_back(m);
            for (std::size_t j = i + 2; j <= k; ++j)
                u.push_back(t[j]);
            accumulate(out, std::move(u), F.mul(sign, c), F);
        }
    }
    // Cyclic face: a_k moves to the front.
    const int exponent = 1 + (A.parity(t[k]) + 1) * eps;
    const Fp sign = (exponent & 1) ? F.neg(1) : Fp{1};
    const Element prod = A.multiply_monomials(t[k], t[0]);
    for (const auto& [m, c] : prod.terms) {
        BarTensor u;
        u.reserve(k);
        u.push_back(m);
        for (std::size_t j = 1; j < k; ++j)
            u.push_back(t[j]);
        accumulate(out, std::move(u), F.mul(sign, c), F);
    }
    return out;
}

FpMatrix BarComplex::boundary_matrix(const BarKey& key) const
{
    const auto& rows = basis(key);
    const BarKey tk{key.m, key.w, key.k - 1};
    FpMatrix mat(rows.size(), key.k == 0 ? 0 : basis(tk).size());
    if (key.k == 0)
        return mat;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& [u, c] : boundary(rows[r])) {
            auto idx = index(tk, u);
            if (!idx)
                throw Error(fmt::format("boundary term {} outside the enumerated complex", format(u)));
            mat.at(r, *idx) = c;
        }
    return mat;
}

FpVector BarComplex::to_vector(const BarChain& c, const BarKey& key) const
{
    FpVector v(basis(key).size(), 0);
    for (const auto& [t, x] : c) {
        auto idx = index(key, t);
        if (!idx)
            throw WindowError(fmt::format("tensor {} lies outside the enumerated complex", format(t)));
        v[*idx] = x;
    }
    return v;
}

BarChain BarComplex::from_vector(const FpVector& v, const BarKey& key) const
{
    BarChain out;
    const auto& list = basis(key);
    for (std::size_t i = 0; i < v.size() && i < list.size(); ++i)
        if (v[i])
            out.emplace(list[i], v[i]);
    return out;
}

BarChain BarComplex::shuffle(const BarTensor& x, const BarTensor& y) const
{
    const Presentation& A = *A_;
    const PrimeField& F = A.field();
    const std::size_t p = x.size() - 1, q = y.size() - 1, n = p + q;
    BarChain out;

    int a_parity = 0;
    for (std::size_t i = 1; i <= p; ++i)
        a_parity += A.parity(x[i]) + 1;
    const int base_sign = A.parity(y[0]) * a_parity;
    const Element head = A.multiply_monomials(x[0], y[0]);
    if (head.is_zero())
        return out;

    // Positions of the a's form an increasing p-subset of {0..n-1}.
    std::vector<int> pick(n, 0);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(p), 1);
    std::sort(pick.begin(), pick.end());
    do {
        // pick[j] = 1 if slot j holds an a.
        BarTensor t;
        t.reserve(n + 1);
        t.push_back({});
        int sign = base_sign;
        std::size_t ia = 1, ib = 1;
        int b_par_seen = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (pick[j]) {
                sign += (A.parity(x[ia]) + 1) * b_par_seen;
                t.push_back(x[ia++]);
            } else {
                b_par_seen += A.parity(y[ib]) + 1;
                t.push_back(y[ib++]);
            }
        }
        const Fp s = (sign & 1) ? F.neg(1) : Fp{1};
        for (const auto& [m, c] : head.terms) {
            t[0] = m;
            accumulate(out, t, F.mul(s, c), F);
        }
    } while (std::next_permutation(pick.begin(), pick.end()));
    return out;
}

BarChain BarComplex::shuffle(const BarChain& x, const BarChain& y) const
{
    const PrimeField& F = A_->field();
    BarChain out;
    for (const auto& [tx, cx] : x)
        for (const auto& [ty, cy] : y)
            for (const auto& [t, c] : shuffle(tx, ty))
                accumulate(out, t, F.mul(c, F.mul(cx, cy)), F);
    return out;
}

std::string BarComplex::format(const BarTensor& t) const
{
    std::string out = A_->format_monomial(t[0]) + "[";
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (i > 1)
            out += "|";
        out += A_->format_monomial(t[i]);
    }
    return out + "]";
}

HHResult::HHResult(const BarComplex& complex) : C_(&complex)
{
    const PrimeField& F = complex.algebra().field();
    for (const auto& key : complex.keys()) {
        if (key.total().n > complex.window().n_max || key.total().n < complex.window().n_min)
            continue;
        const std::size_t n = complex.basis(key).size();
        const FpMatrix out = complex.boundary_matrix(key);
        FpMatrix cycles = key.k == 0 ? FpMatrix::identity(n) : FpMatrix::from_rows(n, left_kernel_basis(out, F));
        FpMatrix boundaries(0, n);
        const BarKey up{key.m, key.w, key.k + 1};
        if (key.k + 1 <= complex.cap() && !complex.basis(up).empty())
            boundaries = complex.boundary_matrix(up);
        try {
            blocks_.emplace(key, Subquotient(std::move(cycles), std::move(boundaries), F));
        } catch (const ContainmentError& e) {
            throw DifferentialError(fmt::format("Hochschild boundary does not square to zero on {}",
                                                complex.format(complex.basis(up).at(e.boundary_index()))));
        }
    }
}

std::size_t HHResult::block_dim(const BarKey& key) const
{
    auto it = blocks_.find(key);
    return it == blocks_.end() ? 0 : it->second.dim();
}

std::size_t HHResult::dim(const BarKey& key) const
{
    return block_dim(key);
}

std::map<Bidegree, std::size_t> HHResult::dims() const
{
    std::map<Bidegree, std::size_t> out;
    for (const auto& [key, sq] : blocks_)
        if (sq.dim() > 0)
            out[key.total()] += sq.dim();
    return out;
}

std::map<int, std::size_t> HHResult::degree_dims() const
{
    std::map<int, std::size_t> out;
    for (int n = C_->window().n_min; n <= C_->window().n_max; ++n)
        out[n] = 0;
    for (const auto& [b, d] : dims())
        out[b.n] += d;
    return out;
}

HHClass HHResult::basis_class(const BarKey& key, std::size_t i) const
{
    HHClass c{key, FpVector(block_dim(key), 0)};
    c.coords.at(i) = 1;
    return c;
}

BarChain HHResult::representative(const HHClass& c) const
{
    const PrimeField& F = C_->algebra().field();
    auto it = blocks_.find(c.key);
    if (it == blocks_.end())
        return {};
    const auto& reps = it->second.representatives();
    FpVector v(reps.cols(), 0);
    for (std::size_t i = 0; i < c.coords.size(); ++i)
        if (c.coords[i])
            for (std::size_t j = 0; j < v.size(); ++j)
                v[j] = F.add(v[j], F.mul(c.coords[i], reps.at(i, j)));
    return C_->from_vector(v, c.key);
}

bool HHResult::is_cycle(const BarChain& z, const BarKey& key) const
{
    auto it = blocks_.find(key);
    if (it == blocks_.end())
        return z.empty();
    return it->second.is_cycle(C_->to_vector(z, key));
}

HHClass HHResult::class_of(const BarChain& z, const BarKey& key) const
{
    auto it = blocks_.find(key);
    if (it == blocks_.end()) {
        if (!z.empty())
            throw WindowError("chain lies outside the enumerated complex");
        return {key, {}};
    }
    const FpVector v = C_->to_vector(z, key);
    if (!it->second.is_cycle(v))
        throw DifferentialError("chain is not a Hochschild cycle");
    return {key, it->second.class_of(v)};
}

bool HHResult::is_zero(const HHClass& c) const
{
    return std::all_of(c.coords.begin(), c.coords.end(), [](Fp x) { return x == 0; });
}

HHClass HHResult::suspension(std::size_t generator) const
{
    const Presentation& A = C_->algebra();
    BarTensor t{A.unit_monomial(), A.generator_monomial(generator)};
    BarChain z;
    z.emplace(t, 1);
    return class_of(z, C_->key_of(t));
}

HHClass HHResult::unit_class(const Element& a0) const
{
    const Presentation& A = C_->algebra();
    BarChain z;
    for (const auto& [m, c] : a0.terms)
        z.emplace(BarTensor{m}, c);
    auto d = A.homogeneous_degree(a0);
    const BarKey key = d ? BarKey{d->n, d->w, 0} : BarKey{0, 0, 0};
    return class_of(z, key);
}

HHClass HHResult::product(const HHClass& x, const HHClass& y) const
{
    const BarKey key{x.key.m + y.key.m, x.key.w + y.key.w, x.key.k + y.key.k};
    if (key.k > C_->cap())
        throw Error(fmt::format("shuffle product has bar length {} above the cap {}; increase the cap", key.k,
                                C_->cap()));
    if (key.total().n > C_->window().n_max || key.w > C_->window().w_max)
        throw WindowError("shuffle product lies outside the window");
    return class_of(C_->shuffle(representative(x), representative(y)), key);
}

HHClass HHResult::add(const HHClass& x, const HHClass& y) const
{
    if (!(x.key == y.key))
        throw Error("adding classes from different blocks");
    const PrimeField& F = C_->algebra().field();
    HHClass out = x;
    for (std::size_t i = 0; i < out.coords.size(); ++i)
        out.coords[i] = F.add(out.coords[i], y.coords[i]);
    return out;
}

HHClass HHResult::scale(const HHClass& x, Fp c) const
{
    const PrimeField& F = C_->algebra().field();
    HHClass out = x;
    for (auto& v : out.coords)
        v = F.mul(v, c);
    return out;
}

Presentation hkr_expected(const Presentation& A, int level)
{
    const int p = A.p();
    std::vector<GeneratorSpec> specs;
    std::vector<GeneratorSpec> extra;
    bool zeta = false;
    for (std::size_t i = 0; i < A.num_generators(); ++i) {
        const auto& g = A.generators()[i];
        const RewriteRule* r = A.rule_for(i);
        GeneratorSpec s = g;
        if (g.kind == GeneratorKind::Polynomial && !r && positive(g.degree) && (p == 2 || g.degree.n % 2 == 0)) {
            extra.push_back({"d" + g.name, {g.degree.n + 1, g.degree.w}, GeneratorKind::Exterior, 0, {}, 0});
        } else if (g.kind == GeneratorKind::Exterior && g.degree.n == -1 && g.degree.w == 0) {
            zeta = true;
        } else if (g.kind == GeneratorKind::Exterior && p != 2 && positive(g.degree) && g.degree.n % 2 != 0) {
            extra.push_back({"d" + g.name, {g.degree.n + 1, g.degree.w}, GeneratorKind::DividedPower, 0, {}, 0});
        } else if (g.kind == GeneratorKind::Polynomial && r && g.degree == Bidegree{0, 0} && r->power == p &&
                   r->rhs == A.generator(i)) {
            // separable block: unchanged
        } else {
            throw PresentationError(fmt::format("no closed form for the block generated by {}", g.name));
        }
        specs.push_back(s);
    }
    std::vector<GeneratorSpec> gens = specs;
    for (auto& e : expand_generators(extra, p, A.window().n_max))
        gens.push_back(e);
    std::vector<RewriteRule> rules;
    const std::size_t total = gens.size() + (zeta ? static_cast<std::size_t>(level) : 0);
    auto widen = [&](const Monomial& m) {
        Monomial out(total, 0);
        std::copy(m.begin(), m.end(), out.begin());
        return out;
    };
    for (const auto& r : A.rules()) {
        RewriteRule nr{r.generator, r.power, {}};
        for (const auto& [m, c] : r.rhs.terms)
            nr.rhs.terms.emplace(widen(m), c);
        rules.push_back(std::move(nr));
    }
    if (zeta) {
        std::string prefix = "y";
        while (std::any_of(gens.begin(), gens.end(), [&](const GeneratorSpec& g) { return g.name == prefix + "0"; }))
            prefix += "y";
        for (auto& g : separable_generators(prefix, level)) {
            const std::size_t idx = gens.size();
            gens.push_back(g);
            Monomial m(total, 0);
            m[idx] = 1;
            Element rhs;
            rhs.terms.emplace(m, 1);
            rules.push_back({idx, p, rhs});
        }
    }
    return Presentation(A.field(), gens, rules, A.window());
}

std::map<Bidegree, std::size_t> hh_dims(const Presentation& A, const Window& window, int cap, int level)
{
    std::map<Bidegree, std::size_t> out;
    if (is_connected(A)) {
        BarComplex C(A, cap, window);
        HHResult H(C);
        for (const auto& [b, d] : H.dims())
            if (window.contains(b))
                out[b] = d;
        return out;
    }
    const Presentation E = hkr_expected(A, level);
    for (const auto& b : E.support())
        if (window.contains(b))
            out[b] = E.dim(b);
    return out;
}

KunnethReport kunneth_check(const Presentation& a, const Presentation& b, const Window& window, int cap, int level)
{
    KunnethReport rep;
    const Presentation ab = tensor(a, b);
    int spread = 0;
    for (const auto* P : {&a, &b})
        for (const auto& g : P->generators())
            if (g.degree.n < 0)
                spread += -g.degree.n;
    const Window wide{window.n_min - spread, window.n_max + spread, window.w_max};
    auto clip = [](const Window& w, const Presentation& P) {
        return Window{std::max(w.n_min, P.window().n_min - 1), std::min(w.n_max, P.window().n_max), w.w_max};
    };
    const auto da = hh_dims(a, is_connected(a) ? clip(Window{0, wide.n_max, wide.w_max}, a) : wide, cap, level);
    const auto db = hh_dims(b, is_connected(b) ? clip(Window{0, wide.n_max, wide.w_max}, b) : wide, cap, level);
    const auto dab = hh_dims(ab, window, cap, level);
    std::map<Bidegree, std::size_t> conv;
    for (const auto& [x, dx] : da)
        for (const auto& [y, dy] : db) {
            const Bidegree s = x + y;
            if (window.contains(s))
                conv[s] += dx * dy;
        }
    std::map<Bidegree, std::pair<std::size_t, std::size_t>> all;
    for (const auto& [k, v] : conv)
        all[k].first = v;
    for (const auto& [k, v] : dab)
        all[k].second = v;
    for (const auto& [k, v] : all)
        if (v.first != v.second) {
            rep.ok = false;
            rep.mismatches.push_back(
                fmt::format("HH dim at {}: convolution {}, direct {}", to_string(k), v.first, v.second));
        }
    return rep;
}

}  // namespace thhcalc
