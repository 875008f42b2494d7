#include "thhcalc/runner.hpp"

#include <chrono>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "thhcalc/dga.hpp"
#include "thhcalc/error.hpp"
#include "thhcalc/hochschild.hpp"

namespace thhcalc {

std::string to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::Pass:
        return "PASS";
    case RunStatus::Fail:
        return "FAIL";
    case RunStatus::Error:
        return "ERROR";
    }
    return "?";
}

const PageRecord* RunReport::page(int r) const
{
    for (const auto& p : pages)
        if (p.r == r)
            return &p;
    return nullptr;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

PageRecord restrict_page(const PageRecord& p, const Window& W, int jump)
{
    PageRecord out;
    out.r = p.r;
    for (const auto& [b, d] : p.dims)
        if (W.contains(b) && d > 0)
            out.dims.emplace(b, d);
    for (const auto& [b, m] : p.differential)
        if (W.contains(b) && W.contains({b.n - 1, b.w + jump}))
            out.differential.emplace(b, m);
    return out;
}

std::map<Bidegree, std::size_t> restrict_dims(const std::map<Bidegree, std::size_t>& dims, const Window& W)
{
    std::map<Bidegree, std::size_t> out;
    for (const auto& [b, d] : dims)
        if (W.contains(b) && d > 0)
            out.emplace(b, d);
    return out;
}

std::map<Bidegree, std::size_t> presentation_dims(const Presentation& A, const Window& W)
{
    std::map<Bidegree, std::size_t> out;
    for (const auto& b : A.support())
        if (W.contains(b))
            out.emplace(b, A.dim(b));
    return out;
}

// Elements of HH as coordinates per bar block.
using HHElement = std::map<BarKey, FpVector>;

class Context {
public:
    Context(const Scenario& s, const ScenarioRunOptions& o, RunReport& r) : s_(s), o_(o), r_(r) {}

    void run()
    {
        auto t0 = Clock::now();
        switch (s_.mode) {
        case ScenarioMode::Sseq:
            run_sseq();
            break;
        case ScenarioMode::Hh:
            run_hh();
            break;
        case ScenarioMode::Cdga:
            run_cdga();
            break;
        case ScenarioMode::HomCheck:
            break;
        }
        run_homs();
        run_checks();
        r_.timings.emplace_back("engine", seconds_since(t0));

        t0 = Clock::now();
        algebra_gates();
        differential_gates();
        r_.timings.emplace_back("gates", seconds_since(t0));
    }

    std::vector<std::string> failures;

private:
    const Window& W() const { return s_.window; }

    void compare_tables(const std::map<Bidegree, std::size_t>& want, const std::map<Bidegree, std::size_t>& have,
                        const std::string& prefix)
    {
        std::map<Bidegree, std::pair<std::size_t, std::size_t>> all;
        for (const auto& [b, d] : want)
            all[b].first = d;
        for (const auto& [b, d] : have)
            all[b].second = d;
        for (const auto& [b, pr] : all)
            if (pr.first || pr.second)
                r_.comparisons.push_back({fmt::format("{} at {}", prefix, to_string(b)),
                                          static_cast<long long>(pr.first), static_cast<long long>(pr.second)});
    }

    // Dimensions of the expected answer over the reported window.
    std::map<Bidegree, std::size_t> expected_dims(const std::string& name)
    {
        const Presentation& E = s_.algebra(name);
        auto it = s_.differentials.find(name);
        if (it == s_.differentials.end())
            return presentation_dims(E, W());
        const DgaHomology H = homology(E, it->second);
        for (const auto& b : H.incomplete)
            if (W().contains(b))
                failures.push_back(fmt::format("homology of {} is cut off by its window at {}", name, to_string(b)));
        return restrict_dims(H.dims(), W());
    }

    void compare_degrees()
    {
        std::map<int, long long> have;
        for (const auto& [b, d] : result_)
            have[b.n] += static_cast<long long>(d);
        for (const auto& [n, v] : s_.degree_dims)
            r_.comparisons.push_back({fmt::format("degree {}", n), v, have[n]});
    }

    void run_sseq()
    {
        RunOptions ro;
        ro.leibniz_samples = o_.leibniz_samples;
        run_ = run_spectral_sequence(s_.algebra_ptr(s_.e1), s_.stages, s_.permanent, W(), ro);
        const SseqRun& run = *run_;
        for (const auto& p : run.pages)
            r_.pages.push_back(restrict_page(p, W(), p.r));
        r_.seed_audit = run.seed_audit;
        result_ = run.final_dims();
        if (run.truncated)
            r_.notes.push_back("some differentials left the weight window");

        if (!s_.expected.empty()) {
            compare_tables(expected_dims(s_.expected), result_, "dim");
            if (s_.expected_images) {
                auto rep = detect(run, s_.algebra(s_.expected), &*s_.expected_images, false);
                failures.insert(failures.end(), rep.mismatches.begin(), rep.mismatches.end());
            }
        }
        compare_degrees();

        add_gate("d^2", run.d_squared_checked, run.d_squared_violations);
        add_gate("leibniz", run.leibniz_checked, run.leibniz_violations);
        add_gate("euler", run.pages.empty() ? 0 : run.pages.size() - 1, run.euler_violations);
        add_gate("permanent", s_.permanent.size(), run.permanent_violations);

        std::vector<std::string> seed_issues;
        std::size_t seeds = 0;
        for (const auto& st : s_.stages)
            for (const auto& sd : st.seeds) {
                ++seeds;
                const PageRecord* page = nullptr;
                for (const auto& p : run.pages)
                    if (p.r == st.jump && !p.dims.empty())
                        page = &p;
                bool used = false;
                for (const auto& a : run.seed_audit)
                    if (a.label == sd.label && a.cycle && !a.boundary && page)
                        used = page->differential.count(a.source) > 0;
                if (!used)
                    seed_issues.push_back(fmt::format("seed {} does not support a nonzero differential", sd.label));
            }
        add_gate("seeds", seeds, seed_issues);
    }

    void run_hh()
    {
        const Presentation& A = s_.algebra(s_.hh);
        if (is_connected(A)) {
            bar_.emplace(A, s_.cap, W());
            hh_.emplace(*bar_);
            result_ = restrict_dims(hh_->dims(), W());
            std::vector<std::string> cap;
            if (!bar_->cap_sufficient())
                cap.push_back(fmt::format("bar length cap {} truncates the window", s_.cap));
            add_gate("cap", 1, cap);
            hh_gates();
        } else {
            r_.notes.push_back("not connected: dimensions from the closed form");
            result_ = restrict_dims(hh_dims(A, W(), s_.cap, s_.level), W());
        }
        PageRecord page;
        page.r = 0;
        page.dims = result_;
        r_.pages.push_back(std::move(page));
        if (!s_.expected.empty())
            compare_tables(expected_dims(s_.expected), result_, "dim");
        compare_degrees();
    }

    void hh_gates()
    {
        const BarComplex& C = *bar_;
        const PrimeField& F = C.algebra().field();
        std::vector<std::string> dd, euler;
        std::size_t checked = 0;
        for (const auto& key : C.keys()) {
            const auto total = key.total();
            if (key.k >= 2 && !C.basis(key).empty()) {
                const BarKey mid{key.m, key.w, key.k - 1};
                const BarKey low{key.m, key.w, key.k - 2};
                if (!C.basis(mid).empty() && !C.basis(low).empty()) {
                    ++checked;
                    if (!C.boundary_matrix(key).multiply(C.boundary_matrix(mid), F).is_zero())
                        dd.push_back(fmt::format("b^2 != 0 on bar length {} at internal ({},{})", key.k, key.m, key.w));
                }
            }
            if (!W().contains(total) || key.k > C.cap())
                continue;
            const std::size_t dim = C.basis(key).size();
            std::size_t out = 0, in = 0;
            if (key.k >= 1 && !C.basis({key.m, key.w, key.k - 1}).empty() && dim > 0)
                out = rank(C.boundary_matrix(key), F);
            const BarKey up{key.m, key.w, key.k + 1};
            if (key.k + 1 <= C.cap() && !C.basis(up).empty() && dim > 0)
                in = rank(C.boundary_matrix(up), F);
            if (dim - hh_->dim(key) != out + in)
                euler.push_back(fmt::format("rank-nullity fails on bar length {} at internal ({},{})", key.k, key.m,
                                            key.w));
        }
        add_gate("d^2", checked, dd);
        add_gate("euler", C.keys().size(), euler);
    }

    void run_cdga()
    {
        const Presentation& A = s_.algebra(s_.cdga);
        const Differential& d = s_.differentials.at(s_.cdga);
        const DgaHomology H = homology(A, d);
        LeibnizExtension D(A, d);
        PageRecord pa;
        pa.r = d.jump;
        pa.dims = presentation_dims(A, W());
        for (const auto& [b, dim] : pa.dims) {
            const Bidegree t = D.target(b);
            if (!W().contains(t) || A.dim(t) == 0)
                continue;
            FpMatrix m = D.matrix(b);
            if (!m.is_zero())
                pa.differential.emplace(b, std::move(m));
        }
        r_.pages.push_back(std::move(pa));
        for (const auto& b : H.incomplete)
            if (W().contains(b))
                failures.push_back(fmt::format("homology of {} is cut off by its window at {}", s_.cdga, to_string(b)));
        result_ = restrict_dims(H.dims(), W());
        PageRecord ph;
        ph.r = d.jump + 1;
        ph.dims = result_;
        r_.pages.push_back(std::move(ph));
        homologies_[s_.cdga] = std::make_shared<DgaHomology>(H);
        if (!s_.expected.empty())
            compare_tables(expected_dims(s_.expected), result_, "dim");
        compare_degrees();
    }

    void run_homs()
    {
        for (const auto& h : s_.homs) {
            try {
                homs_.emplace(h.name, apply_hom(s_.algebra(h.source), s_.algebra(h.target), h.images));
            } catch (const Error& e) {
                failures.push_back(fmt::format("hom {} is not an algebra map: {}", h.name, e.what()));
            }
        }
    }

    const DgaHomology& homology_of(const std::string& alg)
    {
        auto& h = homologies_[alg];
        if (!h)
            h = std::make_shared<DgaHomology>(homology(s_.algebra(alg), s_.differentials.at(alg)));
        return *h;
    }

    // Class-level tests on the final result, or in the homology of `alg`.
    std::optional<bool> is_zero_class(const Element& e, const std::string& alg)
    {
        if (alg.empty() && run_)
            return run_->is_boundary(e);
        const std::string a = alg.empty() ? s_.cdga : alg;
        auto deg = s_.algebra(a).homogeneous_degree(e);
        if (!deg)
            return e.is_zero();
        const DgaHomology& H = homology_of(a);
        if (!H.blocks.count(*deg) || std::find(H.incomplete.begin(), H.incomplete.end(), *deg) != H.incomplete.end())
            return std::nullopt;
        return is_zero_vector(H.class_of(e, *deg));
    }

    bool is_cycle(const Element& e, const std::string& alg)
    {
        if (e.is_zero())
            return true;
        if (alg.empty() && run_)
            return run_->is_permanent_cycle(e);
        const std::string a = alg.empty() ? s_.cdga : alg;
        LeibnizExtension D(s_.algebra(a), s_.differentials.at(a));
        return D.apply(e).is_zero();
    }

    static bool is_zero_vector(const FpVector& v)
    {
        for (auto c : v)
            if (c)
                return false;
        return true;
    }

    const Presentation& result_algebra() const
    {
        return run_ ? *run_->base : s_.algebra(s_.cdga);
    }

    void run_checks()
    {
        using K = ScenarioCheck::Kind;
        for (const auto& c : s_.checks) {
            switch (c.kind) {
            case K::Dim: {
                auto it = result_.find(c.at);
                r_.comparisons.push_back({fmt::format("check dim at {}", to_string(c.at)), c.value,
                                          it == result_.end() ? 0 : static_cast<long long>(it->second)});
                break;
            }
            case K::Degree: {
                long long have = 0;
                for (const auto& [b, d] : result_)
                    if (b.n == c.degree)
                        have += static_cast<long long>(d);
                r_.comparisons.push_back({fmt::format("check degree {}", c.degree), c.value, have});
                break;
            }
            case K::Total: {
                const DgaHomology H = homology(s_.algebra(c.target), s_.differentials.at(c.target));
                for (const auto& b : H.incomplete)
                    failures.push_back(
                        fmt::format("homology of {} is cut off by its window at {}", c.target, to_string(b)));
                r_.comparisons.push_back({fmt::format("total of {}", c.target), c.value,
                                          static_cast<long long>(H.total_dim())});
                break;
            }
            case K::Scaled: {
                std::map<Bidegree, std::size_t> want;
                for (const auto& [b, d] : expected_dims(c.target))
                    want.emplace(b, static_cast<std::size_t>(c.value) * d);
                compare_tables(want, result_, fmt::format("{} x {} dim", c.value, c.target));
                break;
            }
            case K::Zero:
            case K::Nonzero:
            case K::Equal: {
                const Presentation& A = c.target.empty() ? result_algebra() : s_.algebra(c.target);
                const Element e = c.kind == K::Equal ? A.sub(c.lhs, c.rhs) : c.lhs;
                if (!A.is_homogeneous(e)) {
                    failures.push_back(fmt::format("'{}': inhomogeneous", c.text));
                    break;
                }
                if (c.kind == K::Equal && !(is_cycle(c.lhs, c.target) && is_cycle(c.rhs, c.target))) {
                    failures.push_back(fmt::format("'{}': not both sides are cycles", c.text));
                    break;
                }
                if (!is_cycle(e, c.target)) {
                    failures.push_back(fmt::format("'{}': not a cycle", c.text));
                    break;
                }
                const auto zero = is_zero_class(e, c.target);
                if (!zero)
                    failures.push_back(fmt::format("'{}': outside the computed window", c.text));
                else if (*zero != (c.kind != K::Nonzero))
                    failures.push_back(fmt::format("'{}' fails", c.text));
                break;
            }
            case K::HomRank: {
                auto it = homs_.find(c.target);
                if (it == homs_.end()) {
                    failures.push_back(fmt::format("'{}': hom unavailable", c.text));
                    break;
                }
                const Presentation& S = s_.algebra(s_.hom(c.target)->source);
                r_.comparisons.push_back({fmt::format("hom {} rank at {}", c.target, to_string(c.at)), c.value,
                                          static_cast<long long>(it->second.rank_at(c.at, S.field()))});
                break;
            }
            case K::HomInjective: {
                auto it = homs_.find(c.target);
                if (it == homs_.end()) {
                    failures.push_back(fmt::format("'{}': hom unavailable", c.text));
                    break;
                }
                const Presentation& S = s_.algebra(s_.hom(c.target)->source);
                for (const auto& b : S.support()) {
                    if (!W().contains(b))
                        continue;
                    const std::size_t rk = it->second.rank_at(b, S.field());
                    if (rk != S.dim(b))
                        failures.push_back(fmt::format("hom {} is not injective at {}: rank {} < dim {}", c.target,
                                                       to_string(b), rk, S.dim(b)));
                }
                break;
            }
            case K::HhRelation:
                hh_relation(c);
                break;
            }
        }
    }

    // HH arithmetic over all bar blocks of a total bidegree.
    HHElement hh_class(const HHClass& c)
    {
        HHElement e;
        if (!hh_->is_zero(c))
            e.emplace(c.key, c.coords);
        return e;
    }

    HHElement hh_add(HHElement a, const HHElement& b, Fp scale)
    {
        const PrimeField& F = bar_->algebra().field();
        for (const auto& [k, v] : b) {
            auto& dst = a[k];
            if (dst.empty())
                dst.assign(v.size(), 0);
            for (std::size_t i = 0; i < v.size(); ++i)
                dst[i] = F.add(dst[i], F.mul(scale, v[i]));
        }
        for (auto it = a.begin(); it != a.end();)
            it = is_zero_vector(it->second) ? a.erase(it) : std::next(it);
        return a;
    }

    HHElement hh_mul(const HHElement& a, const HHElement& b)
    {
        HHElement out;
        for (const auto& [ka, va] : a)
            for (const auto& [kb, vb] : b)
                out = hh_add(out, hh_class(hh_->product({ka, va}, {kb, vb})), 1);
        return out;
    }

    HHElement hh_eval(const Expr& e)
    {
        const Presentation& A = bar_->algebra();
        const PrimeField& F = A.field();
        switch (e.op) {
        case Expr::Op::Number:
            return hh_class(hh_->unit_class(A.scalar(e.value)));
        case Expr::Op::Name:
            return hh_class(hh_->unit_class(A.generator(A.generator_index(e.name))));
        case Expr::Op::Call:
            return hh_class(hh_->suspension(A.generator_index(e.args[0].name)));
        case Expr::Op::Add:
            return hh_add(hh_eval(e.args[0]), hh_eval(e.args[1]), 1);
        case Expr::Op::Sub:
            return hh_add(hh_eval(e.args[0]), hh_eval(e.args[1]), F.neg(1));
        case Expr::Op::Neg:
            return hh_add({}, hh_eval(e.args[0]), F.neg(1));
        case Expr::Op::Mul:
            return hh_mul(hh_eval(e.args[0]), hh_eval(e.args[1]));
        case Expr::Op::Pow: {
            const long long x = eval_int(e.args[1], {s_.prime, s_.level}, "check");
            HHElement base = hh_eval(e.args[0]);
            HHElement out = hh_class(hh_->unit_class(A.unit()));
            for (long long i = 0; i < x; ++i)
                out = hh_mul(out, base);
            return out;
        }
        }
        return {};
    }

    // lhs = sum of unit multiples of the right-hand terms, for some choice of units.
    void hh_relation(const ScenarioCheck& c)
    {
        if (!hh_) {
            failures.push_back(fmt::format("'{}': needs the bar complex", c.text));
            return;
        }
        try {
            const HHElement lhs = hh_eval(*c.hh_lhs);
            std::vector<HHElement> terms;
            for (const auto& t : c.hh_terms)
                terms.push_back(hh_eval(t));
            const int p = s_.prime;
            std::vector<Fp> units(terms.size(), 1);
            bool found = false;
            for (;;) {
                HHElement acc = lhs;
                for (std::size_t i = 0; i < terms.size(); ++i)
                    acc = hh_add(acc, terms[i], static_cast<Fp>(p - units[i]));
                if (acc.empty()) {
                    found = true;
                    break;
                }
                std::size_t i = 0;
                while (i < units.size() && units[i] == p - 1)
                    units[i++] = 1;
                if (i == units.size())
                    break;
                ++units[i];
            }
            if (!found) {
                std::size_t zero_terms = 0;
                for (const auto& t : terms)
                    zero_terms += t.empty();
                failures.push_back(fmt::format("'{}' fails in HH: no choice of units matches{}{}", c.text,
                                               lhs.empty() ? " (left side vanishes)" : "",
                                               zero_terms ? fmt::format(" ({} right-hand terms vanish)", zero_terms)
                                                          : std::string()));
            }
        } catch (const Error& e) {
            failures.push_back(fmt::format("'{}': {}", c.text, e.what()));
        }
    }

    void add_gate(const std::string& name, std::size_t checked, const std::vector<std::string>& violations)
    {
        for (auto& g : r_.gates)
            if (g.name == name) {
                g.checked += checked;
                g.violations.insert(g.violations.end(), violations.begin(), violations.end());
                return;
            }
        r_.gates.push_back({name, checked, violations});
    }

    void algebra_gates()
    {
        std::size_t comm = 0, assoc = 0;
        std::vector<std::string> comm_bad, assoc_bad;
        unsigned salt = 0;
        for (const auto& name : s_.algebra_order) {
            const Presentation& A = s_.algebra(name);
            std::vector<Monomial> basis;
            for (const auto& b : A.support())
                for (const auto& m : A.basis(b))
                    basis.push_back(m);
            if (basis.empty())
                continue;
            const PrimeField& F = A.field();
            std::mt19937 rng(0x5eed + 977 * salt++);
            auto pick = [&]() -> const Monomial& { return basis[rng() % basis.size()]; };
            for (std::size_t i = 0; i < o_.property_samples; ++i) {
                const Monomial& a = pick();
                const Monomial& b = pick();
                Element ba = A.multiply_monomials(b, a);
                if (A.parity(a) && A.parity(b))
                    ba = A.scale(ba, F.neg(1));
                ++comm;
                if (A.multiply_monomials(a, b) != ba)
                    comm_bad.push_back(fmt::format("{}: {} and {} do not graded-commute", name, A.format_monomial(a),
                                                   A.format_monomial(b)));
            }
            for (std::size_t i = 0; i < o_.property_samples; ++i) {
                const Monomial& a = pick();
                const Monomial& b = pick();
                const Monomial& c = pick();
                ++assoc;
                const Element l = A.multiply(A.multiply_monomials(a, b), A.monomial_element(c));
                const Element r = A.multiply(A.monomial_element(a), A.multiply_monomials(b, c));
                if (l != r)
                    assoc_bad.push_back(fmt::format("{}: ({} {}) {} is not associative", name, A.format_monomial(a),
                                                    A.format_monomial(b), A.format_monomial(c)));
            }
        }
        add_gate("commutativity", comm, comm_bad);
        add_gate("associativity", assoc, assoc_bad);
    }

    void differential_gates()
    {
        for (const auto& [name, d] : s_.differentials) {
            const Presentation& A = s_.algebra(name);
            const DSquaredReport rep = check_d_squared(A, d);
            add_gate("d^2", rep.checked, rep.violations);

            std::vector<std::string> bad;
            std::size_t checked = 0;
            try {
                const DgaHomology H = homology(A, d);
                LeibnizExtension D(A, d);
                const PrimeField& F = A.field();
                std::set<Bidegree> skip(H.incomplete.begin(), H.incomplete.end());
                for (const auto& b : A.support()) {
                    if (skip.count(b))
                        continue;
                    ++checked;
                    std::size_t out = 0, in = 0;
                    if (A.window().contains(D.target(b)))
                        out = rank(D.matrix(b), F);
                    if (A.window().contains(D.source(b)) && A.dim(D.source(b)) > 0)
                        in = rank(D.matrix(D.source(b)), F);
                    if (A.dim(b) - H.dim(b) != out + in)
                        bad.push_back(fmt::format("{}: rank-nullity fails at {}", name, to_string(b)));
                }
            } catch (const Error& e) {
                bad.push_back(fmt::format("{}: {}", name, e.what()));
            }
            add_gate("euler", checked, bad);
        }
    }

    const Scenario& s_;
    const ScenarioRunOptions& o_;
    RunReport& r_;
    std::map<Bidegree, std::size_t> result_;
    std::optional<SseqRun> run_;
    std::optional<BarComplex> bar_;
    std::optional<HHResult> hh_;
    std::map<std::string, std::shared_ptr<DgaHomology>> homologies_;
    std::map<std::string, Homomorphism> homs_;
};

}  // namespace

RunReport run_scenario(const Scenario& s, const ScenarioRunOptions& options)
{
    RunReport r;
    r.scenario = s.name;
    r.mode = s.mode;
    r.prime = s.prime;
    r.window = s.window;
    r.notes = s.notes;
    const auto t0 = Clock::now();

    std::vector<std::string> failures;
    try {
        Context ctx(s, options, r);
        ctx.run();
        failures = std::move(ctx.failures);
    } catch (const Error& e) {
        r.status = RunStatus::Error;
        r.pages.clear();
        r.comparisons.clear();
        r.gates.clear();
        r.mismatches = {e.what()};
        r.timings.emplace_back("total", seconds_since(t0));
        return r;
    }

    if (options.perturb) {
        if (*options.perturb >= r.comparisons.size())
            throw Error(fmt::format("cannot perturb comparison {} of {}", *options.perturb, r.comparisons.size()));
        r.comparisons[*options.perturb].expected += 1;
    }
    for (const auto& c : r.comparisons)
        if (c.expected != c.actual)
            r.mismatches.push_back(fmt::format("{}: expected {}, got {}", c.location, c.expected, c.actual));
    r.mismatches.insert(r.mismatches.end(), failures.begin(), failures.end());
    for (const auto& g : r.gates)
        for (const auto& v : g.violations)
            r.mismatches.push_back(fmt::format("gate {}: {}", g.name, v));
    r.status = r.mismatches.empty() ? RunStatus::Pass : RunStatus::Fail;
    r.timings.emplace_back("total", seconds_since(t0));
    return r;
}

std::string report_json(const RunReport& r, const JsonOptions& options)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["scenario"] = r.scenario;
    j["status"] = to_string(r.status);
    j["mode"] = to_string(r.mode);
    j["prime"] = r.prime;
    j["window"] = {r.window.n_min, r.window.n_max, r.window.w_max};

    const PrimeField F(r.prime);
    ordered_json pages = ordered_json::array();
    for (const auto& p : r.pages) {
        ordered_json pj;
        pj["r"] = p.r;
        ordered_json dims = ordered_json::array();
        for (const auto& [b, d] : p.dims)
            dims.push_back({b.n, b.w, d});
        pj["dims"] = std::move(dims);
        ordered_json diffs = ordered_json::array();
        for (const auto& [b, m] : p.differential)
            diffs.push_back({{b.n, b.w}, {b.n - 1, b.w + p.r}, rank(m, F)});
        pj["differentials"] = std::move(diffs);
        pages.push_back(std::move(pj));
    }
    j["pages"] = std::move(pages);
    j["mismatches"] = r.mismatches;

    ordered_json gates = ordered_json::array();
    for (const auto& g : r.gates)
        gates.push_back({{"name", g.name}, {"checked", g.checked}, {"violations", g.violations.size()}});
    j["gates"] = std::move(gates);
    j["notes"] = r.notes;
    if (options.seed_audit) {
        ordered_json audit = ordered_json::array();
        for (const auto& a : r.seed_audit)
            audit.push_back({{"seed", a.label},
                             {"jump", a.jump},
                             {"source", {a.source.n, a.source.w}},
                             {"cycle", a.cycle},
                             {"boundary", a.boundary},
                             {"citation", a.citation}});
        j["seed_audit"] = std::move(audit);
    }
    ordered_json timings = ordered_json::object();
    if (options.timings)
        for (const auto& [k, v] : r.timings)
            timings[k] = v;
    j["timings"] = std::move(timings);
    return j.dump() + "\n";
}

}  // namespace thhcalc
