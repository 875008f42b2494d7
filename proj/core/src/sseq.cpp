#include "thhcalc/sseq.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "thhcalc/error.hpp"

namespace thhcalc {

namespace {

using Blocks = std::map<Bidegree, Subquotient>;

Blocks full_blocks(const Presentation& A)
{
    Blocks out;
    for (const auto& b : A.support())
        out.emplace(b, Subquotient::full(A.dim(b), A.field()));
    return out;
}

bool trusted_contains(const Window& t, const Bidegree& b)
{
    return t.contains(b);
}

// Class coordinates of a cycle vector at b; throws if it is not a cycle.
FpVector class_or_throw(const Blocks& blocks, const Bidegree& b, const FpVector& v, const std::string& what)
{
    auto it = blocks.find(b);
    if (it == blocks.end()) {
        if (std::any_of(v.begin(), v.end(), [](Fp x) { return x != 0; }))
            throw DifferentialError(fmt::format("{} is nonzero in an empty bidegree {}", what, to_string(b)));
        return {};
    }
    if (v.empty())
        return FpVector(it->second.dim(), 0);
    if (!it->second.is_cycle(v))
        throw DifferentialError(fmt::format("{} is not a cycle on the current page", what));
    return it->second.class_of(v);
}

std::size_t block_dim(const Blocks& blocks, const Bidegree& b)
{
    auto it = blocks.find(b);
    return it == blocks.end() ? 0 : it->second.dim();
}

bool is_zero_vector(const FpVector& v)
{
    return std::all_of(v.begin(), v.end(), [](Fp x) { return x == 0; });
}

class Runner {
public:
    Runner(std::shared_ptr<const Presentation> e1, const std::vector<PermanentCheck>& permanent, SseqRun& run,
           const RunOptions& options)
        : permanent_(permanent), run_(run), options_(options)
    {
        run_.base = std::move(e1);
        run_.blocks = full_blocks(*run_.base);
    }

    void rebase(const PageModel& pm, int jump);
    void seed_stage(int jump, const std::vector<SeedDifferential>& seeds);
    PageRecord snapshot(int r) const;

private:
    const Presentation& base() const { return *run_.base; }
    FpVector vec(const Element& e, const Bidegree& b) const { return base().to_vector(e, b); }

    const std::vector<PermanentCheck>& permanent_;
    SseqRun& run_;
    const RunOptions& options_;
};

PageRecord Runner::snapshot(int r) const
{
    PageRecord rec;
    rec.r = r;
    for (const auto& [b, sq] : run_.blocks)
        if (sq.dim() > 0)
            rec.dims.emplace(b, sq.dim());
    return rec;
}

void Runner::rebase(const PageModel& pm, int jump)
{
    const Presentation& A = base();
    const Presentation& M = *pm.model;
    const Window& T = run_.trusted;
    if (!(M.field() == A.field()))
        throw DifferentialError("page model over a different prime");
    if (pm.images.size() != M.num_generators())
        throw DifferentialError("page model needs one image per generator");
    const std::string where = fmt::format("page model at jump {}", jump);

    for (std::size_t i = 0; i < M.num_generators(); ++i) {
        const auto& g = M.generators()[i];
        const Element& img = pm.images[i];
        if (!A.is_homogeneous(img))
            throw DifferentialError(fmt::format("{}: image of {} is inhomogeneous", where, g.name));
        auto d = A.homogeneous_degree(img);
        if (d && *d != g.degree)
            throw DifferentialError(fmt::format("{}: image of {} has bidegree {}, expected {}", where, g.name,
                                                to_string(*d), to_string(g.degree)));
        if (d && trusted_contains(T, *d))
            class_or_throw(run_.blocks, *d, vec(img, *d), fmt::format("{}: image of {}", where, g.name));
    }

    for (std::size_t i = 0; i < M.num_generators(); ++i) {
        auto c = M.cap(i);
        if (!c)
            continue;
        const auto& g = M.generators()[i];
        const Bidegree b = g.degree.scaled(*c);
        if (!trusted_contains(T, b))
            continue;
        Element diff = A.power(pm.images[i], *c);
        if (const RewriteRule* r = M.rule_for(i))
            for (const auto& [m, coef] : r->rhs.terms)
                diff = A.sub(diff, A.scale(evaluate_monomial(M, A, pm.images, m), coef));
        const FpVector v = vec(diff, b);
        auto it = run_.blocks.find(b);
        const bool ok = it == run_.blocks.end() ? is_zero_vector(v) : it->second.is_boundary(v);
        if (!ok)
            throw DifferentialError(
                fmt::format("{}: relation on {}^{} fails on the page at {}", where, g.name, *c, to_string(b)));
    }

    for (const auto& [b, sq] : run_.blocks) {
        if (!trusted_contains(T, b))
            continue;
        const std::size_t mdim = M.window().contains(b) ? M.dim(b) : 0;
        if (mdim != sq.dim())
            throw DifferentialError(fmt::format("{}: dimension {} at {} but the page has {}", where, mdim,
                                                to_string(b), sq.dim()));
        if (mdim == 0)
            continue;
        FpMatrix mat(0, sq.dim());
        for (const auto& m : M.basis(b)) {
            const Element img = evaluate_monomial(M, A, pm.images, m);
            mat.append_row(class_or_throw(run_.blocks, b, vec(img, b),
                                          fmt::format("{}: image of {}", where, M.format_monomial(m))));
        }
        if (rank(mat, A.field()) != mdim)
            throw DifferentialError(fmt::format("{}: images do not span the page at {}", where, to_string(b)));
    }
    for (const auto& b : M.support())
        if (trusted_contains(T, b) && block_dim(run_.blocks, b) != M.dim(b))
            throw DifferentialError(fmt::format("{}: dimension {} at {} but the page has {}", where, M.dim(b),
                                                to_string(b), block_dim(run_.blocks, b)));

    run_.base = pm.model;
    run_.blocks = full_blocks(*run_.base);
}

void Runner::seed_stage(int jump, const std::vector<SeedDifferential>& seeds)
{
    const Presentation& A = base();
    const PrimeField& F = A.field();
    Differential d = Differential::zero(A, jump);

    for (const auto& s : seeds) {
        if (s.jump < 1)
            throw DifferentialError(fmt::format("seed {}: weight jump {} is not positive", s.label, s.jump));
        if (s.source.terms.size() != 1)
            throw DifferentialError(fmt::format("seed {}: source must be a multiple of a generator", s.label));
        const auto& [m, c] = *s.source.terms.begin();
        std::optional<std::size_t> gi;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0)
                continue;
            if (m[i] != 1 || gi)
                throw DifferentialError(fmt::format("seed {}: source must be a multiple of a generator", s.label));
            gi = i;
        }
        if (!gi)
            throw DifferentialError(fmt::format("seed {}: source must be a multiple of a generator", s.label));
        const Bidegree src = A.degree(m);
        const Bidegree want{src.n - 1, src.w + jump};
        if (!A.is_homogeneous(s.target))
            throw DifferentialError(fmt::format("seed {}: target is inhomogeneous", s.label));
        if (auto td = A.homogeneous_degree(s.target); td && *td != want)
            throw DifferentialError(fmt::format("seed {}: target has bidegree {}, expected {}", s.label,
                                                to_string(*td), to_string(want)));
        if (!d.values[*gi].is_zero())
            throw DifferentialError(fmt::format("seed {}: generator already has a value", s.label));

        SeedAudit audit{s.label, jump, src, false, false, s.citation};
        auto it = run_.blocks.find(src);
        if (it != run_.blocks.end() && A.window().contains(src)) {
            const FpVector v = vec(s.source, src);
            audit.cycle = it->second.is_cycle(v);
            audit.boundary = it->second.is_boundary(v);
        }
        run_.seed_audit.push_back(audit);
        if (!audit.cycle || audit.boundary)
            throw DifferentialError(fmt::format("seed {}: source does not survive to page {} ({})", s.label, jump,
                                                audit.cycle ? "it is a boundary" : "it is not a cycle"));
        d.values[*gi] = A.scale(s.target, F.inv(c));
    }

    LeibnizExtension D(A, d);

    for (const auto& b : A.support())
        for (const auto& m : A.basis(b)) {
            ++run_.d_squared_checked;
            const Element dd = D.apply(D.apply(m));
            if (!dd.is_zero())
                run_.d_squared_violations.push_back(
                    fmt::format("d_{}^2({}) = {}", jump, A.format_monomial(m), A.format(dd)));
        }

    PageRecord rec = snapshot(jump);
    std::map<Bidegree, std::vector<FpVector>> images_of_reps;
    for (const auto& [b, sq] : run_.blocks) {
        const Bidegree t = D.target(b);
        const bool inside = A.window().contains(t);
        std::vector<FpVector> imgs;
        for (std::size_t i = 0; i < sq.dim(); ++i)
            imgs.push_back(D.apply_vector(sq.representatives().row_vector(i), b));
        // D must carry boundaries to boundaries.
        for (std::size_t i = 0; i < sq.boundaries().rows(); ++i) {
            const FpVector db = D.apply_vector(sq.boundaries().row_vector(i), b);
            if (!inside || db.empty())
                continue;
            auto tt = run_.blocks.find(t);
            const bool ok = tt == run_.blocks.end() ? is_zero_vector(db) : tt->second.is_boundary(db);
            if (!ok)
                throw DifferentialError(
                    fmt::format("d_{} does not preserve boundaries at {}", jump, to_string(b)));
        }
        const std::size_t tdim = inside ? block_dim(run_.blocks, t) : 0;
        if (sq.dim() > 0 && tdim > 0) {
            FpMatrix pm(0, tdim);
            for (const auto& v : imgs)
                pm.append_row(class_or_throw(run_.blocks, t, v, fmt::format("d_{} of a class at {}", jump, to_string(b))));
            if (!pm.is_zero())
                rec.differential.emplace(b, pm);
        } else if (inside) {
            for (const auto& v : imgs)
                if (!v.empty() && !is_zero_vector(v))
                    class_or_throw(run_.blocks, t, v, fmt::format("d_{} of a class at {}", jump, to_string(b)));
        }
        images_of_reps.emplace(b, std::move(imgs));
    }

    // d^2 on the page: D(D z) must be a boundary.
    for (const auto& [b, sq] : run_.blocks) {
        const Bidegree t = D.target(b), tt = D.target(t);
        if (!A.window().contains(tt))
            continue;
        auto blk = run_.blocks.find(tt);
        for (const auto& v : images_of_reps[b]) {
            if (v.empty())
                continue;
            const FpVector ddz = D.apply_vector(v, t);
            const bool ok = blk == run_.blocks.end() ? is_zero_vector(ddz) : blk->second.is_boundary(ddz);
            if (!ok)
                run_.d_squared_violations.push_back(fmt::format("d_{}^2 != 0 on the page at {}", jump, to_string(b)));
        }
    }

    // Leibniz closure on sampled pairs of classes.
    {
        std::vector<std::pair<Bidegree, std::size_t>> classes;
        for (const auto& [b, sq] : run_.blocks)
            if (trusted_contains(run_.trusted, b))
                for (std::size_t i = 0; i < sq.dim(); ++i)
                    classes.emplace_back(b, i);
        std::mt19937 rng(static_cast<unsigned>(jump) * 7919u + 17u);
        for (std::size_t sample = 0; sample < options_.leibniz_samples && !classes.empty(); ++sample) {
            const auto& [ba, ia] = classes[rng() % classes.size()];
            const auto& [bb, ib] = classes[rng() % classes.size()];
            const Bidegree bc = ba + bb;
            if (!trusted_contains(run_.trusted, bc) || !trusted_contains(run_.trusted, D.target(bc)))
                continue;
            const Element za = A.from_vector(run_.blocks.at(ba).representatives().row_vector(ia), ba);
            const Element zb = A.from_vector(run_.blocks.at(bb).representatives().row_vector(ib), bb);
            Element rhs = A.multiply(D.apply(za), zb);
            Element second = A.multiply(za, D.apply(zb));
            if (ba.n & 1)
                second = A.scale(second, F.neg(1));
            rhs = A.add(rhs, second);
            const Element lhs = D.apply(A.multiply(za, zb));
            ++run_.leibniz_checked;
            const Bidegree t = D.target(bc);
            auto blk = run_.blocks.find(t);
            const FpVector diff = vec(A.sub(lhs, rhs), t);
            const bool ok = blk == run_.blocks.end() ? is_zero_vector(diff) : blk->second.is_boundary(diff);
            if (!ok)
                run_.leibniz_violations.push_back(fmt::format("d_{} fails the Leibniz rule on classes at {} and {}",
                                                              jump, to_string(ba), to_string(bb)));
        }
    }

    for (const auto& pc : permanent_) {
        if (pc.base != run_.base)
            continue;
        auto deg = A.homogeneous_degree(pc.element);
        if (!deg || !trusted_contains(run_.trusted, *deg))
            continue;
        const Bidegree t = D.target(*deg);
        if (!A.window().contains(t))
            continue;
        const FpVector dz = vec(D.apply(pc.element), t);
        auto blk = run_.blocks.find(t);
        const bool ok = blk == run_.blocks.end() ? is_zero_vector(dz) : blk->second.is_boundary(dz);
        if (!ok)
            run_.permanent_violations.push_back(fmt::format("{} supports a nonzero d_{}", pc.label, jump));
    }

    // Next page.
    Blocks next;
    for (const auto& [b, sq] : run_.blocks) {
        const std::size_t amb = sq.ambient();
        FpMatrix cycles = sq.boundaries();
        auto pit = rec.differential.find(b);
        if (pit == rec.differential.end()) {
            for (std::size_t i = 0; i < sq.dim(); ++i)
                cycles.append_row(sq.representatives().row(i));
        } else {
            for (const auto& k : left_kernel_basis(pit->second, F)) {
                FpVector z(amb, 0);
                for (std::size_t i = 0; i < k.size(); ++i)
                    if (k[i])
                        for (std::size_t j = 0; j < amb; ++j)
                            z[j] = F.add(z[j], F.mul(k[i], sq.representatives().at(i, j)));
                cycles.append_row(z);
            }
        }
        FpMatrix boundaries = sq.boundaries();
        const Bidegree s = D.source(b);
        auto sit = images_of_reps.find(s);
        if (sit != images_of_reps.end())
            for (const auto& v : sit->second)
                if (!v.empty())
                    boundaries.append_row(v);
        if (boundaries.rows() == 0)
            boundaries = FpMatrix(0, amb);
        if (cycles.rows() == 0)
            cycles = FpMatrix(0, amb);
        next.emplace(b, Subquotient(std::move(cycles), std::move(boundaries), F));
    }
    run_.blocks = std::move(next);
    run_.truncated = run_.truncated || D.truncated();
    run_.pages.push_back(std::move(rec));

    run_.trusted.n_min += 1;
    run_.trusted.n_max -= 1;
    run_.trusted.w_max -= jump;
}

}  // namespace

Window internal_window(const Window& window, const std::vector<Stage>& stages, const RunOptions& options)
{
    int seed_stages = 0, jumps = 0;
    for (const auto& s : stages)
        if (!s.seeds.empty()) {
            ++seed_stages;
            jumps += s.jump;
        }
    const int nm = options.n_margin >= 0 ? options.n_margin : seed_stages + 1;
    const int wm = options.w_margin >= 0 ? options.w_margin : jumps;
    return {window.n_min - nm, window.n_max + nm, window.w_max + wm};
}

SseqRun run_spectral_sequence(std::shared_ptr<const Presentation> e1, const std::vector<Stage>& stages,
                              const std::vector<PermanentCheck>& permanent, const Window& window,
                              const RunOptions& options)
{
    SseqRun run;
    run.window = window;
    run.internal = e1->window();
    run.trusted = run.internal;
    Runner runner(std::move(e1), permanent, run, options);

    for (std::size_t i = 1; i < stages.size(); ++i)
        if (stages[i].jump < stages[i - 1].jump)
            throw DifferentialError("stages must be sorted by weight jump");

    const bool first_is_one = !stages.empty() && stages.front().jump == 1 && !stages.front().seeds.empty() &&
                              !stages.front().rebase;
    if (!first_is_one)
        run.pages.push_back(runner.snapshot(1));

    for (const auto& st : stages) {
        if (st.rebase)
            runner.rebase(*st.rebase, st.jump);
        if (!st.seeds.empty()) {
            runner.seed_stage(st.jump, st.seeds);
            run.last_jump = st.jump;
        }
    }
    if (run.last_jump > 0)
        run.pages.push_back(runner.snapshot(run.last_jump + 1));

    if (!(run.trusted.n_min <= window.n_min && run.trusted.n_max >= window.n_max && run.trusted.w_max >= window.w_max))
        throw WindowError("internal window too small for the reported window");

    // Window arithmetic: the largest jump a surviving class could still support.
    int open = 0;
    const auto dims = run.final_dims();
    for (const auto& [b, d] : dims)
        for (const auto& [t, e] : dims)
            if (t.n == b.n - 1 && t.w - b.w > run.last_jump)
                open = std::max(open, t.w - b.w);
    run.collapses_by_degree = open == 0;
    run.stabilization_page = open == 0 ? run.last_jump + 1 : open + 1;
    if (run.last_jump == 0 && open == 0)
        run.stabilization_page = 1;

    run.euler_violations = euler_audit(run);
    return run;
}

std::size_t SseqRun::dim(const Bidegree& b) const
{
    auto it = blocks.find(b);
    return it == blocks.end() ? 0 : it->second.dim();
}

std::map<Bidegree, std::size_t> SseqRun::final_dims() const
{
    std::map<Bidegree, std::size_t> out;
    for (const auto& [b, sq] : blocks)
        if (window.contains(b) && sq.dim() > 0)
            out.emplace(b, sq.dim());
    return out;
}

std::map<int, std::size_t> SseqRun::degree_dims() const
{
    std::map<int, std::size_t> out;
    for (int n = window.n_min; n <= window.n_max; ++n)
        out[n] = 0;
    for (const auto& [b, d] : final_dims())
        out[b.n] += d;
    return out;
}

bool SseqRun::is_permanent_cycle(const Element& e) const
{
    auto d = base->homogeneous_degree(e);
    if (!d)
        return false;
    auto it = blocks.find(*d);
    if (it == blocks.end())
        return false;
    const FpVector v = base->to_vector(e, *d);
    return it->second.is_cycle(v);
}

bool SseqRun::is_boundary(const Element& e) const
{
    if (e.is_zero())
        return true;
    auto d = base->homogeneous_degree(e);
    if (!d)
        return false;
    auto it = blocks.find(*d);
    if (it == blocks.end())
        return false;
    return it->second.is_boundary(base->to_vector(e, *d));
}

std::vector<std::string> euler_audit(const SseqRun& run)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i + 1 < run.pages.size(); ++i) {
        const auto& P = run.pages[i];
        const auto& Q = run.pages[i + 1];
        std::map<int, long long> loss, ranks;
        for (const auto& [b, d] : P.dims)
            loss[b.n] += static_cast<long long>(d);
        for (const auto& [b, d] : Q.dims)
            loss[b.n] -= static_cast<long long>(d);
        const PrimeField F = run.base->field();
        for (const auto& [b, m] : P.differential) {
            const long long rk = static_cast<long long>(rank(m, F));
            ranks[b.n] += rk;
            ranks[b.n - 1] += rk;
        }
        for (int n = run.window.n_min; n <= run.window.n_max; ++n)
            if (loss[n] != ranks[n])
                out.push_back(fmt::format("E_{} -> E_{} at degree {}: lost {}, ranks sum to {}", P.r, Q.r, n, loss[n],
                                          ranks[n]));
    }
    return out;
}

DetectionReport detect(const SseqRun& run, const Presentation& expected, const std::vector<Element>* images,
                       bool compare_dims)
{
    DetectionReport rep;
    const Window& W = run.window;
    auto note = [&](const Bidegree& b, std::string msg) {
        rep.pass = false;
        if (!rep.first_mismatch || b < *rep.first_mismatch)
            rep.first_mismatch = b;
        rep.mismatches.push_back(std::move(msg));
    };

    std::map<Bidegree, std::size_t> want;
    for (const auto& b : expected.support())
        if (W.contains(b))
            want[b] = expected.dim(b);
    const auto have = run.final_dims();
    std::map<Bidegree, std::pair<std::size_t, std::size_t>> all;
    for (const auto& [b, d] : want)
        all[b].first = d;
    for (const auto& [b, d] : have)
        all[b].second = d;
    for (const auto& [b, pr] : all)
        if (compare_dims && pr.first != pr.second) {
            rep.dims_ok = false;
            note(b, fmt::format("dim at {}: expected {}, got {}", to_string(b), pr.first, pr.second));
        }

    if (!images)
        return rep;
    const Presentation& A = *run.base;
    if (images->size() != expected.num_generators())
        throw DifferentialError("detection needs one image per expected generator");

    for (std::size_t i = 0; i < images->size(); ++i) {
        const auto& g = expected.generators()[i];
        const Element& img = (*images)[i];
        if (!A.is_homogeneous(img))
            throw DifferentialError(fmt::format("image of {} is inhomogeneous", g.name));
        if (!W.contains(g.degree))
            continue;
        auto d = A.homogeneous_degree(img);
        if (d && *d != g.degree) {
            rep.images_ok = false;
            note(g.degree, fmt::format("image of {} has bidegree {}, expected {}", g.name, to_string(*d),
                                       to_string(g.degree)));
            continue;
        }
        if (img.is_zero() || !run.is_permanent_cycle(img) || run.is_boundary(img)) {
            rep.images_ok = false;
            note(g.degree, fmt::format("image of {} is not a nonzero permanent cycle", g.name));
        }
    }
    if (!rep.images_ok)
        return rep;

    for (std::size_t i = 0; i < expected.num_generators(); ++i) {
        auto c = expected.cap(i);
        if (!c)
            continue;
        const auto& g = expected.generators()[i];
        const Bidegree b = g.degree.scaled(*c);
        if (!W.contains(b))
            continue;
        Element diff = A.power((*images)[i], *c);
        if (const RewriteRule* r = expected.rule_for(i))
            for (const auto& [m, coef] : r->rhs.terms)
                diff = A.sub(diff, A.scale(evaluate_monomial(expected, A, *images, m), coef));
        if (!run.is_boundary(diff)) {
            rep.rules_ok = false;
            note(b, fmt::format("relation on {}^{} does not hold on the final page", g.name, *c));
        }
    }

    for (const auto& [b, d] : have) {
        if (!expected.window().contains(b))
            continue;
        const auto& sq = run.blocks.at(b);
        FpMatrix mat(0, sq.dim());
        for (const auto& m : expected.basis(b)) {
            const Element img = evaluate_monomial(expected, A, *images, m);
            const FpVector v = A.to_vector(img, b);
            if (!sq.is_cycle(v)) {
                rep.span_ok = false;
                note(b, fmt::format("image of {} is not a cycle", expected.format_monomial(m)));
                continue;
            }
            mat.append_row(sq.class_of(v));
        }
        if (rank(mat, A.field()) != d) {
            rep.span_ok = false;
            note(b, fmt::format("images of expected monomials do not span {}", to_string(b)));
        }
    }
    return rep;
}

}  // namespace thhcalc
