// Acceptance suite: one PASS/FAIL line per criterion, exact integer tolerances.

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "thhcalc/chart.hpp"
#include "thhcalc/dga.hpp"
#include "thhcalc/error.hpp"
#include "thhcalc/hochschild.hpp"
#include "thhcalc/runner.hpp"
#include "thhcalc/scenario.hpp"

using namespace thhcalc;

namespace {

const std::string corpus = THHCALC_TEST_CORPUS;

using Dims = std::map<Bidegree, std::size_t>;

// Collects failed conditions of one criterion.
struct Verdict {
    std::vector<std::string> problems;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
            problems.push_back(what);
    }
    bool ok() const { return problems.empty(); }
};

Scenario load(const std::string& name, const ScenarioOverrides& ov = {})
{
    return parse_scenario(read_scenario_file(corpus, name), ov);
}

ScenarioOverrides window(int n_min, int n_max, int w_max)
{
    ScenarioOverrides ov;
    ov.window = Window{n_min, n_max, w_max};
    return ov;
}

Dims nonzero(const Dims& d)
{
    Dims out;
    for (const auto& [b, n] : d)
        if (n)
            out.emplace(b, n);
    return out;
}

Dims algebra_dims(const Presentation& A, const Window& W, std::size_t factor = 1)
{
    Dims out;
    for (const auto& b : A.support())
        if (W.contains(b) && A.dim(b))
            out.emplace(b, factor * A.dim(b));
    return out;
}

Dims restrict(const Dims& d, const Window& W)
{
    Dims out;
    for (const auto& [b, n] : d)
        if (W.contains(b) && n)
            out.emplace(b, n);
    return out;
}

std::map<int, std::size_t> by_degree(const Dims& d)
{
    std::map<int, std::size_t> out;
    for (const auto& [b, n] : d)
        out[b.n] += n;
    return out;
}

std::string first_difference(const Dims& want, const Dims& have)
{
    for (const auto& [b, n] : want) {
        auto it = have.find(b);
        const std::size_t h = it == have.end() ? 0 : it->second;
        if (h != n)
            return fmt::format("at {}: want {}, have {}", to_string(b), n, h);
    }
    for (const auto& [b, n] : have)
        if (!want.count(b))
            return fmt::format("at {}: want 0, have {}", to_string(b), n);
    return "";
}

void require_equal(Verdict& v, const Dims& want, const Dims& have, const std::string& what)
{
    const std::string diff = first_difference(nonzero(want), nonzero(have));
    v.require(diff.empty(), fmt::format("{} differ {}", what, diff));
}

int degree_of(const Presentation& A, const std::string& g)
{
    auto i = A.find_generator(g);
    return i ? A.generators()[*i].degree.n : -1000;
}

const GateResult* gate(const RunReport& r, const std::string& name)
{
    auto it = std::find_if(r.gates.begin(), r.gates.end(), [&](const GateResult& g) { return g.name == name; });
    return it == r.gates.end() ? nullptr : &*it;
}

void require_pass(Verdict& v, const RunReport& r)
{
    v.require(r.status == RunStatus::Pass,
              fmt::format("{} is {}{}", r.scenario, to_string(r.status),
                          r.mismatches.empty() ? "" : " (" + r.mismatches.front() + ")"));
}

void require_time(Verdict& v, double secs, double limit)
{
    v.require(secs < limit, fmt::format("took {:.2f} s, limit {:.0f} s", secs, limit));
}

// ---------------------------------------------------------------------------

Verdict criterion_1(double limit)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = load("thh_Zp_mod_p", window(0, 24, 24));
    const RunReport r = run_scenario(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require_pass(v, r);
    const auto deg = by_degree(r.pages.back().dims);
    const std::vector<int> ones{0, 5, 6, 11, 12, 17, 18, 23, 24};
    for (int n = 0; n <= 24; ++n) {
        auto it = deg.find(n);
        const std::size_t have = it == deg.end() ? 0 : it->second;
        const std::size_t want = std::count(ones.begin(), ones.end(), n) ? 1 : 0;
        v.require(have == want, fmt::format("degree {}: want {}, have {}", n, want, have));
    }
    const Presentation& R = s.algebra(s.expected);
    v.require(degree_of(R, "mu") == 6 && degree_of(R, "lambda1") == 5, "expected generators misplaced");
    require_equal(v, algebra_dims(R, s.window), r.pages.back().dims, "E_inf and F_p[mu] x Lambda[lambda1]");
    require_time(v, secs, limit);
    return v;
}

Verdict criterion_2(double limit)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = load("thh_ell_mod_p_v1", window(0, 40, 40));
    const RunReport r = run_scenario(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require_pass(v, r);
    const Presentation& R = s.algebra(s.expected);
    v.require(degree_of(R, "lambda1") == 5, "|lambda1| != 5");
    v.require(degree_of(R, "lambda2") == 17, "|lambda2| != 17");
    v.require(degree_of(R, "mu2") == 18, "|mu2| != 18");
    require_equal(v, algebra_dims(R, s.window), r.pages.back().dims, "E_inf and F_3[mu2] x Lambda[lambda1, lambda2]");
    // lambda2 is detected by (sigma^2 v1)^2 dv1
    const Presentation& B = s.algebra(s.final_base);
    const Element want = B.multiply(B.multiply(B.generator(*B.find_generator("s")), B.generator(*B.find_generator("s"))),
                                    B.generator(*B.find_generator("dv1")));
    v.require(s.expected_images && s.expected_images->at(*R.find_generator("lambda2")) == want,
              "lambda2 is not represented by s^2 dv1");
    require_time(v, secs, limit);
    return v;
}

Verdict criterion_3(double limit)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioOverrides ov = window(-3, 40, 40);
    ov.level = 2;
    const Scenario s = load("thh_jzeta_mod_p_v1", ov);
    const RunReport r = run_scenario(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require_pass(v, r);
    require_equal(v, algebra_dims(s.algebra("ell_zeta"), s.window, 9), r.pages.back().dims,
                  "E_inf and 9 x F_3[mu2] x Lambda[lambda1, lambda2, zeta]");
    v.require(s.stages.size() == 1 && s.stages[0].jump == 4 && s.stages[0].seeds.size() == 2,
              "expected one stage of two d_4 seeds");
    const GateResult* g = gate(r, "seeds");
    v.require(g && g->checked == 2 && g->violations.empty(), "seeds not both consumed");
    require_time(v, secs, limit);
    return v;
}

Verdict criterion_4(double limit)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = load("thh_j_mod_p_v1");
    const RunReport r = run_scenario(s);
    v.require(s.prime == 5 && s.window == Window{-1, 52, 80}, "p = 5 window not as shipped");
    require_pass(v, r);
    v.require(s.stages.size() == 2 && s.stages[0].jump == 8 && s.stages[1].jump == 32, "stage jumps are not 8 then 32");
    const DgaHomology H = homology(s.algebra("cdga"), s.differentials.at("cdga"));
    require_equal(v, restrict(H.dims(), s.window), r.pages.back().dims, "E_inf and H(CDGA)");
    const auto deg = by_degree(r.pages.back().dims);
    v.require(!deg.count(48) || deg.at(48) == 0, "degree 48 is nonzero");
    const DgaHomology block = homology(s.algebra("block"), s.differentials.at("block"));
    v.require(block.incomplete.empty() && block.total_dim() == 6,
              fmt::format("Lambda[alpha1, lambda2, a] homology has dimension {}", block.total_dim()));

    ScenarioOverrides three;
    three.prime = 3;
    const RunReport r3 = run_scenario(load("thh_j_mod_p_v1", three));
    require_pass(v, r3);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require_time(v, secs, limit);
    return v;
}

Verdict criterion_5(double limit)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario ko = load("thh_ko2", window(-3, 32, 32));
    const RunReport rk = run_scenario(ko);
    require_pass(v, rk);
    const Presentation& R = ko.algebra(ko.expected);
    v.require(degree_of(R, "mu") == 8 && degree_of(R, "lambda2") == 7 && degree_of(R, "x") == 5,
              "expected generators misplaced");
    require_equal(v, algebra_dims(R, ko.window), rk.pages.back().dims, "E_inf and F_2[mu] x Lambda[lambda2, x]");

    const Scenario jz = load("thh_jzeta_p2", window(-3, 32, 32));
    const RunReport rj = run_scenario(jz);
    require_pass(v, rj);
    require_equal(v, algebra_dims(jz.algebra("ko_zeta"), jz.window, 4), rj.pages.back().dims,
                  "E_inf and 4 x F_2[mu] x Lambda[lambda2, x, zeta]");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require_time(v, secs, limit);
    return v;
}

// Dimensions, then the relation x0^3 = v1^2 x0 + v1 alpha1 dv1 for every
// choice x0 = sigma(alpha1) + c v1 (units on x0 are absorbed by the unit search).
Verdict criterion_6(double limit)
{
    Verdict a, b;
    const auto t0 = std::chrono::steady_clock::now();
    const std::string text = read_scenario_file(corpus, "hh_jgr_mod_p");
    const Scenario s = parse_scenario(text);
    const RunReport r = run_scenario(s);
    a.require(s.window == Window{0, 14, 0} && s.cap == 6, "window or cap not as shipped");
    const Dims oracle = hh_dims(s.algebra(s.hh), s.window, s.cap, s.level);
    require_equal(a, algebra_dims(s.algebra(s.expected), s.window), oracle, "HH oracle and the x_i presentation");
    for (const auto& m : r.mismatches)
        if (m.find("hh_relation") == std::string::npos)
            a.problems.push_back(m);

    const auto line = text.find("CHECK hh_relation");
    b.require(line != std::string::npos, "no relation check in the scenario");
    for (int c = 0; c < s.prime && line != std::string::npos; ++c) {
        const std::string x0 = fmt::format("(sigma(alpha1) + {} v1)", c);
        const std::string check =
            fmt::format("CHECK hh_relation {}^p ~ v1^(p-1) {} + v1^(p-2) alpha1 sigma(v1)\n", x0, x0);
        std::string variant = text.substr(0, line) + check;
        const RunReport rv = run_scenario(parse_scenario(variant));
        const bool holds = std::none_of(rv.mismatches.begin(), rv.mismatches.end(),
                                        [](const std::string& m) { return m.find("hh_relation") != std::string::npos; });
        b.require(holds, fmt::format("fails for x0 = {}", x0));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require_time(a, secs, limit);
    Verdict v;
    v.notes.push_back(fmt::format("dimensions: {}", a.ok() ? "PASS" : "FAIL"));
    v.notes.push_back(fmt::format("relation: {}", b.ok() ? "PASS" : "FAIL"));
    for (const auto& p : a.problems)
        v.problems.push_back("dimensions: " + p);
    for (const auto& p : b.problems)
        v.problems.push_back("relation: " + p);
    return v;
}

Verdict criterion_7(double limit)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const PrimeField F(3);
    const Window w8{0, 8, 0};
    const Presentation x(F, {{"x", {2, 0}, GeneratorKind::Polynomial, 0, {}, 0}}, {}, w8);
    const Presentation xdx(F,
                           {{"x", {2, 0}, GeneratorKind::Polynomial, 0, {}, 0},
                            {"dx", {3, 0}, GeneratorKind::Exterior, 0, {}, 0}},
                           {}, w8);
    require_equal(v, algebra_dims(xdx, w8), hh_dims(x, w8, 6, 2), "HH(F_3[x]) and F_3[x] x Lambda[dx]");

    const Window w12{0, 12, 0};
    const Presentation v0(F, {{"v0", {2, 0}, GeneratorKind::Polynomial, 0, {}, 0}}, {}, w12);
    const Presentation v1(F, {{"v1", {4, 0}, GeneratorKind::Polynomial, 0, {}, 0}}, {}, w12);
    const KunnethReport k = kunneth_check(v0, v1, w12, 6, 2);
    v.require(k.ok, k.mismatches.empty() ? "Kunneth mismatch" : k.mismatches.front());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require_time(v, secs, limit);
    return v;
}

Verdict criterion_8(double limit)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = load("hom_restriction");
    const RunReport r = run_scenario(s);
    require_pass(v, r);
    const ScenarioHom* h = s.hom("restrict");
    v.require(h != nullptr, "no restriction hom");
    if (h) {
        const Presentation& S = s.algebra(h->source);
        const Presentation& T = s.algebra(h->target);
        v.require(S.dim({0, 0}) == 9 && T.dim({0, 0}) == 3, "(0,0) blocks are not 9 and 3");
        v.require(h->images.at(*S.find_generator("zeta")).is_zero(), "zeta is not sent to 0");
    }
    auto it = std::find_if(r.comparisons.begin(), r.comparisons.end(),
                           [](const Comparison& c) { return c.location == "hom restrict rank at (0,0)"; });
    v.require(it != r.comparisons.end() && it->actual == 3, "rank at (0,0) is not 3");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require_time(v, secs, limit);
    return v;
}

Verdict criterion_9(double limit)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& name : list_scenarios(corpus)) {
        const Scenario s = load(name);
        const RunReport a = run_scenario(s);
        const RunReport b = run_scenario(s);
        v.require(a.status != RunStatus::Error, fmt::format("{}: ERROR", name));
        for (const auto& g : a.gates)
            v.require(g.violations.empty(),
                      fmt::format("{}: gate {} has {} violations", name, g.name, g.violations.size()));
        for (const char* n : {"commutativity", "associativity"}) {
            const GateResult* g = gate(a, n);
            v.require(g && g->checked >= 1000, fmt::format("{}: fewer than 1000 {} samples", name, n));
        }
        if (s.mode != ScenarioMode::HomCheck) {
            // a spectral sequence without seeds has no differential to audit
            const bool any = s.mode != ScenarioMode::Sseq || !s.stages.empty();
            const GateResult* d2 = gate(a, "d^2");
            const GateResult* eu = gate(a, "euler");
            v.require(d2 && (d2->checked > 0 || !any), fmt::format("{}: d^2 not audited", name));
            v.require(eu && (eu->checked > 0 || !any), fmt::format("{}: Euler audit missing", name));
        }
        v.require(report_json(a, {false, true}) == report_json(b, {false, true}), fmt::format("{}: JSON differs", name));
        for (const auto& p : a.pages)
            v.require(emit_chart(a, p.r) == emit_chart(b, p.r), fmt::format("{}: page {} chart differs", name, p.r));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require_time(v, secs, limit);
    return v;
}

Verdict criterion_10(double limit)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& name : list_scenarios(corpus)) {
        const Scenario s = load(name);
        const RunReport clean = run_scenario(s);
        auto it = std::find_if(clean.comparisons.begin(), clean.comparisons.end(),
                               [](const Comparison& c) { return c.expected > 0; });
        if (it == clean.comparisons.end()) {
            v.problems.push_back(fmt::format("{}: no expected dimension to perturb", name));
            continue;
        }
        ScenarioRunOptions ro;
        ro.perturb = static_cast<std::size_t>(it - clean.comparisons.begin());
        const RunReport bad = run_scenario(s, ro);
        const std::string want = fmt::format("{}: expected {}, got {}", it->location, it->expected + 1, it->actual);
        v.require(bad.status == RunStatus::Fail, fmt::format("{}: perturbed run is {}", name, to_string(bad.status)));
        v.require(!bad.mismatches.empty() && bad.mismatches.front() == want,
                  fmt::format("{}: perturbation not reported as '{}'", name, want));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require_time(v, secs, limit);
    return v;
}

}  // namespace

int main()
{
    bool all = true;
    auto report = [&](const std::string& id, const std::string& what, const std::function<Verdict()>& f) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            v = f();
        } catch (const Error& e) {
            v.problems.push_back(fmt::format("error: {}", e.what()));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all = all && v.ok();
        fmt::print("criterion {:<3} {} ({:.2f} s) {}\n", id, v.ok() ? "PASS" : "FAIL", secs, what);
        for (const auto& n : v.notes)
            fmt::print("    {}\n", n);
        for (const auto& p : v.problems)
            fmt::print("    {}\n", p);
    };

    report("1", "thh_Zp_mod_p degree table on [0,24]", [] { return criterion_1(1); });
    report("2", "thh_ell_mod_p_v1 against F_3[mu2] x Lambda[lambda1, lambda2]", [] { return criterion_2(5); });
    report("3", "thh_jzeta_mod_p_v1 is 9 x the ell answer with zeta", [] { return criterion_3(30); });
    report("4", "thh_j_mod_p_v1 two stages against the CDGA, p = 5 and 3", [] { return criterion_4(60); });
    report("5", "thh_ko2 and thh_jzeta_p2", [] { return criterion_5(10); });
    report("6", "hh_jgr_mod_p dimensions and the x0 relation", [] { return criterion_6(120); });
    report("7", "HKR for F_3[x] and Kunneth for F_3[v0] x F_3[v1]", [] { return criterion_7(10); });
    report("8", "hom_restriction rank 3 on (0,0), zeta to 0", [] { return criterion_8(1); });
    report("9", "property gates and determinism on every scenario", [] { return criterion_9(120); });
    report("10", "mutation harness", [] { return criterion_10(60); });
    return all ? 0 : 1;
}
