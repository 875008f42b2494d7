#include "thhcalc/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "thhcalc/error.hpp"

namespace thhcalc {

std::string to_string(ScenarioMode m)
{
    switch (m) {
    case ScenarioMode::Sseq:
        return "sseq";
    case ScenarioMode::Hh:
        return "hh";
    case ScenarioMode::HomCheck:
        return "hom-check";
    case ScenarioMode::Cdga:
        return "cdga";
    }
    return "?";
}

const Presentation& Scenario::algebra(const std::string& name) const
{
    return *algebra_ptr(name);
}

std::shared_ptr<const Presentation> Scenario::algebra_ptr(const std::string& name) const
{
    auto it = algebras.find(name);
    if (it == algebras.end())
        throw ScenarioError("algebras", fmt::format("unknown algebra '{}'", name));
    return it->second;
}

const ScenarioHom* Scenario::hom(const std::string& name) const
{
    for (const auto& h : homs)
        if (h.name == name)
            return &h;
    return nullptr;
}

namespace {

// A piece of a source line with the column of its first character.
struct Span {
    std::string_view text;
    int line = 0;
    int col = 1;

    SourcePos pos() const { return {line, col}; }
    bool empty() const { return text.empty(); }
};

Span trim(Span s)
{
    while (!s.text.empty() && std::isspace(static_cast<unsigned char>(s.text.front()))) {
        s.text.remove_prefix(1);
        ++s.col;
    }
    while (!s.text.empty() && std::isspace(static_cast<unsigned char>(s.text.back())))
        s.text.remove_suffix(1);
    return s;
}

std::vector<Span> words(Span s)
{
    std::vector<Span> out;
    std::size_t i = 0;
    while (i < s.text.size()) {
        while (i < s.text.size() && std::isspace(static_cast<unsigned char>(s.text[i])))
            ++i;
        const std::size_t j0 = i;
        while (i < s.text.size() && !std::isspace(static_cast<unsigned char>(s.text[i])))
            ++i;
        if (i > j0)
            out.push_back({s.text.substr(j0, i - j0), s.line, s.col + static_cast<int>(j0)});
    }
    return out;
}

// Text following `word`, which must lie inside s.
Span rest_after(Span s, const Span& word)
{
    const std::size_t off = static_cast<std::size_t>(word.col - s.col) + word.text.size();
    return trim({s.text.substr(off), s.line, s.col + static_cast<int>(off)});
}

std::optional<std::pair<Span, Span>> split_at(Span s, std::string_view sep)
{
    const auto k = s.text.find(sep);
    if (k == std::string_view::npos)
        return std::nullopt;
    Span a{s.text.substr(0, k), s.line, s.col};
    Span b{s.text.substr(k + sep.size()), s.line, s.col + static_cast<int>(k + sep.size())};
    return std::make_pair(trim(a), trim(b));
}

[[noreturn]] void syntax(const Span& s, const std::string& msg)
{
    throw ParseError(s.line, s.col, msg);
}

Expr expr_of(const Span& s, const std::string& what)
{
    if (s.empty())
        syntax(s, fmt::format("missing {}", what));
    return parse_expr(s.text, s.pos());
}

const std::set<std::string> kKeywords{"SCENARIO", "MODE",  "PRIME", "LEVEL",        "WINDOW",      "CAP",
                                      "CITE",     "NOTE",  "GENERATORS", "RULES",   "TENSOR",      "E1",
                                      "SEEDS",    "PERMANENT", "PAGE", "EXPECT",    "DIFFERENTIAL", "HH",
                                      "CDGA",     "HOM",   "DEGREE_DIMS", "CHECK"};

// Sections that own the following body lines.
const std::set<std::string> kSections{"GENERATORS", "RULES",       "SEEDS",       "PERMANENT", "PAGE",
                                      "EXPECT",     "DIFFERENTIAL", "HOM",        "DEGREE_DIMS"};

struct Directive {
    std::string keyword;
    Span head;   // the directive line
    Span args;   // after the keyword
    std::vector<Span> body;
};

struct GenLine {
    Span name;
    Expr n, w;
    GeneratorKind kind = GeneratorKind::Polynomial;
    std::optional<Expr> height;
    bool separable = false;
    std::optional<Expr> level;   // separable <prefix> [level]
};

struct AlgDef {
    std::string name;
    bool is_tensor = false;
    std::vector<GenLine> gens;
    std::vector<Span> rules;
    std::vector<Span> parts;
    Span where;
    std::optional<Window> fixed;   // GENERATORS <name> window a b c
};

Window window_union(const std::optional<Window>& a, const Window& b)
{
    if (!a)
        return b;
    return {std::min(a->n_min, b.n_min), std::max(a->n_max, b.n_max), std::max(a->w_max, b.w_max)};
}

class Builder {
public:
    Builder(std::string_view text, const ScenarioOverrides& ov) : ov_(ov)
    {
        std::string line;
        std::istringstream in{std::string(text)};
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            lines_.push_back(line);
        }
    }

    Scenario build()
    {
        split();
        header();
        collect_algebras();
        plan_stages();
        assign_windows();
        build_algebras();
        seeds();
        pages();
        permanent();
        expected();
        differentials();
        targets();
        homs();
        degree_dims();
        checks();
        validate();
        return std::move(s_);
    }

private:
    IntEnv env() const { return {s_.prime, s_.level}; }

    long long ival(const Span& sp, const std::string& field, const std::string& what)
    {
        return eval_int(expr_of(sp, what), env(), field);
    }

    int small(long long v, const std::string& field)
    {
        if (v < -1000000 || v > 1000000)
            throw ScenarioError(field, fmt::format("value {} out of range", v));
        return static_cast<int>(v);
    }

    void split()
    {
        std::optional<std::size_t> cur;
        for (std::size_t i = 0; i < lines_.size(); ++i) {
            std::string_view raw = lines_[i];
            if (auto h = raw.find('#'); h != std::string_view::npos)
                raw = raw.substr(0, h);
            Span sp = trim({raw, static_cast<int>(i + 1), 1});
            if (sp.empty())
                continue;
            auto w = words(sp);
            const std::string first(w[0].text);
            if (kKeywords.count(first)) {
                dirs_.push_back({first, sp, rest_after(sp, w[0]), {}});
                cur = kSections.count(first) ? std::optional<std::size_t>(dirs_.size() - 1) : std::nullopt;
                if (dirs_.size() == 1 && first != "SCENARIO")
                    syntax(w[0], "expected SCENARIO");
                continue;
            }
            if (dirs_.empty())
                syntax(w[0], "expected SCENARIO");
            if (!cur)
                syntax(w[0], fmt::format("unexpected '{}' outside a section", first));
            dirs_[*cur].body.push_back(sp);
        }
        if (dirs_.empty())
            throw ParseError(1, 1, "expected SCENARIO");
    }

    std::vector<const Directive*> all(const std::string& kw) const
    {
        std::vector<const Directive*> out;
        for (const auto& d : dirs_)
            if (d.keyword == kw)
                out.push_back(&d);
        return out;
    }

    const Directive* one(const std::string& kw) const
    {
        auto v = all(kw);
        if (v.size() > 1)
            syntax(v[1]->head, fmt::format("duplicate {}", kw));
        return v.empty() ? nullptr : v.front();
    }

    Span single_word(const Directive& d, const std::string& what)
    {
        auto w = words(d.args);
        if (w.size() != 1)
            syntax(w.empty() ? d.head : w[1], fmt::format("{} takes one {}", d.keyword, what));
        return w[0];
    }

    void header()
    {
        const Directive* sc = one("SCENARIO");
        s_.name = std::string(single_word(*sc, "name").text);

        const Directive* mode = one("MODE");
        if (!mode)
            throw ScenarioError("mode", "missing MODE");
        const std::string m(single_word(*mode, "mode").text);
        if (m == "sseq")
            s_.mode = ScenarioMode::Sseq;
        else if (m == "hh")
            s_.mode = ScenarioMode::Hh;
        else if (m == "hom-check")
            s_.mode = ScenarioMode::HomCheck;
        else if (m == "cdga")
            s_.mode = ScenarioMode::Cdga;
        else
            syntax(mode->args, fmt::format("unknown mode '{}'", m));

        const Directive* pr = one("PRIME");
        if (!pr && !ov_.prime)
            throw ScenarioError("prime", "missing PRIME");
        s_.prime = ov_.prime ? *ov_.prime : small(ival(single_word(*pr, "integer"), "prime", "prime"), "prime");
        try {
            PrimeField check(s_.prime);
        } catch (const Error& e) {
            throw ScenarioError("prime", e.what());
        }

        s_.level = 2;
        if (const Directive* lv = one("LEVEL"))
            s_.level = small(eval_int(expr_of(lv->args, "level"), {s_.prime, 0}, "level"), "level");
        if (ov_.level)
            s_.level = *ov_.level;
        if (s_.level < 1 || s_.level > 6)
            throw ScenarioError("level", fmt::format("level {} out of range 1..6", s_.level));

        const Directive* wd = one("WINDOW");
        if (!wd && !ov_.window)
            throw ScenarioError("window", "missing WINDOW");
        if (ov_.window) {
            s_.window = *ov_.window;
        } else {
            auto w = words(wd->args);
            if (w.size() != 3)
                syntax(wd->args, "WINDOW takes n_min n_max w_max");
            s_.window = {small(ival(w[0], "window.n_min", "n_min"), "window.n_min"),
                         small(ival(w[1], "window.n_max", "n_max"), "window.n_max"),
                         small(ival(w[2], "window.w_max", "w_max"), "window.w_max")};
        }
        if (s_.window.n_min > s_.window.n_max || s_.window.w_max < 0)
            throw ScenarioError("window", "empty window");

        if (const Directive* cap = one("CAP"))
            s_.cap = small(ival(cap->args, "cap", "cap"), "cap");

        for (const Directive* c : all("CITE")) {
            if (c->args.empty())
                throw ScenarioError(fmt::format("cite[{}]", s_.citations.size()), "empty citation");
            s_.citations.emplace_back(c->args.text);
        }
        for (const Directive* n : all("NOTE"))
            s_.notes.emplace_back(n->args.text);
    }

    AlgDef* find_def(const std::string& name)
    {
        for (auto& d : defs_)
            if (d.name == name)
                return &d;
        return nullptr;
    }

    void collect_algebras()
    {
        for (const auto& d : dirs_) {
            if (d.keyword == "GENERATORS") {
                auto hw = words(d.args);
                if (hw.size() != 1 && (hw.size() != 5 || hw[1].text != "window"))
                    syntax(d.args, "expected: GENERATORS <name> [window <n_min> <n_max> <w_max>]");
                const Span nm = hw[0];
                const std::string name(nm.text);
                if (find_def(name))
                    syntax(nm, fmt::format("algebra '{}' defined twice", name));
                AlgDef def{name, false, {}, {}, {}, nm, std::nullopt};
                if (hw.size() == 5) {
                    const std::string f = fmt::format("generators.{}.window", name);
                    def.fixed = Window{small(ival(hw[2], f, "n_min"), f), small(ival(hw[3], f, "n_max"), f),
                                       small(ival(hw[4], f, "w_max"), f)};
                    if (def.fixed->n_min > def.fixed->n_max || def.fixed->w_max < 0)
                        throw ScenarioError(f, "empty window");
                }
                for (const auto& line : d.body) {
                    auto w = words(line);
                    GenLine g;
                    g.name = w[0];
                    if (w[0].text == "separable") {
                        if (w.size() != 2 && w.size() != 3)
                            syntax(line, "expected: separable <prefix> [level]");
                        g.name = w[1];
                        g.separable = true;
                        if (w.size() == 3)
                            g.level = expr_of(w[2], "level");
                        def.gens.push_back(std::move(g));
                        continue;
                    }
                    if (w.size() < 4)
                        syntax(line, "expected: <name> <n> <w> <kind>");
                    g.n = expr_of(w[1], "n");
                    g.w = expr_of(w[2], "w");
                    const std::string kind(w[3].text);
                    std::size_t expect_words = 4;
                    if (kind == "polynomial")
                        g.kind = GeneratorKind::Polynomial;
                    else if (kind == "exterior")
                        g.kind = GeneratorKind::Exterior;
                    else if (kind == "divided")
                        g.kind = GeneratorKind::DividedPower;
                    else if (kind == "bounded") {
                        g.kind = GeneratorKind::Bounded;
                        if (w.size() < 5)
                            syntax(w[3], "bounded needs a height");
                        g.height = expr_of(w[4], "height");
                        expect_words = 5;
                    } else
                        syntax(w[3], fmt::format("unknown generator kind '{}'", kind));
                    if (w.size() > expect_words)
                        syntax(w[expect_words], "unexpected text after generator");
                    def.gens.push_back(std::move(g));
                }
                defs_.push_back(std::move(def));
            } else if (d.keyword == "TENSOR") {
                auto eq = split_at(d.args, "=");
                if (!eq)
                    syntax(d.args, "expected: TENSOR <name> = <a> <b> ...");
                auto lhs = words(eq->first);
                if (lhs.size() != 1)
                    syntax(eq->first, "expected one algebra name");
                const std::string name(lhs[0].text);
                if (find_def(name))
                    syntax(lhs[0], fmt::format("algebra '{}' defined twice", name));
                AlgDef def{name, true, {}, {}, words(eq->second), lhs[0], std::nullopt};
                if (def.parts.size() < 2)
                    syntax(eq->second, "TENSOR needs at least two factors");
                for (const auto& p : def.parts)
                    if (!find_def(std::string(p.text)))
                        throw ScenarioError(fmt::format("tensor.{}", name),
                                            fmt::format("unknown factor '{}' at {}:{}", p.text, p.line, p.col));
                defs_.push_back(std::move(def));
            }
        }
        for (const auto& d : dirs_) {
            if (d.keyword != "RULES")
                continue;
            const Span nm = single_word(d, "algebra name");
            AlgDef* def = find_def(std::string(nm.text));
            if (!def || def->is_tensor)
                throw ScenarioError(fmt::format("rules.{}", nm.text), "RULES must follow a GENERATORS algebra");
            def->rules.insert(def->rules.end(), d.body.begin(), d.body.end());
        }
    }

    std::string alg_name(const Span& sp, const std::string& field)
    {
        const std::string n(sp.text);
        if (!find_def(n))
            throw ScenarioError(field, fmt::format("unknown algebra '{}'", n));
        return n;
    }

    void plan_stages()
    {
        if (const Directive* e1 = one("E1"))
            s_.e1 = alg_name(single_word(*e1, "algebra name"), "e1");

        for (const Directive* d : all("SEEDS"))
            for (const auto& line : d->body) {
                const std::size_t i = seed_lines_.size();
                const std::string field = fmt::format("seeds[{}]", i);
                auto w = words(line);
                if (w[0].text != "d")
                    syntax(w[0], "expected: d <jump> : <source> -> <target> ; <citation>");
                auto colon = split_at(rest_after(line, w[0]), ":");
                if (!colon)
                    syntax(line, "seed needs ':' after the weight jump");
                const int jump = small(ival(colon->first, field + ".jump", "weight jump"), field);
                seed_lines_.push_back({line, jump});
            }

        for (const Directive* d : all("PAGE")) {
            auto w = words(d->args);
            if (w.size() != 2)
                syntax(d->args, "expected: PAGE <jump> <algebra>");
            const std::string field = fmt::format("pages[{}]", page_defs_.size());
            const int jump = small(ival(w[0], field + ".jump", "weight jump"), field);
            if (jump < 1)
                throw ScenarioError(field, fmt::format("weight jump {} is not positive", jump));
            for (const auto& pd : page_defs_)
                if (pd.jump == jump)
                    throw ScenarioError(field, fmt::format("two page models at jump {}", jump));
            page_defs_.push_back({d, jump, alg_name(w[1], field + ".algebra")});
        }

        std::set<int> jumps;
        for (const auto& sl : seed_lines_)
            jumps.insert(sl.jump);
        for (const auto& pd : page_defs_)
            jumps.insert(pd.jump);
        for (int j : jumps) {
            Stage st;
            st.jump = j;
            for (const auto& sl : seed_lines_)
                if (sl.jump == j)
                    st.seeds.push_back({j, {}, {}, "", ""});
            placeholder_.push_back(std::move(st));
        }
        internal_ = internal_window(s_.window, placeholder_);
    }

    // Base algebra in force for a seed at jump j (a page model at j applies first).
    std::string base_at(int jump, bool inclusive) const
    {
        std::string out = s_.e1;
        int best = 0;
        for (const auto& pd : page_defs_)
            if ((inclusive ? pd.jump <= jump : pd.jump < jump) && pd.jump > best) {
                best = pd.jump;
                out = pd.alg;
            }
        return out;
    }

    void assign_windows()
    {
        auto want = [&](const std::string& name, const Window& w) { windows_[name] = window_union(windows_[name], w); };
        if (!s_.e1.empty())
            want(s_.e1, internal_);
        for (const auto& pd : page_defs_)
            want(pd.alg, internal_);
        for (const Directive* d : all("DIFFERENTIAL")) {
            auto w = words(d->args);
            if (w.size() != 2)
                syntax(d->args, "expected: DIFFERENTIAL <algebra> <jump>");
            const std::string name = alg_name(w[0], "differential");
            const int jump = small(ival(w[1], fmt::format("differential.{}.jump", name), "weight jump"), "jump");
            if (jump < 1)
                throw ScenarioError(fmt::format("differential.{}", name),
                                    fmt::format("weight jump {} is not positive", jump));
            const Window& W = s_.window;
            want(name, {W.n_min - 1, W.n_max + 1, W.w_max + jump});
        }
        for (const auto& d : defs_)
            want(d.name, s_.window);
        for (const auto& d : defs_)
            if (d.fixed)
                windows_[d.name] = d.fixed;
        for (auto it = defs_.rbegin(); it != defs_.rend(); ++it)
            if (it->is_tensor)
                for (const auto& p : it->parts)
                    if (!find_def(std::string(p.text))->fixed)
                        want(std::string(p.text), *windows_[it->name]);
    }

    void build_algebras()
    {
        const PrimeField F(s_.prime);
        static const std::set<std::string> reserved{"p", "k", "gamma", "sigma", "d"};
        for (const auto& def : defs_) {
            const Window W = *windows_[def.name];
            const std::string field = fmt::format("generators.{}", def.name);
            std::shared_ptr<const Presentation> A;
            try {
                if (def.is_tensor) {
                    std::set<std::string> names;
                    Presentation acc = *s_.algebras.at(std::string(def.parts[0].text));
                    for (const auto& g : acc.generators())
                        names.insert(g.name);
                    for (std::size_t i = 1; i < def.parts.size(); ++i) {
                        const auto& B = *s_.algebras.at(std::string(def.parts[i].text));
                        for (const auto& g : B.generators())
                            if (!names.insert(g.name).second)
                                throw ScenarioError(fmt::format("tensor.{}", def.name),
                                                    fmt::format("generator name '{}' occurs in two factors", g.name));
                        acc = tensor(acc, B);
                    }
                    A = std::make_shared<const Presentation>(F, acc.generators(), acc.rules(), W);
                } else {
                    A = build_generators(def, F, W, field, reserved);
                }
            } catch (const ScenarioError&) {
                throw;
            } catch (const Error& e) {
                throw ScenarioError(def.is_tensor ? fmt::format("tensor.{}", def.name) : field, e.what());
            }
            s_.algebras.emplace(def.name, std::move(A));
            s_.algebra_order.push_back(def.name);
        }
    }

    std::shared_ptr<const Presentation> build_generators(const AlgDef& def, const PrimeField& F, const Window& W,
                                                         const std::string& field,
                                                         const std::set<std::string>& reserved)
    {
        std::vector<GeneratorSpec> specs;
        std::vector<std::size_t> separable_at;
        for (std::size_t i = 0; i < def.gens.size(); ++i) {
            const auto& g = def.gens[i];
            const std::string gf = fmt::format("{}[{}]", field, i);
            if (g.separable) {
                int level = s_.level;
                if (g.level) {
                    level = small(eval_int(*g.level, env(), gf + ".level"), gf + ".level");
                    if (level < 1 || level > 6)
                        throw ScenarioError(gf + ".level", fmt::format("level {} outside 1..6", level));
                }
                for (auto& sg : separable_generators(std::string(g.name.text), level)) {
                    separable_at.push_back(specs.size());
                    specs.push_back(std::move(sg));
                }
                continue;
            }
            GeneratorSpec spec;
            spec.name = std::string(g.name.text);
            spec.degree = {small(eval_int(g.n, env(), gf + ".n"), gf + ".n"),
                           small(eval_int(g.w, env(), gf + ".w"), gf + ".w")};
            spec.kind = g.kind;
            if (g.height) {
                spec.height = small(eval_int(*g.height, env(), gf + ".height"), gf + ".height");
                if (spec.height < 1)
                    throw ScenarioError(gf + ".height", "height must be positive");
            }
            specs.push_back(std::move(spec));
        }
        std::set<std::string> seen;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const auto& n = specs[i].name;
            if (reserved.count(n))
                throw ScenarioError(fmt::format("{}.{}", field, n), "reserved name");
            if (!seen.insert(n).second)
                throw ScenarioError(fmt::format("{}.{}", field, n), "duplicate generator name");
        }
        auto gens = expand_generators(specs, s_.prime, W.n_max);
        for (const auto& g : gens)
            if (g.name != g.divided_parent && !g.divided_parent.empty() && seen.count(g.name))
                throw ScenarioError(fmt::format("{}.{}", field, g.name), "clashes with a divided power generator");

        std::vector<RewriteRule> rules;
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < gens.size(); ++i)
            index[gens[i].name] = i;
        for (std::size_t i : separable_at) {
            const std::size_t gi = index.at(specs[i].name);
            Element rhs;
            Monomial m(gens.size(), 0);
            m[gi] = 1;
            rhs.terms.emplace(m, 1);
            rules.push_back({gi, s_.prime, rhs});
        }
        if (!def.rules.empty()) {
            const Presentation bare(F, gens, rules, W);
            for (std::size_t r = 0; r < def.rules.size(); ++r) {
                const Span& line = def.rules[r];
                const std::string rf = fmt::format("rules.{}[{}]", def.name, r);
                auto arrow = split_at(line, "->");
                if (!arrow)
                    syntax(line, "expected: <generator>^<power> -> <expression>");
                const Expr lhs = expr_of(arrow->first, "rule left side");
                if (lhs.op != Expr::Op::Pow || lhs.args[0].op != Expr::Op::Name)
                    syntax(arrow->first, "rule left side must be <generator>^<power>");
                auto gi = bare.find_generator(lhs.args[0].name);
                if (!gi)
                    throw ScenarioError(rf, fmt::format("unknown generator '{}'", lhs.args[0].name));
                const int power = small(eval_int(lhs.args[1], env(), rf), rf);
                if (power < 2)
                    throw ScenarioError(rf, "rule power must be at least 2");
                Element rhs = eval_element(expr_of(arrow->second, "rule right side"), bare, env(), rf);
                rules.push_back({*gi, power, std::move(rhs)});
            }
        }
        return std::make_shared<const Presentation>(F, std::move(gens), std::move(rules), W);
    }

    Element element(const Span& sp, const std::string& alg, const std::string& field, const std::string& what)
    {
        return eval_element(expr_of(sp, what), s_.algebra(alg), env(), field);
    }

    void seeds()
    {
        if (s_.mode == ScenarioMode::Sseq && s_.e1.empty())
            throw ScenarioError("e1", "sseq scenarios need an E1 algebra");
        if (s_.e1.empty() && !seed_lines_.empty())
            throw ScenarioError("seeds", "seeds need an E1 algebra");
        for (std::size_t i = 0; i < seed_lines_.size(); ++i) {
            const auto& [line, jump] = seed_lines_[i];
            const std::string field = fmt::format("seeds[{}]", i);
            auto w = words(line);
            auto colon = *split_at(rest_after(line, w[0]), ":");
            auto semi = split_at(colon.second, ";");
            Span body = semi ? semi->first : colon.second;
            auto arrow = split_at(body, "->");
            if (!arrow)
                syntax(body, "expected: <source> -> <target>");
            const std::string label =
                fmt::format("d_{}({}) = {}", jump, arrow->first.text, arrow->second.text);
            if (jump < 1)
                throw ScenarioError(field, fmt::format("weight jump {} is not positive in {}", jump, label));
            if (!semi || semi->second.empty())
                throw ScenarioError(field + ".citation", fmt::format("{} has no citation", label));
            const std::string base = base_at(jump, true);
            const Presentation& A = s_.algebra(base);
            Element src = element(arrow->first, base, field + ".source", "source");
            Element tgt = element(arrow->second, base, field + ".target", "target");
            if (src.terms.size() != 1)
                throw ScenarioError(field + ".source", fmt::format("{}: source must be a multiple of a generator", label));
            const Monomial& m = src.terms.begin()->first;
            int total = 0;
            for (auto e : m)
                total += e;
            if (total != 1)
                throw ScenarioError(field + ".source", fmt::format("{}: source must be a multiple of a generator", label));
            const Bidegree sd = A.degree(m);
            const Bidegree want{sd.n - 1, sd.w + jump};
            if (!A.is_homogeneous(tgt))
                throw ScenarioError(field + ".target", fmt::format("{}: target is inhomogeneous", label));
            if (auto td = A.homogeneous_degree(tgt); td && *td != want)
                throw ScenarioError(field + ".target",
                                    fmt::format("{}: target has bidegree {}, but d_{} of {} lands in {}", label,
                                                to_string(*td), jump, to_string(sd), to_string(want)));
            for (auto& st : placeholder_)
                if (st.jump == jump) {
                    auto slot = std::find_if(st.seeds.begin(), st.seeds.end(),
                                             [](const SeedDifferential& sdf) { return sdf.label.empty(); });
                    *slot = {jump, std::move(src), std::move(tgt), label, std::string(semi->second.text)};
                }
        }
    }

    void pages()
    {
        for (std::size_t i = 0; i < page_defs_.size(); ++i) {
            const auto& pd = page_defs_[i];
            const std::string field = fmt::format("pages[{}]", i);
            if (pd.alg == s_.e1)
                throw ScenarioError(field, "page model must differ from E1");
            const std::string prev = base_at(pd.jump, false);
            auto images = image_block(pd.dir->body, pd.alg, prev, field + ".images");
            for (auto& st : placeholder_)
                if (st.jump == pd.jump)
                    st.rebase = PageModel{s_.algebra_ptr(pd.alg), std::move(images)};
        }
        s_.stages = placeholder_;
        if (!s_.e1.empty())
            s_.final_base = base_at(1 << 30, true);
    }

    // Lines `g = expr`: one image per generator of `source`, evaluated in `target`.
    // Missing images default to the same-named generator of the target. An
    // unlisted gamma_{p^i}(g) follows g = gamma(j, h) to gamma(j p^i, h).
    std::vector<Element> image_block(const std::vector<Span>& body, const std::string& source,
                                     const std::string& target, const std::string& field)
    {
        const Presentation& S = s_.algebra(source);
        const Presentation& T = s_.algebra(target);
        std::vector<std::optional<Element>> got(S.num_generators());
        std::map<std::string, Expr> given;
        for (const auto& line : body) {
            auto eq = split_at(line, "=");
            if (!eq)
                syntax(line, "expected: <generator> = <expression>");
            const std::string g(eq->first.text);
            auto gi = S.find_generator(g);
            if (!gi)
                throw ScenarioError(fmt::format("{}.{}", field, g), fmt::format("'{}' is not a generator of {}", g, source));
            if (got[*gi])
                throw ScenarioError(fmt::format("{}.{}", field, g), "image given twice");
            const Expr e = expr_of(eq->second, "image");
            got[*gi] = eval_element(e, T, env(), fmt::format("{}.{}", field, g));
            given.emplace(g, e);
        }
        std::vector<Element> out;
        for (std::size_t i = 0; i < got.size(); ++i) {
            const auto& gen = S.generators()[i];
            const std::string f = fmt::format("{}.{}", field, gen.name);
            if (!got[i] && gen.divided_level > 0) {
                auto it = given.find(gen.divided_parent);
                if (it != given.end() && it->second.op == Expr::Op::Call && it->second.name == "gamma") {
                    Expr e = it->second;
                    long long scale = 1;
                    for (int l = 0; l < gen.divided_level; ++l)
                        scale *= s_.prime;
                    Expr j;
                    j.op = Expr::Op::Number;
                    j.value = eval_int(e.args[0], env(), f) * scale;
                    e.args[0] = j;
                    got[i] = eval_element(e, T, env(), f);
                }
            }
            if (!got[i] && T.find_generator(gen.name))
                got[i] = T.generator(*T.find_generator(gen.name));
            if (!got[i])
                throw ScenarioError(f, "missing image");
            out.push_back(*got[i]);
        }
        return out;
    }

    void permanent()
    {
        for (const Directive* d : all("PERMANENT")) {
            std::string alg = s_.e1;
            if (!d->args.empty())
                alg = alg_name(single_word(*d, "algebra name"), "permanent");
            if (alg.empty())
                throw ScenarioError("permanent", "PERMANENT needs an E1 algebra");
            for (const auto& line : d->body) {
                const std::string field = fmt::format("permanent[{}]", s_.permanent.size());
                auto semi = split_at(line, ";");
                if (!semi || semi->second.empty())
                    throw ScenarioError(field, "permanent cycle without a reason");
                Element e = element(semi->first, alg, field, "element");
                s_.permanent.push_back({std::string(semi->first.text), s_.algebra_ptr(alg), std::move(e)});
            }
        }
    }

    void expected()
    {
        const Directive* ex = one("EXPECT");
        if (!ex)
            return;
        s_.expected = alg_name(single_word(*ex, "algebra name"), "expect");
        if (ex->body.empty())
            return;
        if (s_.mode != ScenarioMode::Sseq)
            throw ScenarioError("expect.images", "generator images are only used by sseq scenarios");
        s_.expected_images = image_block(ex->body, s_.expected, s_.final_base, "expect.images");
    }

    void differentials()
    {
        for (const Directive* d : all("DIFFERENTIAL")) {
            auto w = words(d->args);
            const std::string name(w[0].text);
            const std::string field = fmt::format("differential.{}", name);
            if (s_.differentials.count(name))
                throw ScenarioError(field, "two differentials on one algebra");
            const Presentation& A = s_.algebra(name);
            Differential D = Differential::zero(A, small(ival(w[1], field, "jump"), field));
            for (const auto& line : d->body) {
                auto arrow = split_at(line, "->");
                if (!arrow)
                    syntax(line, "expected: <generator> -> <expression>");
                const std::string g(arrow->first.text);
                auto gi = A.find_generator(g);
                if (!gi)
                    throw ScenarioError(fmt::format("{}.{}", field, g), fmt::format("'{}' is not a generator", g));
                D.values[*gi] = element(arrow->second, name, fmt::format("{}.{}", field, g), "value");
            }
            try {
                check_differential_degrees(A, D);
            } catch (const Error& e) {
                throw ScenarioError(field, e.what());
            }
            s_.differentials.emplace(name, std::move(D));
        }
        if (!s_.expected.empty() && s_.expected_images && s_.differentials.count(s_.expected))
            throw ScenarioError("expect.images", "an expected homology takes no generator images");
    }

    void targets()
    {
        if (const Directive* h = one("HH"))
            s_.hh = alg_name(single_word(*h, "algebra name"), "hh");
        if (const Directive* c = one("CDGA")) {
            s_.cdga = alg_name(single_word(*c, "algebra name"), "cdga");
            if (!s_.differentials.count(s_.cdga))
                throw ScenarioError("cdga", fmt::format("'{}' has no DIFFERENTIAL", s_.cdga));
        }
    }

    void homs()
    {
        for (const Directive* d : all("HOM")) {
            auto arrow = split_at(d->args, "->");
            if (!arrow)
                syntax(d->args, "expected: HOM <name> <source> -> <target>");
            auto lhs = words(arrow->first);
            auto rhs = words(arrow->second);
            if (lhs.size() != 2 || rhs.size() != 1)
                syntax(d->args, "expected: HOM <name> <source> -> <target>");
            ScenarioHom h;
            h.name = std::string(lhs[0].text);
            const std::string field = fmt::format("hom.{}", h.name);
            if (s_.hom(h.name))
                throw ScenarioError(field, "duplicate hom name");
            h.source = alg_name(lhs[1], field + ".source");
            h.target = alg_name(rhs[0], field + ".target");
            h.images = image_block(d->body, h.source, h.target, field + ".images");
            s_.homs.push_back(std::move(h));
        }
    }

    void degree_dims()
    {
        for (const Directive* d : all("DEGREE_DIMS"))
            for (const auto& line : d->body) {
                auto w = words(line);
                if (w.size() != 2)
                    syntax(line, "expected: <degree> <dimension>");
                const std::string field = fmt::format("degree_dims[{}]", s_.degree_dims.size());
                const int n = small(ival(w[0], field, "degree"), field);
                const long long v = ival(w[1], field, "dimension");
                if (!s_.degree_dims.emplace(n, v).second)
                    throw ScenarioError(field, fmt::format("degree {} listed twice", n));
            }
    }

    // Algebra in which element checks are evaluated.
    std::string result_algebra() const
    {
        if (s_.mode == ScenarioMode::Sseq)
            return s_.final_base;
        if (s_.mode == ScenarioMode::Cdga)
            return s_.cdga;
        return {};
    }

    bool guard(Span& rest, const std::string& field)
    {
        auto w = words(rest);
        if (w.empty() || w[0].text != "WHEN")
            return true;
        if (w.size() < 3)
            syntax(rest, "expected: WHEN <condition> <check>");
        const Span cond = w[1];
        static const std::vector<std::string> ops{">=", "<=", "==", "!=", ">", "<"};
        for (const auto& op : ops) {
            auto parts = split_at(cond, op);
            if (!parts)
                continue;
            const long long a = ival(parts->first, field, "condition");
            const long long b = ival(parts->second, field, "condition");
            rest = rest_after(rest, cond);
            if (op == ">=")
                return a >= b;
            if (op == "<=")
                return a <= b;
            if (op == "==")
                return a == b;
            if (op == "!=")
                return a != b;
            if (op == ">")
                return a > b;
            return a < b;
        }
        syntax(cond, "expected a comparison such as p>3");
    }

    std::pair<Span, Span> equation(const Span& sp, std::string_view sep)
    {
        auto eq = split_at(sp, sep);
        if (!eq)
            syntax(sp, fmt::format("expected '{}'", sep));
        return *eq;
    }

    void checks()
    {
        for (const Directive* d : all("CHECK")) {
            const std::size_t idx = s_.checks.size() + skipped_;
            const std::string field = fmt::format("checks[{}]", idx);
            Span rest = d->args;
            if (!guard(rest, field)) {
                ++skipped_;
                s_.notes.push_back(fmt::format("skipped at p = {}: {}", s_.prime, d->args.text));
                continue;
            }
            auto w = words(rest);
            if (w.empty())
                syntax(d->head, "empty CHECK");
            const std::string kind(w[0].text);
            Span args = rest_after(rest, w[0]);
            ScenarioCheck c;
            c.text = std::string(rest.text);
            c.line = d->head.line;
            using K = ScenarioCheck::Kind;
            auto value = [&](const Span& sp) { return ival(sp, field, "value"); };
            auto bideg = [&](const Span& sp) {
                auto v = words(sp);
                if (v.size() != 2)
                    syntax(sp, "expected <n> <w>");
                return Bidegree{small(value(v[0]), field), small(value(v[1]), field)};
            };
            if (kind == "dim") {
                auto [l, r] = equation(args, "=");
                c.kind = K::Dim;
                c.at = bideg(l);
                c.value = value(r);
            } else if (kind == "degree") {
                auto [l, r] = equation(args, "=");
                c.kind = K::Degree;
                c.degree = small(value(l), field);
                c.value = value(r);
            } else if (kind == "total") {
                auto [l, r] = equation(args, "=");
                c.kind = K::Total;
                auto v = words(l);
                if (v.size() != 1)
                    syntax(l, "expected an algebra name");
                c.target = alg_name(v[0], field);
                if (!s_.differentials.count(c.target))
                    throw ScenarioError(field, fmt::format("'{}' has no DIFFERENTIAL", c.target));
                c.value = value(r);
            } else if (kind == "zero" || kind == "nonzero" || kind == "equal") {
                std::string alg = result_algebra();
                // ... IN <alg>: classes in the homology of a DIFFERENTIAL algebra
                auto aw = words(args);
                if (aw.size() >= 3 && aw[aw.size() - 2].text == "IN") {
                    c.target = alg_name(aw.back(), field);
                    if (!s_.differentials.count(c.target))
                        throw ScenarioError(field, fmt::format("'{}' has no DIFFERENTIAL", c.target));
                    alg = c.target;
                    const Span in = aw[aw.size() - 2];
                    args = trim({args.text.substr(0, static_cast<std::size_t>(in.text.data() - args.text.data())),
                                 args.line, args.col});
                }
                if (alg.empty())
                    throw ScenarioError(field, fmt::format("{} checks need an sseq or cdga scenario", kind));
                if (kind == "equal") {
                    auto [l, r] = equation(args, "==");
                    c.kind = K::Equal;
                    c.lhs = element(l, alg, field + ".lhs", "element");
                    c.rhs = element(r, alg, field + ".rhs", "element");
                } else {
                    c.kind = kind == "zero" ? K::Zero : K::Nonzero;
                    c.lhs = element(args, alg, field, "element");
                }
            } else if (kind == "scaled") {
                auto v = words(args);
                if (v.size() != 2)
                    syntax(args, "expected: scaled <algebra> <factor>");
                c.kind = K::Scaled;
                c.target = alg_name(v[0], field);
                c.value = value(v[1]);
            } else if (kind == "hom_rank") {
                auto [l, r] = equation(args, "=");
                auto v = words(l);
                if (v.size() != 3)
                    syntax(l, "expected: hom_rank <hom> <n> <w> = <rank>");
                c.kind = K::HomRank;
                c.target = std::string(v[0].text);
                c.at = {small(value(v[1]), field), small(value(v[2]), field)};
                c.value = value(r);
            } else if (kind == "hom_injective") {
                auto v = words(args);
                if (v.size() != 1)
                    syntax(args, "expected: hom_injective <hom>");
                c.kind = K::HomInjective;
                c.target = std::string(v[0].text);
            } else if (kind == "hh_relation") {
                if (s_.hh.empty())
                    throw ScenarioError(field, "hh_relation needs an HH algebra");
                auto [l, r] = equation(args, "~");
                c.kind = K::HhRelation;
                c.hh_lhs = expr_of(l, "left side");
                flatten(expr_of(r, "right side"), false, c.hh_terms);
                validate_hh(*c.hh_lhs, field);
                for (const auto& t : c.hh_terms)
                    validate_hh(t, field);
            } else {
                syntax(w[0], fmt::format("unknown check '{}'", kind));
            }
            if ((c.kind == K::Dim || c.kind == K::Degree || c.kind == K::Scaled) && s_.mode == ScenarioMode::HomCheck)
                throw ScenarioError(field, "hom-check scenarios have no result table");
            if ((c.kind == K::HomRank || c.kind == K::HomInjective) && !s_.hom(c.target))
                throw ScenarioError(field, fmt::format("unknown hom '{}'", c.target));
            s_.checks.push_back(std::move(c));
        }
    }

    static void flatten(const Expr& e, bool negate, std::vector<Expr>& out)
    {
        if (e.op == Expr::Op::Add) {
            flatten(e.args[0], negate, out);
            flatten(e.args[1], negate, out);
        } else if (e.op == Expr::Op::Sub) {
            flatten(e.args[0], negate, out);
            flatten(e.args[1], !negate, out);
        } else if (negate) {
            Expr n;
            n.op = Expr::Op::Neg;
            n.pos = e.pos;
            n.args.push_back(e);
            out.push_back(std::move(n));
        } else {
            out.push_back(e);
        }
    }

    void validate_hh(const Expr& e, const std::string& field)
    {
        const Presentation& A = s_.algebra(s_.hh);
        if (e.op == Expr::Op::Call) {
            if (e.name != "sigma" || e.args.size() != 1 || e.args[0].op != Expr::Op::Name)
                throw ScenarioError(field, fmt::format("expected sigma(generator) at {}:{}", e.pos.line, e.pos.column));
        }
        if (e.op == Expr::Op::Pow) {
            validate_hh(e.args[0], field);
            eval_int(e.args[1], env(), field);
            return;
        }
        if (e.op == Expr::Op::Name && !A.find_generator(e.name))
            throw ScenarioError(field, fmt::format("unknown generator '{}' at {}:{}", e.name, e.pos.line, e.pos.column));
        for (const auto& a : e.args)
            validate_hh(a, field);
    }

    void validate()
    {
        if (s_.citations.empty())
            throw ScenarioError("cite", "a scenario must cite what it transcribes");
        switch (s_.mode) {
        case ScenarioMode::Sseq:
            if (s_.expected.empty() && s_.degree_dims.empty())
                throw ScenarioError("expect", "sseq scenarios need EXPECT or DEGREE_DIMS");
            break;
        case ScenarioMode::Hh:
            if (s_.hh.empty())
                throw ScenarioError("hh", "hh scenarios need an HH algebra");
            if (s_.expected.empty() && s_.degree_dims.empty())
                throw ScenarioError("expect", "hh scenarios need EXPECT or DEGREE_DIMS");
            break;
        case ScenarioMode::HomCheck:
            if (s_.homs.empty())
                throw ScenarioError("hom", "hom-check scenarios need a HOM");
            break;
        case ScenarioMode::Cdga:
            if (s_.cdga.empty())
                throw ScenarioError("cdga", "cdga scenarios need a CDGA algebra");
            break;
        }
    }

    struct SeedLine {
        Span line;
        int jump = 0;
    };
    struct PageDef {
        const Directive* dir = nullptr;
        int jump = 0;
        std::string alg;
    };

    ScenarioOverrides ov_;
    std::vector<std::string> lines_;
    std::vector<Directive> dirs_;
    std::vector<AlgDef> defs_;
    std::vector<SeedLine> seed_lines_;
    std::vector<PageDef> page_defs_;
    std::vector<Stage> placeholder_;
    Window internal_;
    std::map<std::string, std::optional<Window>> windows_;
    std::size_t skipped_ = 0;
    Scenario s_;
};

}  // namespace

Scenario parse_scenario(std::string_view text, const ScenarioOverrides& overrides)
{
    return Builder(text, overrides).build();
}

std::string read_scenario_file(const std::string& dir, const std::string& name)
{
    const auto path = std::filesystem::path(dir) / (name + ".scn");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(fmt::format("cannot read {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> list_scenarios(const std::string& dir)
{
    std::vector<std::string> out;
    if (!std::filesystem::is_directory(dir))
        return out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".scn")
            out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace thhcalc
