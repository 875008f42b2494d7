#include "thhcalc/expr.hpp"

#include <cctype>

#include <fmt/format.h>

#include "thhcalc/error.hpp"

namespace thhcalc {

namespace {

struct Token {
    enum class Kind { Number, Ident, Symbol, End } kind = Kind::End;
    std::string text;
    long long value = 0;
    SourcePos pos;
};

std::vector<Token> tokenize(std::string_view s, SourcePos start)
{
    std::vector<Token> out;
    std::size_t i = 0;
    auto at = [&](std::size_t j) { return SourcePos{start.line, start.column + static_cast<int>(j)}; };
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        Token t;
        t.pos = at(i);
        if (std::isdigit(c)) {
            std::size_t j = i;
            long long v = 0;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
                if (v > 100000000000LL)
                    throw ParseError(t.pos.line, t.pos.column, "integer literal too large");
                v = v * 10 + (s[j] - '0');
                ++j;
            }
            t.kind = Token::Kind::Number;
            t.value = v;
            t.text = std::string(s.substr(i, j - i));
            i = j;
        } else if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            t.kind = Token::Kind::Ident;
            t.text = std::string(s.substr(i, j - i));
            i = j;
        } else if (std::string_view("+-*^(),").find(static_cast<char>(c)) != std::string_view::npos) {
            t.kind = Token::Kind::Symbol;
            t.text = std::string(1, static_cast<char>(c));
            ++i;
        } else {
            throw ParseError(t.pos.line, t.pos.column, fmt::format("unexpected character '{}'", s[i]));
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.pos = at(s.size());
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Expr parse()
    {
        if (peek().kind == Token::Kind::End)
            fail(peek(), "empty expression");
        Expr e = sum();
        if (peek().kind != Token::Kind::End)
            fail(peek(), fmt::format("unexpected '{}'", peek().text));
        return e;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& next() { return toks_[i_++]; }
    bool is(const char* sym) const { return peek().kind == Token::Kind::Symbol && peek().text == sym; }

    [[noreturn]] static void fail(const Token& t, const std::string& msg)
    {
        throw ParseError(t.pos.line, t.pos.column, msg);
    }

    void expect(const char* sym)
    {
        if (!is(sym))
            fail(peek(), fmt::format("expected '{}'", sym));
        ++i_;
    }

    static Expr binary(Expr::Op op, Expr a, Expr b)
    {
        Expr e;
        e.op = op;
        e.pos = a.pos;
        e.args.push_back(std::move(a));
        e.args.push_back(std::move(b));
        return e;
    }

    bool starts_atom() const
    {
        return peek().kind == Token::Kind::Number || peek().kind == Token::Kind::Ident || is("(");
    }

    Expr sum()
    {
        Expr e = product();
        while (is("+") || is("-")) {
            const auto op = next().text == "+" ? Expr::Op::Add : Expr::Op::Sub;
            e = binary(op, std::move(e), product());
        }
        return e;
    }

    Expr product()
    {
        Expr e = unary();
        for (;;) {
            if (is("*")) {
                ++i_;
                e = binary(Expr::Op::Mul, std::move(e), unary());
            } else if (starts_atom()) {
                e = binary(Expr::Op::Mul, std::move(e), unary());
            } else {
                return e;
            }
        }
    }

    Expr unary()
    {
        if (is("-")) {
            Expr e;
            e.op = Expr::Op::Neg;
            e.pos = next().pos;
            e.args.push_back(unary());
            return e;
        }
        return power();
    }

    Expr power()
    {
        Expr base = atom();
        if (!is("^"))
            return base;
        ++i_;
        Expr ex = is("-") ? unary() : power();
        return binary(Expr::Op::Pow, std::move(base), std::move(ex));
    }

    Expr atom()
    {
        const Token& t = peek();
        Expr e;
        e.pos = t.pos;
        if (t.kind == Token::Kind::Number) {
            e.op = Expr::Op::Number;
            e.value = next().value;
            return e;
        }
        if (t.kind == Token::Kind::Ident) {
            e.name = next().text;
            if (!is("(")) {
                e.op = Expr::Op::Name;
                return e;
            }
            ++i_;
            e.op = Expr::Op::Call;
            if (!is(")"))
                for (;;) {
                    e.args.push_back(sum());
                    if (!is(","))
                        break;
                    ++i_;
                }
            expect(")");
            return e;
        }
        if (is("(")) {
            ++i_;
            Expr inner = sum();
            expect(")");
            return inner;
        }
        if (t.kind == Token::Kind::End)
            fail(t, "unexpected end of expression");
        fail(t, fmt::format("unexpected '{}'", t.text));
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

long long checked_mul(long long a, long long b, const std::string& field)
{
    long long r;
    if (__builtin_mul_overflow(a, b, &r))
        throw ScenarioError(field, "integer overflow");
    return r;
}

std::string where(const Expr& e)
{
    return fmt::format("{}:{}", e.pos.line, e.pos.column);
}

}  // namespace

Expr parse_expr(std::string_view text, SourcePos start)
{
    return Parser(tokenize(text, start)).parse();
}

long long eval_int(const Expr& e, const IntEnv& env, const std::string& field)
{
    switch (e.op) {
    case Expr::Op::Number:
        return e.value;
    case Expr::Op::Name:
        if (e.name == "p")
            return env.p;
        if (e.name == "k")
            return env.k;
        throw ScenarioError(field, fmt::format("unknown variable '{}' at {}", e.name, where(e)));
    case Expr::Op::Call:
        throw ScenarioError(field, fmt::format("function '{}' is not allowed in an integer at {}", e.name, where(e)));
    case Expr::Op::Add:
        return eval_int(e.args[0], env, field) + eval_int(e.args[1], env, field);
    case Expr::Op::Sub:
        return eval_int(e.args[0], env, field) - eval_int(e.args[1], env, field);
    case Expr::Op::Mul:
        return checked_mul(eval_int(e.args[0], env, field), eval_int(e.args[1], env, field), field);
    case Expr::Op::Neg:
        return -eval_int(e.args[0], env, field);
    case Expr::Op::Pow: {
        const long long b = eval_int(e.args[0], env, field);
        const long long x = eval_int(e.args[1], env, field);
        if (x < 0)
            throw ScenarioError(field, fmt::format("negative exponent at {}", where(e)));
        long long r = 1;
        for (long long i = 0; i < x; ++i)
            r = checked_mul(r, b, field);
        return r;
    }
    }
    return 0;
}

long long eval_int(std::string_view text, SourcePos start, const IntEnv& env, const std::string& field)
{
    return eval_int(parse_expr(text, start), env, field);
}

Element eval_element(const Expr& e, const Presentation& A, const IntEnv& env, const std::string& field)
{
    try {
        switch (e.op) {
        case Expr::Op::Number:
            return A.scalar(e.value);
        case Expr::Op::Name:
            if (auto i = A.find_generator(e.name))
                return A.generator(*i);
            if (e.name == "p" || e.name == "k")
                return A.scalar(eval_int(e, env, field));
            throw ScenarioError(field, fmt::format("unknown generator '{}' at {}", e.name, where(e)));
        case Expr::Op::Call: {
            if (e.name != "gamma" || e.args.size() != 2 || e.args[1].op != Expr::Op::Name)
                throw ScenarioError(field, fmt::format("expected gamma(j, generator) at {}", where(e)));
            const long long j = eval_int(e.args[0], env, field);
            const std::string& g = e.args[1].name;
            bool found = false;
            for (const auto& spec : A.generators())
                found = found || spec.divided_parent == g;
            if (!found)
                throw ScenarioError(field, fmt::format("'{}' is not a divided power generator at {}", g, where(e)));
            return A.divided_power(g, static_cast<int>(j));
        }
        case Expr::Op::Add:
            return A.add(eval_element(e.args[0], A, env, field), eval_element(e.args[1], A, env, field));
        case Expr::Op::Sub:
            return A.sub(eval_element(e.args[0], A, env, field), eval_element(e.args[1], A, env, field));
        case Expr::Op::Mul:
            return A.multiply(eval_element(e.args[0], A, env, field), eval_element(e.args[1], A, env, field));
        case Expr::Op::Neg:
            return A.scale(eval_element(e.args[0], A, env, field), A.field().neg(1));
        case Expr::Op::Pow: {
            const long long x = eval_int(e.args[1], env, field);
            if (x < 0 || x > 100000)
                throw ScenarioError(field, fmt::format("exponent {} out of range at {}", x, where(e)));
            return A.power(eval_element(e.args[0], A, env, field), static_cast<int>(x));
        }
        }
    } catch (const ScenarioError&) {
        throw;
    } catch (const Error& err) {
        throw ScenarioError(field, err.what());
    }
    return {};
}

Element eval_element(std::string_view text, SourcePos start, const Presentation& A, const IntEnv& env,
                     const std::string& field)
{
    return eval_element(parse_expr(text, start), A, env, field);
}

std::vector<std::string> referenced_names(const Expr& e)
{
    std::vector<std::string> out;
    if (e.op == Expr::Op::Name && e.name != "p" && e.name != "k")
        out.push_back(e.name);
    const std::size_t first = e.op == Expr::Op::Call ? 1 : 0;
    for (std::size_t i = first; i < e.args.size(); ++i) {
        if (e.op == Expr::Op::Pow && i == 1)
            continue;
        auto sub = referenced_names(e.args[i]);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

}  // namespace thhcalc
