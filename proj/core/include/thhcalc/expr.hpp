#pragma once

// Expressions used in scenario files.
//
// Integers may use the variables p (the prime) and k (the level), with
// + - * ^, parentheses and implicit multiplication: 2p^2-2p+1, (p-1)(2p-2).
// Elements of a presentation use the same grammar over generator names,
// with gamma(j, g) for divided powers. Exponents are always integers.

#include <string>
#include <string_view>
#include <vector>

#include "thhcalc/presentation.hpp"

namespace thhcalc {

struct SourcePos {
    int line = 1;
    int column = 1;
};

struct Expr {
    enum class Op { Number, Name, Call, Add, Sub, Mul, Pow, Neg };

    Op op = Op::Number;
    long long value = 0;
    std::string name;   // Name, Call
    std::vector<Expr> args;
    SourcePos pos;
};

// Throws ParseError at the offending column; `start` is the position of text[0].
Expr parse_expr(std::string_view text, SourcePos start);

struct IntEnv {
    int p = 2;
    int k = 1;
};

// Throws ScenarioError(field, ...) on names other than p and k.
long long eval_int(const Expr& e, const IntEnv& env, const std::string& field);
long long eval_int(std::string_view text, SourcePos start, const IntEnv& env, const std::string& field);

// Names resolve to generators of A; p and k are integers unless A has
// generators with those names.
Element eval_element(const Expr& e, const Presentation& A, const IntEnv& env, const std::string& field);
Element eval_element(std::string_view text, SourcePos start, const Presentation& A, const IntEnv& env,
                     const std::string& field);

// Generator names referenced by an expression, excluding p, k and callees.
std::vector<std::string> referenced_names(const Expr& e);

}  // namespace thhcalc
