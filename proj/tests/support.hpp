#pragma once

#include <initializer_list>
#include <string>

#include "thhcalc/presentation.hpp"

namespace thhcalc::testing {

inline GeneratorSpec gen(const std::string& name, int n, int w, GeneratorKind kind = GeneratorKind::Polynomial, int h = 0)
{
    return {name, {n, w}, kind, h, {}, 0};
}

inline Element mono(std::initializer_list<std::uint16_t> e, Fp c = 1)
{
    Element x;
    x.terms.emplace(Monomial(e), c);
    return x;
}

inline Presentation separable(int p, int level, Window w = {0, 0, 0})
{
    auto gens = separable_generators("y", level);
    std::vector<RewriteRule> rules;
    for (int i = 0; i < level; ++i) {
        Monomial m(static_cast<std::size_t>(level), 0);
        m[static_cast<std::size_t>(i)] = 1;
        Element rhs;
        rhs.terms.emplace(m, 1);
        rules.push_back({static_cast<std::size_t>(i), p, rhs});
    }
    return Presentation(PrimeField(p), gens, rules, w);
}

}  // namespace thhcalc::testing
