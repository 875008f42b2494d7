#pragma once

// Declarative scenario files. See docs/scenario-format.md for the grammar.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thhcalc/dga.hpp"
#include "thhcalc/expr.hpp"
#include "thhcalc/presentation.hpp"
#include "thhcalc/sseq.hpp"

namespace thhcalc {

enum class ScenarioMode { Sseq, Hh, HomCheck, Cdga };

std::string to_string(ScenarioMode m);

struct ScenarioOverrides {
    std::optional<int> prime;
    std::optional<int> level;
    std::optional<Window> window;
};

struct ScenarioHom {
    std::string name;
    std::string source;
    std::string target;
    std::vector<Element> images;   // one per source generator; missing ones are zero
};

struct ScenarioCheck {
    enum class Kind { Dim, Degree, Total, Zero, Nonzero, Equal, Scaled, HomRank, HomInjective, HhRelation };

    Kind kind = Kind::Dim;
    std::string text;   // the line as written
    int line = 0;
    Bidegree at;
    int degree = 0;
    long long value = 0;
    std::string target;   // algebra or hom name
    Element lhs;
    Element rhs;
    // hh_relation: evaluated against the Hochschild result at run time.
    std::optional<Expr> hh_lhs;
    std::vector<Expr> hh_terms;
};

struct Scenario {
    std::string name;
    ScenarioMode mode = ScenarioMode::Sseq;
    int prime = 2;
    int level = 2;
    Window window;
    int cap = 6;
    std::vector<std::string> citations;
    std::vector<std::string> notes;

    std::map<std::string, std::shared_ptr<const Presentation>> algebras;
    std::vector<std::string> algebra_order;   // definition order

    // sseq
    std::string e1;
    std::vector<Stage> stages;
    std::vector<PermanentCheck> permanent;
    std::string final_base;

    // Expected answer: a presentation (with optional generator images in the
    // final base) or the homology of an algebra carrying a differential.
    std::string expected;
    std::optional<std::vector<Element>> expected_images;
    std::map<int, long long> degree_dims;

    std::map<std::string, Differential> differentials;
    std::string hh;     // hh mode
    std::string cdga;   // cdga mode
    std::vector<ScenarioHom> homs;
    std::vector<ScenarioCheck> checks;

    const Presentation& algebra(const std::string& name) const;
    std::shared_ptr<const Presentation> algebra_ptr(const std::string& name) const;
    const ScenarioHom* hom(const std::string& name) const;
};

// Throws ParseError for syntax and ScenarioError for semantic problems.
Scenario parse_scenario(std::string_view text, const ScenarioOverrides& overrides = {});

// Reads <dir>/<name>.scn.
std::string read_scenario_file(const std::string& dir, const std::string& name);
// Names of the .scn files in a directory, sorted.
std::vector<std::string> list_scenarios(const std::string& dir);

}  // namespace thhcalc
