#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "thhcalc/error.hpp"
#include "thhcalc/scenario.hpp"

using namespace thhcalc;

namespace {

const std::string corpus = THHCALC_TEST_CORPUS;

const char* kZp = R"(SCENARIO t
MODE sseq
PRIME 3
WINDOW 0 12 4
CITE test
GENERATORS e1
  s2p 2 0 polynomial
  dv0 1 1 exterior
E1 e1
SEEDS
)";

std::string field_of(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        return e.field();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("empty file is a syntax error at 1:1")
{
    try {
        parse_scenario("");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 1);
    }
    CHECK_THROWS_AS(parse_scenario("# only a comment\n\n"), ParseError);
}

TEST_CASE("syntax errors point at the offending line")
{
    try {
        parse_scenario("SCENARIO t\nMODE sseq\n  stray body line\n");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 3);
    }
    try {
        parse_scenario("MODE sseq\n");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
}

TEST_CASE("seed validation names the seed")
{
    CHECK(field_of(std::string(kZp) + "  d 0 : s2p -> dv0 ; c\n") == "seeds[0]");
    CHECK(field_of(std::string(kZp) + "  d 1 : s2p -> dv0 ; c\n  d 2 : s2p -> dv0 ; c\n") == "seeds[1].target");
    CHECK(field_of(std::string(kZp) + "  d 1 : s2p -> dv0 ;\n") == "seeds[0].citation");
    CHECK(field_of(std::string(kZp) + "  d 1 : s2p^2 -> dv0 ; c\n") == "seeds[0].source");
    CHECK(field_of(std::string(kZp) + "  d 1 : nope -> dv0 ; c\n").rfind("seeds[0]", 0) == 0);
}

TEST_CASE("header validation")
{
    const std::string body = "GENERATORS a\n  x 2 0 polynomial\nDIFFERENTIAL a 1\n  x -> 0\nCDGA a\n";
    CHECK(field_of("SCENARIO t\nMODE cdga\nPRIME 4\nWINDOW 0 4 0\nCITE c\n" + body) == "prime");
    CHECK(field_of("SCENARIO t\nMODE cdga\nPRIME 3\nWINDOW 0 4 0\n" + body) == "cite");
    CHECK(field_of("SCENARIO t\nMODE cdga\nPRIME 3\nLEVEL 9\nWINDOW 0 4 0\nCITE c\n" + body) == "level");
}

TEST_CASE("reserved and duplicate generator names")
{
    const std::string head = "SCENARIO t\nMODE cdga\nPRIME 3\nWINDOW 0 4 0\nCITE c\n";
    CHECK(field_of(head + "GENERATORS a\n  p 2 0 polynomial\nCDGA a\n") == "generators.a.p");
    CHECK(field_of(head + "GENERATORS a\n  x 2 0 polynomial\n  x 4 0 polynomial\nCDGA a\n") == "generators.a.x");
}

TEST_CASE("shipped thh_Zp_mod_p has the single first-page seed")
{
    const Scenario s = parse_scenario(read_scenario_file(corpus, "thh_Zp_mod_p"));
    CHECK(s.mode == ScenarioMode::Sseq);
    CHECK(s.prime == 3);
    REQUIRE(s.stages.size() == 1);
    REQUIRE(s.stages[0].seeds.size() == 1);
    CHECK(s.stages[0].jump == 1);
    CHECK(s.stages[0].seeds[0].label == "d_1(s2p) = dv0");
    CHECK_FALSE(s.stages[0].seeds[0].citation.empty());
}

TEST_CASE("overrides")
{
    ScenarioOverrides ov;
    ov.prime = 3;
    ov.window = Window{0, 20, 20};
    const Scenario s = parse_scenario(read_scenario_file(corpus, "thh_j_mod_p_v1"), ov);
    CHECK(s.prime == 3);
    CHECK(s.window == Window{0, 20, 20});
    // the guarded extension checks are skipped below p = 5
    CHECK(std::count_if(s.notes.begin(), s.notes.end(), [](const std::string& n) { return n.rfind("skipped", 0) == 0; })
          == 7);
    REQUIRE(s.stages.size() == 2);
    CHECK(s.stages[1].jump == 8);
    CHECK(s.stages[1].rebase.has_value());
}

TEST_CASE("separable level and image defaults")
{
    const std::string text = R"(SCENARIO t
MODE hom-check
PRIME 3
LEVEL 3
WINDOW 0 0 0
CITE c
GENERATORS big
  separable y
GENERATORS small
  separable y k-1
HOM r big -> small
  y0 = 0
  y1 = y0
  y2 = y1
)";
    const Scenario s = parse_scenario(text);
    CHECK(s.algebra("big").num_generators() == 3);
    CHECK(s.algebra("small").num_generators() == 2);
    // without y2 the default is a same-named generator, which small lacks
    CHECK(field_of(text.substr(0, text.rfind("  y2"))) == "hom.r.images.y2");
}

TEST_CASE("corpus matches the manifest")
{
    std::ifstream in(corpus + "/MANIFEST");
    REQUIRE(in);
    std::vector<std::string> manifest;
    for (std::string line; std::getline(in, line);)
        if (!line.empty())
            manifest.push_back(line);
    CHECK(manifest.size() == 14);
    CHECK(list_scenarios(corpus) == manifest);
    for (const auto& name : manifest) {
        CAPTURE(name);
        const Scenario s = parse_scenario(read_scenario_file(corpus, name));
        CHECK(s.name == name);
        CHECK_FALSE(s.citations.empty());
        for (const auto& st : s.stages)
            for (const auto& seed : st.seeds)
                CHECK_FALSE(seed.citation.empty());
    }
}
