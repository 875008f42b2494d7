// Command-line runner for the scenario corpus.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "thhcalc/chart.hpp"
#include "thhcalc/error.hpp"
#include "thhcalc/runner.hpp"
#include "thhcalc/scenario.hpp"

#ifndef THHCALC_CORPUS_DIR
#define THHCALC_CORPUS_DIR "corpus"
#endif

namespace fs = std::filesystem;
using namespace thhcalc;

namespace {

std::optional<Window> parse_window(const std::string& s)
{
    Window w;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> w.n_min >> c1 >> w.n_max >> c2 >> w.w_max) || c1 != ':' || c2 != ':' || in.peek() != EOF)
        return std::nullopt;
    return w;
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(fmt::format("cannot write {}", path.string()));
    out << text;
}

struct Outcome {
    std::string name;
    bool parse_failed = false;
    std::string parse_error;
    RunReport report;
};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Symbolic spectral sequence and Hochschild homology runner"};
    app.require_subcommand(1);

    std::string corpus = std::getenv("THHCALC_CORPUS") ? std::getenv("THHCALC_CORPUS") : THHCALC_CORPUS_DIR;
    app.add_option("--corpus", corpus, "Directory of .scn files");

    auto* list = app.add_subcommand("list", "List the scenarios in the corpus");

    auto* run = app.add_subcommand("run", "Run scenarios");
    std::vector<std::string> names;
    bool all = false;
    std::optional<int> prime, level, page;
    std::string window_text, json_out, chart_out;
    bool seed_audit = false, timings = false;
    std::optional<std::size_t> perturb;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* sc = run->add_option("--scenario", names, "Scenario name (repeatable)");
    auto* al = run->add_flag("--all", all, "Run every scenario in the corpus");
    sc->excludes(al);
    run->add_option("--prime", prime, "Override the prime");
    run->add_option("--window", window_text, "Override the window as NMIN:NMAX:WMAX");
    run->add_option("--level", level, "Override the separable level");
    run->add_option("--json-out", json_out, "Directory for JSON reports");
    run->add_option("--chart-out", chart_out, "Directory for SVG charts");
    run->add_option("--page", page, "Chart only this page");
    run->add_flag("--seed-audit", seed_audit, "Print the seed audit and include it in JSON");
    run->add_flag("--timings", timings, "Include timings in JSON");
    run->add_option("--perturb", perturb, "Add 1 to the expected value of this comparison (negative control)");
    run->add_option("--jobs", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const auto known = list_scenarios(corpus);
    if (*list) {
        for (const auto& n : known)
            fmt::print("{}\n", n);
        return 0;
    }

    if (!all && names.empty()) {
        fmt::print(stderr, "run: pass --scenario <name> or --all\n");
        return 2;
    }
    if (all)
        names = known;
    for (const auto& n : names)
        if (std::find(known.begin(), known.end(), n) == known.end()) {
            fmt::print(stderr, "unknown scenario '{}'; known scenarios:\n", n);
            for (const auto& k : known)
                fmt::print(stderr, "  {}\n", k);
            return 2;
        }

    ScenarioOverrides ov;
    ov.prime = prime;
    ov.level = level;
    if (!window_text.empty()) {
        ov.window = parse_window(window_text);
        if (!ov.window) {
            fmt::print(stderr, "--window expects NMIN:NMAX:WMAX, got '{}'\n", window_text);
            return 2;
        }
    }
    for (const auto& dir : {json_out, chart_out})
        if (!dir.empty())
            fs::create_directories(dir);

    std::vector<Outcome> outcomes(names.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i; (i = next++) < names.size();) {
            Outcome& o = outcomes[i];
            o.name = names[i];
            Scenario s;
            try {
                s = parse_scenario(read_scenario_file(corpus, names[i]), ov);
            } catch (const Error& e) {
                o.parse_failed = true;
                o.parse_error = e.what();
                continue;
            }
            ScenarioRunOptions ro;
            ro.perturb = perturb;
            try {
                o.report = run_scenario(s, ro);
            } catch (const Error& e) {
                o.report.scenario = s.name;
                o.report.status = RunStatus::Error;
                o.report.mismatches = {e.what()};
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(jobs, names.size()); ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    int code = 0;
    for (const auto& o : outcomes) {
        if (o.parse_failed) {
            fmt::print("ERROR {}: {}\n", o.name, o.parse_error);
            code = 2;
            continue;
        }
        const RunReport& r = o.report;
        double total = 0;
        for (const auto& [k, v] : r.timings)
            if (k == "total")
                total = v;
        fmt::print("{} {} ({:.2f} s)\n", to_string(r.status), o.name, total);
        const std::size_t shown = std::min<std::size_t>(r.mismatches.size(), 20);
        for (std::size_t i = 0; i < shown; ++i)
            fmt::print("    {}\n", r.mismatches[i]);
        if (r.mismatches.size() > shown)
            fmt::print("    ... {} more\n", r.mismatches.size() - shown);
        if (seed_audit)
            for (const auto& a : r.seed_audit)
                fmt::print("    seed {} at {}: {}{} [{}]\n", a.label, to_string(a.source), a.cycle ? "cycle" : "not a cycle",
                           a.boundary ? ", boundary" : "", a.citation);
        if (r.status != RunStatus::Pass && code == 0)
            code = 1;

        try {
            if (!json_out.empty())
                write_file(fs::path(json_out) / (o.name + ".json"), report_json(r, {timings, seed_audit}));
            if (!chart_out.empty()) {
                if (page) {
                    write_file(fs::path(chart_out) / fmt::format("{}_page{}.svg", o.name, *page), emit_chart(r, *page));
                } else {
                    for (const auto& p : r.pages)
                        write_file(fs::path(chart_out) / fmt::format("{}_page{}.svg", o.name, p.r), emit_chart(r, p.r));
                }
            }
        } catch (const Error& e) {
            fmt::print(stderr, "{}: {}\n", o.name, e.what());
            code = 2;
        }
    }
    return code;
}
