#pragma once

// Running scenarios: dispatch per mode, expected-value comparison, property
// gates and machine-readable reports.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thhcalc/scenario.hpp"
#include "thhcalc/sseq.hpp"

namespace thhcalc {

enum class RunStatus { Pass, Fail, Error };

std::string to_string(RunStatus s);

// One compared quantity. Its location names where it lives, e.g.
// "dim at (17,4)" or "degree 48".
struct Comparison {
    std::string location;
    long long expected = 0;
    long long actual = 0;
};

struct GateResult {
    std::string name;
    std::size_t checked = 0;
    std::vector<std::string> violations;
};

struct RunReport {
    std::string scenario;
    ScenarioMode mode = ScenarioMode::Sseq;
    RunStatus status = RunStatus::Pass;
    int prime = 2;
    Window window;
    // Pages restricted to the reported window. Modes without a spectral
    // sequence report their result table as page 0.
    std::vector<PageRecord> pages;
    std::vector<Comparison> comparisons;
    std::vector<std::string> mismatches;
    std::vector<GateResult> gates;
    std::vector<SeedAudit> seed_audit;
    std::vector<std::string> notes;
    std::vector<std::pair<std::string, double>> timings;   // seconds

    const PageRecord* page(int r) const;
};

struct ScenarioRunOptions {
    // Adds 1 to the expected value of this comparison.
    std::optional<std::size_t> perturb;
    std::size_t property_samples = 1000;
    std::size_t leibniz_samples = 200;
};

// Engine errors become status Error with the message in mismatches.
RunReport run_scenario(const Scenario& s, const ScenarioRunOptions& options = {});

struct JsonOptions {
    bool timings = false;
    bool seed_audit = false;
};

// Stable key order; timings are emitted only on request so that repeated
// runs are byte-identical.
std::string report_json(const RunReport& r, const JsonOptions& options = {});

}  // namespace thhcalc
