#pragma once

// Multiplicative spectral sequences driven by seed differentials.
//
// Each page is stored as a subquotient Z/B of a base algebra, one block per
// bidegree. Seeds at a weight jump r define a derivation D on the base; the
// next page is {z : Dz in B} / (B + D Z). A stage may instead replace the
// base by a presentation of the current page, after checking that the given
// generator images induce an isomorphism in every bidegree.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thhcalc/dga.hpp"
#include "thhcalc/fp_linalg.hpp"
#include "thhcalc/presentation.hpp"

namespace thhcalc {

struct SeedDifferential {
    int jump = 1;
    Element source;   // scalar multiple of a base generator
    Element target;
    std::string label;      // as written in the scenario
    std::string citation;
};

// Replace the base by `model`; images are representatives in the current base.
struct PageModel {
    std::shared_ptr<const Presentation> model;
    std::vector<Element> images;
};

struct Stage {
    int jump = 1;
    std::optional<PageModel> rebase;   // applied before the seeds
    std::vector<SeedDifferential> seeds;
};

// Element that must be a d_r-cycle on every page computed over `base`.
struct PermanentCheck {
    std::string label;
    std::shared_ptr<const Presentation> base;
    Element element;
};

struct PageRecord {
    int r = 1;
    std::map<Bidegree, std::size_t> dims;
    // Source bidegree -> matrix of d_r in class coordinates.
    std::map<Bidegree, FpMatrix> differential;
};

struct SeedAudit {
    std::string label;
    int jump = 1;
    Bidegree source;
    bool cycle = false;
    bool boundary = false;
    std::string citation;
};

struct SseqRun {
    Window window;     // reported
    Window internal;   // enumerated
    Window trusted;    // where results are exact
    std::shared_ptr<const Presentation> base;
    std::map<Bidegree, Subquotient> blocks;   // final page
    std::vector<PageRecord> pages;
    std::vector<SeedAudit> seed_audit;
    int last_jump = 0;
    int stabilization_page = 1;
    bool collapses_by_degree = true;
    bool truncated = false;

    // Property gates.
    std::size_t d_squared_checked = 0;
    std::vector<std::string> d_squared_violations;
    std::vector<std::string> euler_violations;
    std::size_t leibniz_checked = 0;
    std::vector<std::string> leibniz_violations;
    std::vector<std::string> permanent_violations;

    std::size_t dim(const Bidegree& b) const;
    // Dimensions over the reported window.
    std::map<Bidegree, std::size_t> final_dims() const;
    std::map<int, std::size_t> degree_dims() const;
    bool is_permanent_cycle(const Element& e) const;
    bool is_boundary(const Element& e) const;
};

struct RunOptions {
    // Extra degrees enumerated around the reported window; negative means automatic.
    int n_margin = -1;
    int w_margin = -1;
    std::size_t leibniz_samples = 200;
};

// Runs the stages in order. Throws DifferentialError on a dead seed, a
// derivation that does not descend to the page, or a failed rebase.
SseqRun run_spectral_sequence(std::shared_ptr<const Presentation> e1, const std::vector<Stage>& stages,
                              const std::vector<PermanentCheck>& permanent, const Window& window,
                              const RunOptions& options = {});

// The internal window used for a given reported window and stage list.
Window internal_window(const Window& window, const std::vector<Stage>& stages, const RunOptions& options = {});

struct DetectionReport {
    bool pass = true;
    bool dims_ok = true;
    bool images_ok = true;
    bool span_ok = true;
    bool rules_ok = true;
    std::vector<std::string> mismatches;
    std::optional<Bidegree> first_mismatch;
};

// Compares the final page with an expected presentation. When images are
// given (one per expected generator, in final base terms) they must be
// nonzero permanent cycles whose monomials span every bidegree, and the
// expected relations must hold modulo boundaries.
DetectionReport detect(const SseqRun& run, const Presentation& expected, const std::vector<Element>* images,
                       bool compare_dims = true);

// Per degree n and page transition: dim E_r(n) - dim E_{r+1}(n) equals the
// rank of d_r leaving n plus the rank entering n.
std::vector<std::string> euler_audit(const SseqRun& run);

}  // namespace thhcalc
