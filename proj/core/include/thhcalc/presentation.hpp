#pragma once

// Finitely presented bigraded-commutative F_p-algebras.
//
// An algebra is a list of generators, each with a bidegree (n, w) and a kind,
// plus at most one triangular rewrite rule g^k -> rhs per generator. Normal
// form monomials are exponent vectors below every generator's cap. Signs
// follow the Koszul rule on the topological degree n only.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "thhcalc/fp_linalg.hpp"

namespace thhcalc {

struct Bidegree {
    int n = 0;   // topological degree
    int w = 0;   // filtration weight

    auto operator<=>(const Bidegree&) const = default;
    Bidegree operator+(const Bidegree& o) const { return {n + o.n, w + o.w}; }
    Bidegree operator-(const Bidegree& o) const { return {n - o.n, w - o.w}; }
    Bidegree scaled(int k) const { return {k * n, k * w}; }
};

std::string to_string(const Bidegree& b);

struct Window {
    int n_min = 0;
    int n_max = 0;
    int w_max = 0;

    bool contains(const Bidegree& b) const { return b.n >= n_min && b.n <= n_max && b.w >= 0 && b.w <= w_max; }
    Window widened(int margin) const { return {n_min - margin, n_max + margin, w_max}; }
    bool operator==(const Window&) const = default;
};

enum class GeneratorKind { Polynomial, Exterior, DividedPower, Bounded };

struct GeneratorSpec {
    std::string name;
    Bidegree degree;
    GeneratorKind kind = GeneratorKind::Polynomial;
    int height = 0;   // Bounded(h): g^h = 0

    // Set on the generators produced by expanding a divided power generator:
    // this generator is gamma_{p^level}(divided_parent).
    std::string divided_parent;
    int divided_level = 0;
};

using Monomial = std::vector<std::uint16_t>;

// Sparse linear combination of normal-form monomials.
struct Element {
    std::map<Monomial, Fp> terms;

    bool is_zero() const { return terms.empty(); }
    bool operator==(const Element&) const = default;
};

struct RewriteRule {
    std::size_t generator = 0;
    int power = 0;
    Element rhs;
};

// gamma_{p^i}(g) for every i with p^i * n(g) <= n_max. The first generator
// keeps g's name; later ones are named g_p<p^i>. Each is Bounded(p).
std::vector<GeneratorSpec> expand_divided_powers(const GeneratorSpec& g, int p, int n_max);

// Expands every DividedPower generator in a list (order preserved).
std::vector<GeneratorSpec> expand_generators(const std::vector<GeneratorSpec>& specs, int p, int n_max);

// Generators y_0..y_{level-1} at (0,0) with y_i^p -> y_i: functions on Z/p^level.
std::vector<GeneratorSpec> separable_generators(const std::string& prefix, int level);

class Presentation {
public:
    // Generators must already be expanded (no DividedPower kind). Rules are
    // validated for homogeneity and triangularity; the window must satisfy
    // local finiteness.
    Presentation(PrimeField field, std::vector<GeneratorSpec> generators, std::vector<RewriteRule> rules, Window window);

    // Empty generator list: the ground field.
    static Presentation trivial(PrimeField field, Window window);

    const PrimeField& field() const { return field_; }
    int p() const { return field_.p(); }
    const Window& window() const { return window_; }
    const std::vector<GeneratorSpec>& generators() const { return gens_; }
    const std::vector<RewriteRule>& rules() const { return rules_; }
    std::size_t num_generators() const { return gens_.size(); }
    std::optional<std::size_t> find_generator(const std::string& name) const;
    std::size_t generator_index(const std::string& name) const;
    // Exponent at which generator i is rewritten, if any.
    std::optional<int> cap(std::size_t i) const;
    const RewriteRule* rule_for(std::size_t i) const;
    bool weight_truncated() const { return weight_truncated_; }

    Bidegree degree(const Monomial& m) const;
    int parity(const Monomial& m) const;   // n(m) mod 2
    Monomial unit_monomial() const { return Monomial(gens_.size(), 0); }
    Monomial generator_monomial(std::size_t i) const;
    std::string format_monomial(const Monomial& m) const;
    std::string format(const Element& e) const;

    // Monomial order: bidegree, then exponents compared from the last
    // generator backwards (smaller first).
    bool monomial_less(const Monomial& a, const Monomial& b) const;

    // Basis enumeration over the presentation's window.
    const std::vector<Monomial>& basis(const Bidegree& b) const;
    std::size_t dim(const Bidegree& b) const { return basis(b).size(); }
    std::optional<std::size_t> basis_index(const Monomial& m) const;
    // Bidegrees of the window with nonzero dimension, sorted.
    std::vector<Bidegree> support() const;

    // Element arithmetic.
    Element unit() const;
    Element scalar(long long c) const;
    Element generator(std::size_t i) const;
    Element monomial_element(const Monomial& m, Fp c = 1) const;
    Element add(const Element& a, const Element& b) const;
    Element sub(const Element& a, const Element& b) const;
    Element scale(const Element& a, Fp c) const;
    Element multiply(const Element& a, const Element& b) const;
    Element multiply_monomials(const Monomial& a, const Monomial& b) const;
    Element power(const Element& a, int e) const;
    // Normal form of an arbitrary exponent vector (as an ordered product).
    Element normalize(const Monomial& m, Fp c = 1) const;
    // gamma_k of a divided power generator, with the correct unit scalar.
    Element divided_power(const std::string& parent, int k) const;

    // Bidegree if all terms share one; nullopt for zero or inhomogeneous.
    std::optional<Bidegree> homogeneous_degree(const Element& e) const;
    bool is_homogeneous(const Element& e) const;

    // Coordinates in basis(b); throws if e has a term outside that bidegree.
    FpVector to_vector(const Element& e, const Bidegree& b) const;
    Element from_vector(const FpVector& v, const Bidegree& b) const;

private:
    void validate();
    void enumerate();

    PrimeField field_;
    std::vector<GeneratorSpec> gens_;
    std::vector<RewriteRule> rules_;
    std::vector<int> rule_of_;   // -1 if none
    std::vector<int> caps_;      // 0 if unbounded
    Window window_;
    std::map<Bidegree, std::vector<Monomial>> basis_;
    std::map<Monomial, std::size_t> index_;
    bool weight_truncated_ = false;
};

// Tensor product; clashing generator names in b get a suffix. The window is
// the intersection of the two windows.
Presentation tensor(const Presentation& a, const Presentation& b);

// Algebra map A -> B given on generators.
struct Homomorphism {
    std::vector<Element> images;   // one per generator of the source, in the target
    std::map<Bidegree, FpMatrix> matrices;   // rows: source basis, cols: target basis

    std::size_t rank_at(const Bidegree& b, const PrimeField& F) const;
};

// Image of a source monomial under generator images.
Element evaluate_monomial(const Presentation& source, const Presentation& target, const std::vector<Element>& images,
                          const Monomial& m);

// Verifies degrees and every relation (rules and nilpotency caps) of the
// source, then builds the per-bidegree matrices over the source window.
Homomorphism apply_hom(const Presentation& source, const Presentation& target, const std::vector<Element>& images);

}  // namespace thhcalc
