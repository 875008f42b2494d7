#pragma once

// Derivations on presented algebras and their homology.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "thhcalc/fp_linalg.hpp"
#include "thhcalc/presentation.hpp"

namespace thhcalc {

// Weight jump r plus a value per generator; an empty Element means d(g) = 0.
struct Differential {
    int jump = 1;
    std::vector<Element> values;

    static Differential zero(const Presentation& A, int jump);
};

// d(g) must have bidegree (n(g) - 1, w(g) + r).
void check_differential_degrees(const Presentation& A, const Differential& d);

// The unique derivation extending d, evaluated by peeling the last generator
// off each monomial. Results are cached per monomial.
class LeibnizExtension {
public:
    // Throws DifferentialError when d is inhomogeneous or does not preserve
    // the relations of A.
    LeibnizExtension(const Presentation& A, Differential d);

    const Presentation& algebra() const { return *A_; }
    const Differential& differential() const { return d_; }
    int jump() const { return d_.jump; }
    Bidegree target(const Bidegree& b) const { return {b.n - 1, b.w + d_.jump}; }
    Bidegree source(const Bidegree& b) const { return {b.n + 1, b.w - d_.jump}; }

    const Element& apply(const Monomial& m) const;
    Element apply(const Element& e) const;
    // d applied to a coordinate vector of bidegree b. Terms beyond the
    // window's weight bound are dropped and counted in truncated().
    FpVector apply_vector(const FpVector& v, const Bidegree& b) const;
    // Matrix of d from b to target(b); rows indexed by basis(b).
    FpMatrix matrix(const Bidegree& b) const;
    bool truncated() const { return *truncated_; }

private:
    void check_relations() const;

    const Presentation* A_;
    Differential d_;
    std::shared_ptr<std::map<Monomial, Element>> cache_;
    std::shared_ptr<bool> truncated_;
};

struct BoundaryMatrices {
    int jump = 1;
    std::map<Bidegree, FpMatrix> matrices;   // source bidegree -> matrix
    bool truncated = false;
};

BoundaryMatrices extend_leibniz(const Presentation& A, const Differential& d);

struct DSquaredReport {
    bool ok = true;
    std::size_t checked = 0;
    std::vector<std::string> violations;
};

DSquaredReport check_d_squared(const Presentation& A, const Differential& d);

struct DgaHomology {
    const Presentation* algebra = nullptr;
    std::map<Bidegree, Subquotient> blocks;
    // Bidegrees where the window cut off incoming boundaries or outgoing images.
    std::vector<Bidegree> incomplete;

    std::size_t dim(const Bidegree& b) const;
    std::map<Bidegree, std::size_t> dims() const;
    // dims() without the incomplete bidegrees.
    std::map<Bidegree, std::size_t> exact_dims() const;
    std::size_t total_dim() const;
    // Representative cycle of basis class i at b.
    Element representative(const Bidegree& b, std::size_t i) const;
    // Class of a cycle, in the representative basis of its bidegree.
    FpVector class_of(const Element& z, const Bidegree& b) const;
    // Product of two classes; nullopt if the product leaves the window.
    std::optional<FpVector> product(const Bidegree& a, const FpVector& x, const Bidegree& b, const FpVector& y) const;
};

// Throws DifferentialError if d^2 != 0 anywhere in the window.
DgaHomology homology(const Presentation& A, const Differential& d);

}  // namespace thhcalc
