#pragma once

// Hochschild homology of connected presented algebras through the
// normalized cyclic bar complex, with the shuffle product.
//
// A chain a0[a1|...|ak] has internal bidegree sum(a_i), bar length k and
// total degree n = internal n + k. The differential keeps the internal
// bidegree and lowers k by one, so homology is computed per block
// (internal n, w, k).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thhcalc/fp_linalg.hpp"
#include "thhcalc/presentation.hpp"

namespace thhcalc {

// Positive for the bar complex: n > 0, or n = 0 and w > 0.
bool is_connected(const Presentation& A);

struct BarKey {
    int m = 0;   // internal topological degree
    int w = 0;
    int k = 0;   // bar length

    auto operator<=>(const BarKey&) const = default;
    Bidegree total() const { return {m + k, w}; }
};

using BarTensor = std::vector<Monomial>;   // a0, a1, ..., ak

// Sparse chain: tensor -> coefficient.
using BarChain = std::map<BarTensor, Fp>;

class BarComplex {
public:
    // The window bounds total degree; A's window must cover the internal degrees.
    BarComplex(const Presentation& A, int cap, const Window& window);

    const Presentation& algebra() const { return *A_; }
    int cap() const { return cap_; }
    const Window& window() const { return window_; }
    // No chain of bar length cap + 1 reaches total degree n_max + 1.
    bool cap_sufficient() const { return cap_sufficient_; }

    const std::vector<BarTensor>& basis(const BarKey& key) const;
    std::optional<std::size_t> index(const BarKey& key, const BarTensor& t) const;
    std::vector<BarKey> keys() const;

    BarChain boundary(const BarTensor& t) const;
    // Matrix from key to (m, w, k - 1); rows indexed by basis(key).
    FpMatrix boundary_matrix(const BarKey& key) const;

    BarKey key_of(const BarTensor& t) const;
    FpVector to_vector(const BarChain& c, const BarKey& key) const;
    BarChain from_vector(const FpVector& v, const BarKey& key) const;

    BarChain shuffle(const BarTensor& x, const BarTensor& y) const;
    BarChain shuffle(const BarChain& x, const BarChain& y) const;

    std::string format(const BarTensor& t) const;

private:
    void enumerate();

    const Presentation* A_;
    int cap_;
    Window window_;
    bool cap_sufficient_ = true;
    std::map<BarKey, std::vector<BarTensor>> basis_;
    std::map<BarKey, std::map<BarTensor, std::size_t>> index_;
};

struct HHClass {
    BarKey key;
    FpVector coords;   // in the representative basis of key
};

class HHResult {
public:
    explicit HHResult(const BarComplex& complex);

    const BarComplex& complex() const { return *C_; }
    std::size_t dim(const BarKey& key) const;
    // Dimensions by total bidegree, over the window.
    std::map<Bidegree, std::size_t> dims() const;
    std::map<int, std::size_t> degree_dims() const;

    std::size_t block_dim(const BarKey& key) const;
    // Basis class i of a block.
    HHClass basis_class(const BarKey& key, std::size_t i) const;
    BarChain representative(const HHClass& c) const;
    // Homology class of a cycle; throws if it is not a cycle.
    HHClass class_of(const BarChain& z, const BarKey& key) const;
    bool is_cycle(const BarChain& z, const BarKey& key) const;
    bool is_zero(const HHClass& c) const;

    // Class of 1[g] for a generator g.
    HHClass suspension(std::size_t generator) const;
    // Class of a0 in bar length 0.
    HHClass unit_class(const Element& a0) const;

    // Throws Error if the product exceeds the cap.
    HHClass product(const HHClass& x, const HHClass& y) const;
    HHClass add(const HHClass& x, const HHClass& y) const;
    HHClass scale(const HHClass& x, Fp c) const;

private:
    const BarComplex* C_;
    std::map<BarKey, Subquotient> blocks_;
};

// Dimensions of the closed form for a tensor of recognized blocks: even
// polynomial x gives Λ[dx], odd exterior a gives Γ[da], separable (0,0)
// blocks give themselves and an exterior generator of degree -1 gives the
// separable model at the given level.
Presentation hkr_expected(const Presentation& A, int level);

struct KunnethReport {
    bool ok = true;
    std::vector<std::string> mismatches;
};

// Compares dim HH(a ⊗ b) with the convolution of dim HH(a) and dim HH(b),
// using the bar complex where connected and the closed form otherwise.
KunnethReport kunneth_check(const Presentation& a, const Presentation& b, const Window& window, int cap, int level);

// HH dimensions by total bidegree, by bar complex if connected, else closed form.
std::map<Bidegree, std::size_t> hh_dims(const Presentation& A, const Window& window, int cap, int level);

}  // namespace thhcalc
