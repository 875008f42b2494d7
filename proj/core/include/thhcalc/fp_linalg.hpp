#pragma once

// Exact linear algebra over the prime fields F_2, F_3, F_5, F_7.
//
// Vectors are row vectors; subspaces are stored as the row space of a
// matrix. All pivoting is leftmost column, first nonzero row, so every
// result is a deterministic function of its input.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace thhcalc {

using Fp = std::uint8_t;

class PrimeField {
public:
    explicit PrimeField(int p);

    int p() const { return p_; }
    Fp reduce(long long v) const
    {
        long long r = v % p_;
        return static_cast<Fp>(r < 0 ? r + p_ : r);
    }
    Fp add(Fp a, Fp b) const { return static_cast<Fp>((a + b) % p_); }
    Fp sub(Fp a, Fp b) const { return static_cast<Fp>((a + p_ - b) % p_); }
    Fp neg(Fp a) const { return static_cast<Fp>((p_ - a) % p_); }
    Fp mul(Fp a, Fp b) const { return static_cast<Fp>((a * b) % p_); }
    Fp inv(Fp a) const;
    Fp pow(Fp a, unsigned e) const;

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }

private:
    int p_;
    std::vector<Fp> inverse_;
};

using FpVector = std::vector<Fp>;

class FpMatrix {
public:
    FpMatrix() = default;
    FpMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
    static FpMatrix identity(std::size_t n);
    static FpMatrix from_rows(std::size_t cols, const std::vector<FpVector>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Fp& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    Fp at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<Fp> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const Fp> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    FpVector row_vector(std::size_t r) const { return {data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_}; }

    void append_row(std::span<const Fp> v);
    std::vector<FpVector> row_list() const;

    FpMatrix transpose() const;
    // this * other
    FpMatrix multiply(const FpMatrix& other, const PrimeField& F) const;
    bool is_zero() const;

    bool operator==(const FpMatrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Fp> data_;
};

// v * M for a row vector v of length M.rows().
FpVector apply_row(const FpVector& v, const FpMatrix& m, const PrimeField& F);

struct RrefResult {
    std::size_t rank = 0;
    std::vector<std::size_t> pivots;
    FpMatrix reduced;   // rank rows, fully reduced, pivots normalised to 1
};

// Rows above this count switch to the sparse elimination path. Both paths
// produce identical output.
inline std::size_t sparse_threshold = 400;

RrefResult rref(const FpMatrix& m, const PrimeField& F);
RrefResult rref_dense(const FpMatrix& m, const PrimeField& F);
RrefResult rref_sparse(const FpMatrix& m, const PrimeField& F);

std::size_t rank(const FpMatrix& m, const PrimeField& F);

// Basis of {v : m v = 0} (column-vector convention), as rows.
std::vector<FpVector> kernel_basis(const FpMatrix& m, const PrimeField& F);

// Basis of {c : c m = 0} (left kernel), as rows.
std::vector<FpVector> left_kernel_basis(const FpMatrix& m, const PrimeField& F);

// Incrementally built semi-echelon basis: each stored row has a distinct
// pivot column and is zero at the pivots of earlier rows.
class EchelonBasis {
public:
    EchelonBasis(std::size_t ambient, const PrimeField& F) : F_(F), ambient_(ambient) {}
    std::size_t size() const { return rows_.size(); }
    // Reduces v in place against the stored rows; returns true if v becomes zero.
    bool reduce(FpVector& v) const;
    // Adds v if independent of the stored rows.
    bool insert(FpVector v);

private:
    PrimeField F_;
    std::size_t ambient_;
    std::vector<FpVector> rows_;
    std::vector<std::size_t> pivots_;
};

// Solves coordinates with respect to a fixed list of independent rows.
class RowSpaceSolver {
public:
    RowSpaceSolver() = default;
    RowSpaceSolver(const FpMatrix& basis, const PrimeField& F);

    std::size_t dim() const { return dim_; }
    std::size_t ambient() const { return ambient_; }
    bool contains(std::span<const Fp> v) const;
    // Coordinates c with v = sum c_i basis_i; throws if v is outside the span.
    FpVector coordinates(std::span<const Fp> v) const;

private:
    PrimeField F_{2};
    std::size_t dim_ = 0;
    std::size_t ambient_ = 0;
    std::vector<std::size_t> pivots_;
    FpMatrix reduced_;
    FpMatrix transform_;   // transform_ * basis = reduced_
};

struct SubquotientResult {
    std::size_t dim = 0;
    // Coset representatives completing the boundaries to a basis of cycles.
    std::vector<FpVector> representatives;
};

// dim span(cycles) - dim span(boundaries). Throws ContainmentError naming
// the first boundary outside span(cycles).
SubquotientResult subquotient_dim(const std::vector<FpVector>& cycles, const std::vector<FpVector>& boundaries,
                                  std::size_t ambient, const PrimeField& F);

// Subquotient Z/B of an ambient space, with coordinates on the quotient.
class Subquotient {
public:
    Subquotient() = default;
    // Whole ambient space, zero boundaries.
    static Subquotient full(std::size_t ambient, const PrimeField& F);
    Subquotient(FpMatrix cycles, FpMatrix boundaries, const PrimeField& F);

    std::size_t ambient() const { return ambient_; }
    std::size_t dim() const { return reps_.rows(); }
    const FpMatrix& cycles() const { return cycles_; }
    const FpMatrix& boundaries() const { return boundaries_; }
    const FpMatrix& representatives() const { return reps_; }

    bool is_cycle(std::span<const Fp> v) const { return cycle_solver_.contains(v); }
    bool is_boundary(std::span<const Fp> v) const { return boundary_solver_.contains(v); }
    // Coordinates of the class of a cycle in the representative basis.
    FpVector class_of(std::span<const Fp> v) const;

private:
    PrimeField F_{2};
    std::size_t ambient_ = 0;
    FpMatrix cycles_;
    FpMatrix boundaries_;
    FpMatrix reps_;
    RowSpaceSolver cycle_solver_;
    RowSpaceSolver boundary_solver_;
    RowSpaceSolver combined_solver_;   // rows: boundaries then reps
};

}  // namespace thhcalc
