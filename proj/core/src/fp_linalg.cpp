#include "thhcalc/fp_linalg.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

#include <fmt/format.h>

#include "thhcalc/error.hpp"

namespace thhcalc {

PrimeField::PrimeField(int p) : p_(p)
{
    if (p != 2 && p != 3 && p != 5 && p != 7)
        throw Error(fmt::format("unsupported prime {} (supported: 2, 3, 5, 7)", p));
    inverse_.assign(p, 0);
    for (int a = 1; a < p; ++a)
        for (int b = 1; b < p; ++b)
            if ((a * b) % p == 1)
                inverse_[a] = static_cast<Fp>(b);
}

Fp PrimeField::inv(Fp a) const
{
    if (a == 0)
        throw Error("division by zero in F_p");
    return inverse_[a];
}

Fp PrimeField::pow(Fp a, unsigned e) const
{
    Fp r = 1;
    while (e--)
        r = mul(r, a);
    return r;
}

FpMatrix FpMatrix::identity(std::size_t n)
{
    FpMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.at(i, i) = 1;
    return m;
}

FpMatrix FpMatrix::from_rows(std::size_t cols, const std::vector<FpVector>& rows)
{
    FpMatrix m(0, cols);
    for (const auto& r : rows)
        m.append_row(r);
    return m;
}

void FpMatrix::append_row(std::span<const Fp> v)
{
    if (v.size() != cols_)
        throw Error(fmt::format("row length {} does not match {} columns", v.size(), cols_));
    data_.insert(data_.end(), v.begin(), v.end());
    ++rows_;
}

std::vector<FpVector> FpMatrix::row_list() const
{
    std::vector<FpVector> out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out.push_back(row_vector(r));
    return out;
}

FpMatrix FpMatrix::transpose() const
{
    FpMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t.at(c, r) = at(r, c);
    return t;
}

FpMatrix FpMatrix::multiply(const FpMatrix& other, const PrimeField& F) const
{
    if (cols_ != other.rows_)
        throw Error("matrix dimension mismatch in multiply");
    FpMatrix out(rows_, other.cols_);
    const int p = F.p();
    for (std::size_t i = 0; i < rows_; ++i) {
        std::vector<int> acc(other.cols_, 0);
        for (std::size_t k = 0; k < cols_; ++k) {
            Fp a = at(i, k);
            if (!a)
                continue;
            auto orow = other.row(k);
            for (std::size_t j = 0; j < other.cols_; ++j)
                acc[j] += a * orow[j];
        }
        for (std::size_t j = 0; j < other.cols_; ++j)
            out.at(i, j) = static_cast<Fp>(acc[j] % p);
    }
    return out;
}

bool FpMatrix::is_zero() const
{
    return std::all_of(data_.begin(), data_.end(), [](Fp x) { return x == 0; });
}

FpVector apply_row(const FpVector& v, const FpMatrix& m, const PrimeField& F)
{
    if (v.size() != m.rows())
        throw Error("vector length does not match matrix rows");
    std::vector<int> acc(m.cols(), 0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k])
            continue;
        auto row = m.row(k);
        for (std::size_t j = 0; j < m.cols(); ++j)
            acc[j] += v[k] * row[j];
    }
    FpVector out(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j)
        out[j] = static_cast<Fp>(acc[j] % F.p());
    return out;
}

namespace {

// Gaussian elimination with optional tracking of row operations. The
// transform has one row per input row; its first `rank` rows express the
// reduced rows in terms of the input.
RrefResult eliminate_dense(const FpMatrix& m, const PrimeField& F, FpMatrix* transform)
{
    FpMatrix a = m;
    FpMatrix t;
    if (transform)
        t = FpMatrix::identity(m.rows());
    RrefResult res;
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        std::size_t piv = row;
        while (piv < a.rows() && a.at(piv, col) == 0)
            ++piv;
        if (piv == a.rows())
            continue;
        if (piv != row) {
            for (std::size_t c = 0; c < a.cols(); ++c)
                std::swap(a.at(piv, c), a.at(row, c));
            if (transform)
                for (std::size_t c = 0; c < t.cols(); ++c)
                    std::swap(t.at(piv, c), t.at(row, c));
        }
        Fp s = F.inv(a.at(row, col));
        for (std::size_t c = 0; c < a.cols(); ++c)
            a.at(row, c) = F.mul(a.at(row, c), s);
        if (transform)
            for (std::size_t c = 0; c < t.cols(); ++c)
                t.at(row, c) = F.mul(t.at(row, c), s);
        for (std::size_t r = 0; r < a.rows(); ++r) {
            if (r == row || a.at(r, col) == 0)
                continue;
            Fp f = F.neg(a.at(r, col));
            for (std::size_t c = col; c < a.cols(); ++c)
                if (a.at(row, c))
                    a.at(r, c) = F.add(a.at(r, c), F.mul(f, a.at(row, c)));
            if (transform)
                for (std::size_t c = 0; c < t.cols(); ++c)
                    if (t.at(row, c))
                        t.at(r, c) = F.add(t.at(r, c), F.mul(f, t.at(row, c)));
        }
        res.pivots.push_back(col);
        ++row;
    }
    res.rank = row;
    res.reduced = FpMatrix(row, a.cols());
    for (std::size_t r = 0; r < row; ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            res.reduced.at(r, c) = a.at(r, c);
    if (transform)
        *transform = std::move(t);
    return res;
}

}  // namespace

RrefResult rref_dense(const FpMatrix& m, const PrimeField& F)
{
    return eliminate_dense(m, F, nullptr);
}

RrefResult rref_sparse(const FpMatrix& m, const PrimeField& F)
{
    using SparseRow = std::vector<std::pair<std::size_t, Fp>>;   // sorted by column
    std::vector<SparseRow> rows(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.at(r, c))
                rows[r].emplace_back(c, m.at(r, c));
    SparseRow scratch;
    auto axpy = [&](SparseRow& target, const SparseRow& src, Fp f) {
        scratch.clear();
        auto a = target.cbegin();
        auto b = src.cbegin();
        while (a != target.cend() || b != src.cend()) {
            if (b == src.cend() || (a != target.cend() && a->first < b->first)) {
                scratch.push_back(*a++);
            } else if (a == target.cend() || b->first < a->first) {
                scratch.emplace_back(b->first, F.mul(f, b->second));
                ++b;
            } else {
                const Fp v = F.add(a->second, F.mul(f, b->second));
                if (v)
                    scratch.emplace_back(a->first, v);
                ++a;
                ++b;
            }
        }
        target.swap(scratch);
    };
    auto lead = [](const SparseRow& r) { return r.empty() ? SIZE_MAX : r.front().first; };

    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < rows.size(); ++col) {
        // rows above `row` are reduced, so col can only lead rows below
        std::size_t piv = SIZE_MAX;
        for (std::size_t r = row; r < rows.size(); ++r)
            if (lead(rows[r]) == col && (piv == SIZE_MAX || rows[r].size() < rows[piv].size()))
                piv = r;
        if (piv == SIZE_MAX)
            continue;
        std::swap(rows[piv], rows[row]);
        const Fp s = F.inv(rows[row].front().second);
        for (auto& [c, v] : rows[row])
            v = F.mul(v, s);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == row)
                continue;
            auto it = std::lower_bound(rows[r].begin(), rows[r].end(), std::make_pair(col, Fp{0}),
                                       [](const auto& x, const auto& y) { return x.first < y.first; });
            if (it == rows[r].end() || it->first != col)
                continue;
            axpy(rows[r], rows[row], F.neg(it->second));
        }
        pivots.push_back(col);
        ++row;
    }
    RrefResult res;
    res.rank = row;
    res.pivots = std::move(pivots);
    res.reduced = FpMatrix(row, m.cols());
    for (std::size_t r = 0; r < row; ++r)
        for (auto [c, v] : rows[r])
            res.reduced.at(r, c) = v;
    return res;
}

RrefResult rref(const FpMatrix& m, const PrimeField& F)
{
    if (m.rows() <= sparse_threshold)
        return rref_dense(m, F);
    std::size_t nonzero = 0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            nonzero += m.at(r, c) != 0;
    if (nonzero * 20 > m.rows() * m.cols())
        return rref_dense(m, F);
    return rref_sparse(m, F);
}

std::size_t rank(const FpMatrix& m, const PrimeField& F)
{
    return rref(m, F).rank;
}

std::vector<FpVector> kernel_basis(const FpMatrix& m, const PrimeField& F)
{
    auto res = rref(m, F);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : res.pivots)
        is_pivot[c] = true;
    std::vector<FpVector> out;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free])
            continue;
        FpVector v(m.cols(), 0);
        v[free] = 1;
        for (std::size_t r = 0; r < res.rank; ++r)
            v[res.pivots[r]] = F.neg(res.reduced.at(r, free));
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<FpVector> left_kernel_basis(const FpMatrix& m, const PrimeField& F)
{
    return kernel_basis(m.transpose(), F);
}

RowSpaceSolver::RowSpaceSolver(const FpMatrix& basis, const PrimeField& F) : F_(F), ambient_(basis.cols())
{
    FpMatrix t;
    auto res = eliminate_dense(basis, F, &t);
    if (res.rank != basis.rows())
        throw Error("RowSpaceSolver requires linearly independent rows");
    dim_ = res.rank;
    pivots_ = std::move(res.pivots);
    reduced_ = std::move(res.reduced);
    transform_ = std::move(t);
}

bool RowSpaceSolver::contains(std::span<const Fp> v) const
{
    if (v.size() != ambient_)
        throw Error("vector length does not match ambient dimension");
    FpVector w(v.begin(), v.end());
    for (std::size_t r = 0; r < dim_; ++r) {
        Fp c = w[pivots_[r]];
        if (!c)
            continue;
        auto row = reduced_.row(r);
        for (std::size_t j = 0; j < ambient_; ++j)
            if (row[j])
                w[j] = F_.sub(w[j], F_.mul(c, row[j]));
    }
    return std::all_of(w.begin(), w.end(), [](Fp x) { return x == 0; });
}

FpVector RowSpaceSolver::coordinates(std::span<const Fp> v) const
{
    if (!contains(v))
        throw Error("vector outside the row space");
    FpVector d(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        d[r] = v[pivots_[r]];
    // reduced = T * basis, so c = d * T restricted to the first dim_ rows.
    FpVector c(dim_, 0);
    for (std::size_t r = 0; r < dim_; ++r) {
        if (!d[r])
            continue;
        for (std::size_t j = 0; j < dim_; ++j)
            c[j] = F_.add(c[j], F_.mul(d[r], transform_.at(r, j)));
    }
    return c;
}

bool EchelonBasis::reduce(FpVector& v) const
{
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        Fp c = v[pivots_[r]];
        if (!c)
            continue;
        Fp f = F_.neg(c);
        const auto& row = rows_[r];
        for (std::size_t j = 0; j < ambient_; ++j)
            if (row[j])
                v[j] = F_.add(v[j], F_.mul(f, row[j]));
    }
    return std::all_of(v.begin(), v.end(), [](Fp x) { return x == 0; });
}

bool EchelonBasis::insert(FpVector v)
{
    if (v.size() != ambient_)
        throw Error("vector length does not match ambient dimension");
    if (reduce(v))
        return false;
    std::size_t piv = 0;
    while (v[piv] == 0)
        ++piv;
    Fp s = F_.inv(v[piv]);
    for (auto& x : v)
        x = F_.mul(x, s);
    // Keep earlier rows zero at the new pivot.
    for (auto& row : rows_) {
        Fp c = row[piv];
        if (!c)
            continue;
        Fp f = F_.neg(c);
        for (std::size_t j = 0; j < ambient_; ++j)
            if (v[j])
                row[j] = F_.add(row[j], F_.mul(f, v[j]));
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(piv);
    return true;
}

SubquotientResult subquotient_dim(const std::vector<FpVector>& cycles, const std::vector<FpVector>& boundaries,
                                  std::size_t ambient, const PrimeField& F)
{
    EchelonBasis z(ambient, F);
    for (const auto& c : cycles)
        z.insert(c);
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        FpVector b = boundaries[i];
        if (!z.reduce(b))
            throw ContainmentError(i, fmt::format("boundary vector {} lies outside the cycle span", i));
    }
    EchelonBasis acc(ambient, F);
    for (const auto& b : boundaries)
        acc.insert(b);
    std::size_t bdim = acc.size();
    SubquotientResult res;
    for (const auto& c : cycles)
        if (acc.insert(c))
            res.representatives.push_back(c);
    res.dim = z.size() - bdim;
    return res;
}

Subquotient Subquotient::full(std::size_t ambient, const PrimeField& F)
{
    return Subquotient(FpMatrix::identity(ambient), FpMatrix(0, ambient), F);
}

Subquotient::Subquotient(FpMatrix cycles, FpMatrix boundaries, const PrimeField& F) : F_(F), ambient_(cycles.cols())
{
    auto zc = rref(cycles, F);
    auto bc = rref(boundaries, F);
    cycles_ = zc.reduced;
    boundaries_ = bc.reduced;
    cycle_solver_ = RowSpaceSolver(cycles_, F);
    boundary_solver_ = RowSpaceSolver(boundaries_, F);
    for (std::size_t r = 0; r < boundaries_.rows(); ++r)
        if (!cycle_solver_.contains(boundaries_.row(r)))
            throw ContainmentError(r, fmt::format("boundary row {} lies outside the cycle span", r));
    // Representatives: reduced cycle rows independent of B and earlier reps.
    EchelonBasis acc(ambient_, F);
    for (std::size_t r = 0; r < boundaries_.rows(); ++r)
        acc.insert(boundaries_.row_vector(r));
    FpMatrix combined = boundaries_;
    reps_ = FpMatrix(0, ambient_);
    for (std::size_t r = 0; r < cycles_.rows() && acc.size() < cycles_.rows(); ++r) {
        if (acc.insert(cycles_.row_vector(r))) {
            combined.append_row(cycles_.row(r));
            reps_.append_row(cycles_.row(r));
        }
    }
    combined_solver_ = RowSpaceSolver(combined, F);
}

FpVector Subquotient::class_of(std::span<const Fp> v) const
{
    auto c = combined_solver_.coordinates(v);
    return FpVector(c.begin() + static_cast<std::ptrdiff_t>(boundaries_.rows()), c.end());
}

}  // namespace thhcalc
