#pragma once

// Dense exact matrices, field linear algebra (rank, RREF, kernel, solve) and
// symbolic determinants / Pfaffians by memoized minor expansion.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qbundle/error.hpp"
#include "qbundle/exactalg/field.hpp"
#include "qbundle/exactalg/poly.hpp"

namespace qbundle {

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::vector<T> row_vector(std::size_t i) const { return {data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_}; }

    void append_row(std::span<const T> r) {
        if (rows_ == 0 && cols_ == 0) cols_ = r.size();
        if (r.size() != cols_) fail(ErrorKind::DimensionMismatch, "row length mismatch");
        data_.insert(data_.end(), r.begin(), r.end());
        ++rows_;
    }

    Matrix transpose() const {
        if (data_.empty()) return Matrix(cols_, rows_);
        Matrix t(cols_, rows_, data_.front());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool operator==(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

private:
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using ScalarMatrix = Matrix<Scalar>;
using ScalarVector = std::vector<Scalar>;

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.rows()) fail(ErrorKind::DimensionMismatch, "matrix product shape mismatch");
    if (a.rows() == 0 || b.cols() == 0 || a.cols() == 0)
        fail(ErrorKind::DimensionMismatch, "matrix product with empty operand");
    Matrix<T> c(a.rows(), b.cols(), a(0, 0) - a(0, 0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = c(i, j) + a(i, k) * b(k, j);
    return c;
}

inline ScalarMatrix zero_matrix(Field f, std::size_t rows, std::size_t cols) {
    return ScalarMatrix(rows, cols, Scalar::zero(f));
}

inline ScalarMatrix identity_matrix(Field f, std::size_t n) {
    ScalarMatrix m = zero_matrix(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar::one(f);
    return m;
}

inline ScalarVector zero_vector(Field f, std::size_t n) { return ScalarVector(n, Scalar::zero(f)); }

inline ScalarVector unit_vector(Field f, std::size_t n, std::size_t i) {
    auto v = zero_vector(f, n);
    v[i] = Scalar::one(f);
    return v;
}

inline void check_field(const ScalarMatrix& m, Field f) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j).field() != f) fail(ErrorKind::RingMismatch, "matrix entries from different fields");
}

struct EchelonForm {
    ScalarMatrix rref;                 // nonzero rows only
    std::vector<std::size_t> pivots;   // pivot column per row
};

/// Reduced row echelon form; zero rows are dropped.
inline EchelonForm row_reduce(const ScalarMatrix& m, Field f) {
    check_field(m, f);
    ScalarMatrix a = m;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t p = r;
        while (p < a.rows() && a(p, c).is_zero()) ++p;
        if (p == a.rows()) continue;
        if (p != r)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(r, j));
        const Scalar inv = a(r, c).inverse();
        for (std::size_t j = c; j < a.cols(); ++j) a(r, j) = a(r, j) * inv;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == r || a(i, c).is_zero()) continue;
            const Scalar factor = a(i, c);
            for (std::size_t j = c; j < a.cols(); ++j) a(i, j) = a(i, j) - factor * a(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    ScalarMatrix out = zero_matrix(f, r, m.cols());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = a(i, j);
    return {std::move(out), std::move(pivots)};
}

inline std::size_t rank(const ScalarMatrix& m, Field f) { return row_reduce(m, f).pivots.size(); }

/// Basis of {v : m v = 0} as rows, in reduced row echelon form.
inline ScalarMatrix kernel_basis(const ScalarMatrix& m, Field f) {
    const auto ech = row_reduce(m, f);
    const std::size_t n = m.cols();
    std::vector<bool> is_pivot(n, false);
    for (auto c : ech.pivots) is_pivot[c] = true;
    ScalarMatrix basis = zero_matrix(f, 0, n);
    for (std::size_t free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        ScalarVector v = unit_vector(f, n, free);
        for (std::size_t r = 0; r < ech.pivots.size(); ++r) v[ech.pivots[r]] = -ech.rref(r, free);
        basis.append_row(v);
    }
    if (basis.rows() == 0) return basis;
    return row_reduce(basis, f).rref;
}

/// One solution of m v = rhs, or nullopt when inconsistent.
inline std::optional<ScalarVector> solve(const ScalarMatrix& m, std::span<const Scalar> rhs, Field f) {
    if (rhs.size() != m.rows()) fail(ErrorKind::DimensionMismatch, "rhs length mismatch");
    ScalarMatrix aug = zero_matrix(f, m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = rhs[i];
    }
    const auto ech = row_reduce(aug, f);
    if (!ech.pivots.empty() && ech.pivots.back() == m.cols()) return std::nullopt;
    ScalarVector v = zero_vector(f, m.cols());
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) v[ech.pivots[r]] = ech.rref(r, m.cols());
    return v;
}

inline std::optional<ScalarMatrix> inverse(const ScalarMatrix& m, Field f) {
    if (!m.square()) fail(ErrorKind::NotSquare, "inverse of non-square matrix");
    const std::size_t n = m.rows();
    ScalarMatrix aug = zero_matrix(f, n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = Scalar::one(f);
    }
    const auto ech = row_reduce(aug, f);
    if (ech.pivots.size() < n || ech.pivots[n - 1] != n - 1) return std::nullopt;
    ScalarMatrix inv = zero_matrix(f, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = ech.rref(i, n + j);
    return inv;
}

inline bool is_invertible(const ScalarMatrix& m, Field f) { return m.square() && rank(m, f) == m.rows(); }

inline Scalar dot(std::span<const Scalar> a, std::span<const Scalar> b) {
    Scalar acc = a.empty() ? Scalar() : a[0] - a[0];
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline ScalarVector mat_vec(const ScalarMatrix& m, std::span<const Scalar> v, Field f) {
    ScalarVector out = zero_vector(f, m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
    return out;
}

// ---------------------------------------------------------------------------
// Determinant and Pfaffian over an arbitrary commutative ring element type.
// Requires T to support +, -, * and an entry to clone zero/one from.

namespace detail {

template <class T>
struct RingOps;

template <>
struct RingOps<Scalar> {
    static Scalar zero(const Scalar& proto) { return Scalar::zero(proto.field()); }
    static Scalar one(const Scalar& proto) { return Scalar::one(proto.field()); }
    static bool is_zero(const Scalar& x) { return x.is_zero(); }
};

template <class R>
struct RingOps<MultiPoly<R>> {
    static MultiPoly<R> zero(const MultiPoly<R>& proto) { return proto.zero_like(); }
    static MultiPoly<R> one(const MultiPoly<R>& proto) { return proto.one_like(); }
    static bool is_zero(const MultiPoly<R>& x) { return x.is_zero(); }
};

} // namespace detail

/// Determinant by Laplace expansion along rows with minors memoized by
/// column subset (at most 2^n distinct minors). Limited to n <= 24.
template <class T>
T determinant(const Matrix<T>& m) {
    using Ops = detail::RingOps<T>;
    if (!m.square()) fail(ErrorKind::NotSquare, "determinant of non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) fail(ErrorKind::NotSquare, "determinant of empty matrix");
    if (n > 24) fail(ErrorKind::TooLarge, "determinant expansion limited to 24x24");
    const T zero = Ops::zero(m(0, 0));
    std::unordered_map<std::uint32_t, T> memo;
    // minor(row, cols): det of rows row..n-1 against column set `cols`.
    auto minor = [&](auto&& self, std::size_t row, std::uint32_t cols) -> T {
        if (row == n) return Ops::one(m(0, 0));
        auto it = memo.find(cols);
        if (it != memo.end()) return it->second;
        T acc = zero;
        int sign = 1;
        for (std::size_t c = 0; c < n; ++c) {
            if (!(cols & (1u << c))) continue;
            if (!Ops::is_zero(m(row, c))) {
                T sub = self(self, row + 1, cols & ~(1u << c));
                if (!Ops::is_zero(sub)) {
                    T term = m(row, c) * sub;
                    acc = sign > 0 ? acc + term : acc - term;
                }
            }
            sign = -sign;
        }
        memo.emplace(cols, acc);
        return acc;
    };
    return minor(minor, 0, (n == 32 ? 0xffffffffu : ((1u << n) - 1)));
}

template <class T>
bool is_antisymmetric(const Matrix<T>& m) {
    using Ops = detail::RingOps<T>;
    if (!m.square()) return false;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (!Ops::is_zero(m(i, i))) return false;
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (!Ops::is_zero(m(i, j) + m(j, i))) return false;
    }
    return true;
}

/// Pfaffian of an antisymmetric matrix of even size, expanded along the
/// smallest remaining index with memoization over index subsets.
template <class T>
T pfaffian(const Matrix<T>& m) {
    using Ops = detail::RingOps<T>;
    if (!m.square()) fail(ErrorKind::NotSquare, "pfaffian of non-square matrix");
    if (!is_antisymmetric(m)) fail(ErrorKind::NotAntisymmetric, "pfaffian needs an antisymmetric matrix");
    const std::size_t n = m.rows();
    if (n == 0 || n % 2 != 0) fail(ErrorKind::NotAntisymmetric, "pfaffian needs positive even size");
    if (n > 24) fail(ErrorKind::TooLarge, "pfaffian expansion limited to 24x24");
    std::unordered_map<std::uint32_t, T> memo;
    auto pf = [&](auto&& self, std::uint32_t set) -> T {
        if (set == 0) return Ops::one(m(0, 0));
        auto it = memo.find(set);
        if (it != memo.end()) return it->second;
        std::size_t i = 0;
        while (!(set & (1u << i))) ++i;
        const std::uint32_t rest = set & ~(1u << i);
        T acc = Ops::zero(m(0, 0));
        int sign = 1;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!(rest & (1u << j))) continue;
            if (!Ops::is_zero(m(i, j))) {
                T sub = self(self, rest & ~(1u << j));
                if (!Ops::is_zero(sub)) {
                    T term = m(i, j) * sub;
                    acc = sign > 0 ? acc + term : acc - term;
                }
            }
            sign = -sign;
        }
        memo.emplace(set, acc);
        return acc;
    };
    return pf(pf, (1u << n) - 1);
}

} // namespace qbundle
