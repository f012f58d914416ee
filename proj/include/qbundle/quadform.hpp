#pragma once

// Quadratic forms over a field with values in a trivialized line: polar
// forms, radicals, coranks (with the characteristic-2 correction), isotropy,
// orthogonals and hyperbolic reduction in coordinates.

#include <span>
#include <string>
#include <vector>

#include "qbundle/exactalg.hpp"

namespace qbundle {

/// Linear subspace of F^n, stored as its reduced row echelon basis. Two
/// subspaces are equal iff their stored bases are equal.
class Subspace {
public:
    Subspace(Field f, std::size_t ambient) : field_(f), ambient_(ambient), basis_(zero_matrix(f, 0, ambient)) {}

    /// Span of the rows of `rows`.
    static Subspace span(Field f, std::size_t ambient, const ScalarMatrix& rows) {
        Subspace s(f, ambient);
        if (rows.rows() == 0) return s;
        if (rows.cols() != ambient) fail(ErrorKind::DimensionMismatch, "subspace rows have wrong length");
        auto ech = row_reduce(rows, f);
        s.basis_ = std::move(ech.rref);
        s.pivots_ = std::move(ech.pivots);
        return s;
    }

    static Subspace span(Field f, std::size_t ambient, const std::vector<ScalarVector>& vectors) {
        ScalarMatrix m = zero_matrix(f, 0, ambient);
        for (const auto& v : vectors) m.append_row(v);
        return span(f, ambient, m);
    }

    static Subspace whole(Field f, std::size_t ambient) { return span(f, ambient, identity_matrix(f, ambient)); }

    /// Span of the standard basis vectors e_i, i in `indices`.
    static Subspace coordinate(Field f, std::size_t ambient, const std::vector<std::size_t>& indices) {
        std::vector<ScalarVector> vs;
        for (auto i : indices) vs.push_back(unit_vector(f, ambient, i));
        return span(f, ambient, vs);
    }

    Field field() const { return field_; }
    std::size_t ambient() const { return ambient_; }
    std::size_t dim() const { return basis_.rows(); }
    const ScalarMatrix& basis() const { return basis_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }
    ScalarVector vector(std::size_t i) const { return basis_.row_vector(i); }

    bool contains(std::span<const Scalar> v) const {
        ScalarMatrix m = basis_;
        m.append_row(v);
        return rank(m, field_) == dim();
    }

    bool contains(const Subspace& o) const {
        for (std::size_t i = 0; i < o.dim(); ++i)
            if (!contains(o.basis_.row(i))) return false;
        return true;
    }

    Subspace operator+(const Subspace& o) const {
        ScalarMatrix m = basis_;
        for (std::size_t i = 0; i < o.dim(); ++i) m.append_row(o.basis_.row(i));
        return span(field_, ambient_, m);
    }

    Subspace intersect(const Subspace& o) const {
        // v = sum a_i u_i = sum b_j w_j; kernel of [U; -W]^T
        const std::size_t du = dim(), dw = o.dim();
        if (du == 0 || dw == 0) return Subspace(field_, ambient_);
        ScalarMatrix sys = zero_matrix(field_, ambient_, du + dw);
        for (std::size_t k = 0; k < ambient_; ++k) {
            for (std::size_t i = 0; i < du; ++i) sys(k, i) = basis_(i, k);
            for (std::size_t j = 0; j < dw; ++j) sys(k, du + j) = -o.basis_(j, k);
        }
        ScalarMatrix ker = kernel_basis(sys, field_);
        std::vector<ScalarVector> vs;
        for (std::size_t r = 0; r < ker.rows(); ++r) {
            ScalarVector v = zero_vector(field_, ambient_);
            for (std::size_t i = 0; i < du; ++i)
                for (std::size_t k = 0; k < ambient_; ++k) v[k] += ker(r, i) * basis_(i, k);
            vs.push_back(std::move(v));
        }
        return span(field_, ambient_, vs);
    }

    /// True when every basis vector is a standard basis vector.
    bool is_coordinate() const {
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < ambient_; ++j)
                if (j != pivots_[i] && !basis_(i, j).is_zero()) return false;
        return true;
    }

    bool operator==(const Subspace& o) const {
        return field_ == o.field_ && ambient_ == o.ambient_ && basis_ == o.basis_;
    }
    bool operator!=(const Subspace& o) const { return !(*this == o); }

    /// Lexicographic order on (dim, basis entries); used for canonical sorting.
    bool operator<(const Subspace& o) const {
        if (dim() != o.dim()) return dim() < o.dim();
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < ambient_; ++j) {
                if (basis_(i, j) == o.basis_(i, j)) continue;
                return basis_(i, j) < o.basis_(i, j);
            }
        return false;
    }

    std::vector<std::vector<std::string>> to_strings() const {
        std::vector<std::vector<std::string>> out;
        for (std::size_t i = 0; i < dim(); ++i) {
            std::vector<std::string> row;
            for (std::size_t j = 0; j < ambient_; ++j) row.push_back(basis_(i, j).to_string());
            out.push_back(std::move(row));
        }
        return out;
    }

private:
    Field field_;
    std::size_t ambient_;
    ScalarMatrix basis_;
    std::vector<std::size_t> pivots_;
};

/// q(x) = sum_{i<=j} a_ij x_i x_j on F^{n+1}.
class QuadraticForm {
public:
    QuadraticForm(Field f, std::size_t dim) : field_(f), dim_(dim), upper_(zero_matrix(f, dim, dim)) {}

    /// Reads the upper triangle (i <= j) of `upper`; the rest is ignored.
    static QuadraticForm from_upper(Field f, const ScalarMatrix& upper) {
        if (!upper.square()) fail(ErrorKind::NotSquare, "coefficient table must be square");
        QuadraticForm q(f, upper.rows());
        for (std::size_t i = 0; i < upper.rows(); ++i)
            for (std::size_t j = i; j < upper.cols(); ++j) q.set(i, j, upper(i, j));
        return q;
    }

    /// From a homogeneous quadratic polynomial in x0..xn.
    static QuadraticForm from_poly(const Poly& p) {
        QuadraticForm q(p.ctx(), p.nvars());
        for (const auto& [m, c] : p.terms()) {
            if (m.degree() != 2) fail(ErrorKind::NotHomogeneous, "quadratic form must be homogeneous of degree 2");
            std::size_t i = 0;
            while (m.exps[i] == 0) ++i;
            std::size_t j = i;
            if (m.exps[i] == 1) {
                j = i + 1;
                while (m.exps[j] == 0) ++j;
            }
            q.set(i, j, c);
        }
        return q;
    }

    static QuadraticForm parse(std::string_view text, Field f, std::size_t dim) {
        return from_poly(parse_poly(text, indexed_vars("x", dim), f));
    }

    Field field() const { return field_; }
    std::size_t dim() const { return dim_; }

    const Scalar& coeff(std::size_t i, std::size_t j) const { return i <= j ? upper_(i, j) : upper_(j, i); }

    void set(std::size_t i, std::size_t j, const Scalar& c) {
        if (c.field() != field_) fail(ErrorKind::RingMismatch, "coefficient from another field");
        if (i > j) std::swap(i, j);
        upper_(i, j) = c;
    }

    Scalar operator()(std::span<const Scalar> v) const {
        check_len(v);
        Scalar acc = Scalar::zero(field_);
        for (std::size_t i = 0; i < dim_; ++i) {
            if (v[i].is_zero()) continue;
            for (std::size_t j = i; j < dim_; ++j)
                if (!upper_(i, j).is_zero()) acc += upper_(i, j) * v[i] * v[j];
        }
        return acc;
    }

    /// b(v,w) = q(v+w) - q(v) - q(w).
    Scalar polar(std::span<const Scalar> v, std::span<const Scalar> w) const {
        check_len(v);
        check_len(w);
        Scalar acc = Scalar::zero(field_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i; j < dim_; ++j) {
                const Scalar& a = upper_(i, j);
                if (a.is_zero()) continue;
                acc += i == j ? a * (v[i] * w[i] + v[i] * w[i]) : a * (v[i] * w[j] + v[j] * w[i]);
            }
        return acc;
    }

    ScalarMatrix polar_matrix() const {
        ScalarMatrix b = zero_matrix(field_, dim_, dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            b(i, i) = upper_(i, i) + upper_(i, i);
            for (std::size_t j = i + 1; j < dim_; ++j) b(i, j) = b(j, i) = upper_(i, j);
        }
        return b;
    }

    bool is_primitive() const {
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i; j < dim_; ++j)
                if (!upper_(i, j).is_zero()) return true;
        return false;
    }

    Poly to_poly() const {
        auto vars = indexed_vars("x", dim_);
        Poly p(field_, vars);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i; j < dim_; ++j) {
                Monomial m(dim_);
                m.exps[i] += 1;
                m.exps[j] += 1;
                p.add_term(m, upper_(i, j));
            }
        return p;
    }

    /// The form in the coordinates of the rows of `basis`:
    /// q'(y) = q(sum y_i basis_i).
    QuadraticForm restrict(const ScalarMatrix& basis) const {
        QuadraticForm r(field_, basis.rows());
        std::vector<ScalarVector> rows;
        for (std::size_t i = 0; i < basis.rows(); ++i) rows.push_back(basis.row_vector(i));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            r.set(i, i, (*this)(rows[i]));
            for (std::size_t j = i + 1; j < rows.size(); ++j) r.set(i, j, polar(rows[i], rows[j]));
        }
        return r;
    }

    /// Same coefficients viewed over an extension of the prime field.
    QuadraticForm embed(Field target) const {
        QuadraticForm r(target, dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i; j < dim_; ++j) r.set(i, j, upper_(i, j).embed(target));
        return r;
    }

    bool operator==(const QuadraticForm& o) const { return field_ == o.field_ && upper_ == o.upper_; }
    bool operator!=(const QuadraticForm& o) const { return !(*this == o); }

    std::string to_string() const { return to_poly().to_string(); }

private:
    void check_len(std::span<const Scalar> v) const {
        if (v.size() != dim_) fail(ErrorKind::DimensionMismatch, "vector length does not match form dimension");
    }

    Field field_;
    std::size_t dim_;
    ScalarMatrix upper_;
};

struct PolarAndRadical {
    ScalarMatrix polar;
    Subspace radical;
};

inline PolarAndRadical polar_and_radical(const QuadraticForm& q) {
    ScalarMatrix b = q.polar_matrix();
    ScalarMatrix ker = kernel_basis(b, q.field());
    return {b, Subspace::span(q.field(), q.dim(), ker)};
}

struct CorankReport {
    std::size_t corank_b = 0;
    std::size_t corank_Q = 0;
    Subspace radical;
    bool q_on_radical_nonzero = false;
};

/// corank_Q = corank_b - 1 exactly when char = 2 and q does not vanish on the
/// bilinear radical; otherwise corank_Q = corank_b.
inline CorankReport corank(const QuadraticForm& q) {
    auto [b, rad] = polar_and_radical(q);
    bool nonzero = false;
    for (std::size_t i = 0; i < rad.dim() && !nonzero; ++i) {
        const auto vi = rad.vector(i);
        if (!q(vi).is_zero()) nonzero = true;
        for (std::size_t j = i + 1; j < rad.dim() && !nonzero; ++j) {
            auto s = vi;
            const auto vj = rad.vector(j);
            for (std::size_t k = 0; k < s.size(); ++k) s[k] += vj[k];
            if (!q(s).is_zero()) nonzero = true;
        }
    }
    CorankReport r{rad.dim(), rad.dim(), rad, nonzero};
    if (q.field().characteristic() == 2 && nonzero) r.corank_Q = r.corank_b - 1;
    return r;
}

enum class IsotropyMode { Plain, Regular };

/// Pairing matrix P with P(i,k) = b(w_i, e_k).
inline ScalarMatrix pairing_matrix(const QuadraticForm& q, const Subspace& w) {
    return w.dim() == 0 ? zero_matrix(q.field(), 0, q.dim()) : w.basis() * q.polar_matrix();
}

inline bool isotropic_check(const QuadraticForm& q, const Subspace& w, IsotropyMode mode) {
    if (w.ambient() != q.dim() || w.field() != q.field())
        fail(ErrorKind::DimensionMismatch, "subspace does not live in the form's space");
    for (std::size_t i = 0; i < w.dim(); ++i) {
        const auto wi = w.vector(i);
        if (!q(wi).is_zero()) return false;
        for (std::size_t j = i + 1; j < w.dim(); ++j)
            if (!q.polar(wi, w.vector(j)).is_zero()) return false;
    }
    if (mode == IsotropyMode::Plain) return true;
    return rank(pairing_matrix(q, w), q.field()) == w.dim();
}

/// F^perp = {v : b(f, v) = 0 for all f in F}.
inline Subspace orthogonal_subspace(const QuadraticForm& q, const Subspace& f) {
    if (f.ambient() != q.dim()) fail(ErrorKind::DimensionMismatch, "subspace does not live in the form's space");
    if (f.dim() == 0) return Subspace::whole(q.field(), q.dim());
    return Subspace::span(q.field(), q.dim(), kernel_basis(pairing_matrix(q, f), q.field()));
}

struct HyperbolicReduction {
    QuadraticForm reduced;
    /// Rows: x-vectors (a basis of F), then the hyperbolic partners y, then
    /// the z-vectors spanning the complement on which `reduced` lives. In
    /// these coordinates q = sum_i x_i y_i + reduced(z).
    ScalarMatrix basis_data;
    std::size_t rank = 0;

    ScalarMatrix z_basis() const {
        ScalarMatrix z = zero_matrix(reduced.field(), 0, basis_data.cols());
        for (std::size_t i = 2 * rank; i < basis_data.rows(); ++i) z.append_row(basis_data.row(i));
        return z;
    }
};

/// Split off one hyperbolic plane per basis vector of a regular isotropic F.
/// Pivots are the lowest-index current basis vector pairing invertibly.
inline HyperbolicReduction hyperbolic_reduce(const QuadraticForm& q, const Subspace& f) {
    if (!isotropic_check(q, f, IsotropyMode::Regular))
        fail(ErrorKind::NotRegularIsotropic, "subspace is not regular isotropic");
    const Field k = q.field();
    const std::size_t n = q.dim();
    std::vector<ScalarVector> current;
    for (std::size_t i = 0; i < n; ++i) current.push_back(unit_vector(k, n, i));
    std::vector<ScalarVector> fs;
    for (std::size_t i = 0; i < f.dim(); ++i) fs.push_back(f.vector(i));
    std::vector<ScalarVector> xs, ys;

    auto axpy = [](ScalarVector& y, const Scalar& a, const ScalarVector& x) {
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
    };

    for (std::size_t step = 0; step < fs.size(); ++step) {
        const ScalarVector fv = fs[step];
        std::size_t piv = current.size();
        for (std::size_t c = 0; c < current.size(); ++c)
            if (!q.polar(fv, current[c]).is_zero()) {
                piv = c;
                break;
            }
        if (piv == current.size()) fail(ErrorKind::NotRegularIsotropic, "no invertible pairing for reduction step");
        ScalarVector v = current[piv];
        const Scalar inv = q.polar(fv, v).inverse();
        for (auto& c : v) c *= inv;
        axpy(v, -q(v), fv);
        for (std::size_t later = step + 1; later < fs.size(); ++later) axpy(fs[later], -q.polar(fs[later], v), fv);
        // complement of span{f, v} inside the current space
        ScalarMatrix pairing = zero_matrix(k, 2, current.size());
        for (std::size_t c = 0; c < current.size(); ++c) {
            pairing(0, c) = q.polar(fv, current[c]);
            pairing(1, c) = q.polar(v, current[c]);
        }
        ScalarMatrix ker = kernel_basis(pairing, k);
        std::vector<ScalarVector> next;
        for (std::size_t r = 0; r < ker.rows(); ++r) {
            ScalarVector w = zero_vector(k, n);
            for (std::size_t c = 0; c < current.size(); ++c)
                if (!ker(r, c).is_zero()) axpy(w, ker(r, c), current[c]);
            next.push_back(std::move(w));
        }
        current = std::move(next);
        xs.push_back(fv);
        ys.push_back(std::move(v));
    }

    ScalarMatrix data = zero_matrix(k, 0, n);
    for (const auto& x : xs) data.append_row(x);
    for (const auto& y : ys) data.append_row(y);
    ScalarMatrix z = zero_matrix(k, 0, n);
    for (const auto& w : current) {
        data.append_row(w);
        z.append_row(w);
    }
    return {q.restrict(z), std::move(data), xs.size()};
}

/// Projective points of P^{n}(F_q), one normalized representative each
/// (first nonzero coordinate 1), in lexicographic order of codes.
template <class Fn>
void for_each_projective_point(Field f, std::size_t n1, Fn&& fn) {
    if (!f.is_finite()) fail(ErrorKind::Unsupported, "point enumeration needs a finite field");
    const std::uint32_t q = f.order();
    for (std::size_t lead = 0; lead < n1; ++lead) {
        const std::size_t free = n1 - lead - 1;
        std::vector<std::uint32_t> digits(free, 0);
        for (;;) {
            ScalarVector v = zero_vector(f, n1);
            v[lead] = Scalar::one(f);
            for (std::size_t i = 0; i < free; ++i) v[lead + 1 + i] = Scalar::from_code(f, digits[i]);
            if (!fn(v)) return;
            std::size_t i = 0;
            while (i < free && ++digits[i] == q) digits[i++] = 0;
            if (i == free) break;
        }
    }
}

} // namespace qbundle
