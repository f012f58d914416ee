#pragma once

// Finite-field enumeration on quadrics: isotropic subspaces, the two
// families of maximal isotropics, corank-2 structure, splitting of the cover
// of maximal isotropics, singular loci and line classes on quadric surfaces.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "qbundle/clifford.hpp"
#include "qbundle/quadform.hpp"

namespace qbundle {

inline constexpr double kMaxCandidates = 1e7;
inline constexpr std::uint32_t kMaxTableOrder = 1024;

namespace detail {

/// Addition and multiplication tables on element codes of a small field.
struct FqTables {
    std::uint32_t order = 0;
    std::vector<std::uint16_t> add, mul;
    std::vector<std::uint16_t> neg;

    std::uint16_t plus(std::uint32_t a, std::uint32_t b) const { return add[a * order + b]; }
    std::uint16_t times(std::uint32_t a, std::uint32_t b) const { return mul[a * order + b]; }
};

inline const FqTables& tables(Field f) {
    if (!f.is_finite()) fail(ErrorKind::Unsupported, "enumeration needs a finite field");
    if (f.order() > kMaxTableOrder) fail(ErrorKind::TooLarge, "field of order " + std::to_string(f.order()) + " too large to enumerate");
    static std::mutex mu;
    static std::map<const void*, std::unique_ptr<FqTables>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[f.data()];
    if (!slot) {
        auto t = std::make_unique<FqTables>();
        const std::uint32_t q = f.order();
        t->order = q;
        t->add.resize(q * q);
        t->mul.resize(q * q);
        t->neg.resize(q);
        const auto els = Scalar::elements(f);
        for (std::uint32_t a = 0; a < q; ++a) {
            t->neg[a] = static_cast<std::uint16_t>((-els[a]).code());
            for (std::uint32_t b = 0; b < q; ++b) {
                t->add[a * q + b] = static_cast<std::uint16_t>((els[a] + els[b]).code());
                t->mul[a * q + b] = static_cast<std::uint16_t>((els[a] * els[b]).code());
            }
        }
        slot = std::move(t);
    }
    return *slot;
}

using CodeVec = std::vector<std::uint16_t>;

/// Quadratic form on codes: value and polar form through the tables.
struct CodeForm {
    const FqTables* t;
    std::size_t n;
    std::vector<std::uint16_t> a;   // upper triangular coefficients, a[i*n+j]

    CodeForm(const QuadraticForm& q) : t(&tables(q.field())), n(q.dim()), a(n * n, 0) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) a[i * n + j] = static_cast<std::uint16_t>(q.coeff(i, j).code());
    }

    std::uint16_t value(const std::uint16_t* v) const {
        std::uint16_t acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!v[i]) continue;
            for (std::size_t j = i; j < n; ++j)
                if (v[j] && a[i * n + j]) acc = t->plus(acc, t->times(a[i * n + j], t->times(v[i], v[j])));
        }
        return acc;
    }

    std::uint16_t polar(const std::uint16_t* v, const std::uint16_t* w) const {
        std::uint16_t acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!v[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (!w[j]) continue;
                const std::uint16_t c = i == j ? t->plus(a[i * n + i], a[i * n + i]) : a[std::min(i, j) * n + std::max(i, j)];
                if (c) acc = t->plus(acc, t->times(c, t->times(v[i], w[j])));
            }
        }
        return acc;
    }
};

/// Rank of a row-major code matrix over the table field.
inline std::size_t code_rank(CodeVec m, std::size_t rows, std::size_t cols, const FqTables& t, const Field& f) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && !m[p * cols + c]) ++p;
        if (p == rows) continue;
        for (std::size_t j = 0; j < cols; ++j) std::swap(m[p * cols + j], m[r * cols + j]);
        const std::uint16_t inv = static_cast<std::uint16_t>(Scalar::from_code(f, m[r * cols + c]).inverse().code());
        for (std::size_t j = 0; j < cols; ++j) m[r * cols + j] = t.times(m[r * cols + j], inv);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || !m[i * cols + c]) continue;
            const std::uint16_t factor = t.neg[m[i * cols + c]];
            for (std::size_t j = 0; j < cols; ++j)
                m[i * cols + j] = t.plus(m[i * cols + j], t.times(factor, m[r * cols + j]));
        }
        ++r;
    }
    return r;
}

inline CodeVec to_codes(const Subspace& s) {
    CodeVec out;
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = 0; j < s.ambient(); ++j) out.push_back(static_cast<std::uint16_t>(s.basis()(i, j).code()));
    return out;
}

} // namespace detail

/// Number of k-dimensional subspaces of F_q^n.
inline double gaussian_binomial(std::size_t n, std::size_t k, double q) {
    if (k > n) return 0;
    double out = 1;
    for (std::size_t i = 0; i < k; ++i) out *= (std::pow(q, double(n - i)) - 1) / (std::pow(q, double(i + 1)) - 1);
    return out;
}

/// Calls fn(codes) for every k-dimensional subspace of F^n as its reduced
/// echelon matrix (row-major codes). Stops early when fn returns false.
template <class Fn>
void for_each_subspace(Field f, std::size_t n, std::size_t k, Fn&& fn) {
    const std::uint32_t q = f.order();
    const double count = gaussian_binomial(n, k, q);
    if (count > kMaxCandidates)
        fail(ErrorKind::TooLarge, "enumeration would visit " + std::to_string(static_cast<long long>(count)) + " subspaces");
    std::vector<std::size_t> piv(k);
    for (std::size_t i = 0; i < k; ++i) piv[i] = i;
    if (k > n) return;
    for (;;) {
        std::vector<bool> is_piv(n, false);
        for (auto p : piv) is_piv[p] = true;
        std::vector<std::size_t> free;   // flat positions i*n+j
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = piv[i] + 1; j < n; ++j)
                if (!is_piv[j]) free.push_back(i * n + j);
        detail::CodeVec m(k * n, 0);
        for (std::size_t i = 0; i < k; ++i) m[i * n + piv[i]] = 1;
        std::vector<std::uint32_t> digits(free.size(), 0);
        for (;;) {
            if (!fn(m)) return;
            std::size_t i = 0;
            while (i < free.size() && ++digits[i] == q) {
                digits[i] = 0;
                m[free[i]] = 0;
                ++i;
            }
            if (i == free.size()) break;
            m[free[i]] = static_cast<std::uint16_t>(digits[i]);
        }
        // next pivot combination
        std::size_t i = k;
        while (i > 0 && piv[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++piv[i - 1];
        for (std::size_t j = i; j < k; ++j) piv[j] = piv[j - 1] + 1;
    }
}

struct IsotropicEnumeration {
    QuadraticForm form;
    std::size_t iso_dim = 0;
    std::vector<Subspace> subspaces;               // canonically sorted
    std::optional<std::vector<int>> labels;        // component of each subspace
};

inline IsotropicEnumeration enum_isotropic(const QuadraticForm& q, std::size_t k) {
    const Field f = q.field();
    const std::size_t n = q.dim();
    if (k > n) fail(ErrorKind::DimensionMismatch, "isotropic dimension exceeds the space");
    const detail::CodeForm cf(q);
    IsotropicEnumeration out{q, k, {}, std::nullopt};
    for_each_subspace(f, n, k, [&](const detail::CodeVec& m) {
        for (std::size_t i = 0; i < k; ++i) {
            if (cf.value(&m[i * n])) return true;
            for (std::size_t j = i + 1; j < k; ++j)
                if (cf.polar(&m[i * n], &m[j * n])) return true;
        }
        ScalarMatrix rows = zero_matrix(f, k, n);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < n; ++j) rows(i, j) = Scalar::from_code(f, m[i * n + j]);
        out.subspaces.push_back(Subspace::span(f, n, rows));
        return true;
    });
    std::sort(out.subspaces.begin(), out.subspaces.end());
    return out;
}

/// dim(U cap V) for subspaces of the same dimension and ambient space.
inline std::size_t intersection_dim(const Subspace& u, const Subspace& v) {
    const auto& t = detail::tables(u.field());
    detail::CodeVec m = detail::to_codes(u);
    const detail::CodeVec mv = detail::to_codes(v);
    m.insert(m.end(), mv.begin(), mv.end());
    return u.dim() + v.dim() - detail::code_rank(std::move(m), u.dim() + v.dim(), u.ambient(), t, u.field());
}

/// Splits the maximal isotropics of a smooth quadric of dimension 2l+2 by
/// dim(U cap V) = l+1 (mod 2); the class of the first subspace is 0. Also
/// checks that the relation is an equivalence with exactly two classes.
inline IsotropicEnumeration component_classes(IsotropicEnumeration e) {
    const QuadraticForm& q = e.form;
    const std::size_t n1 = q.dim();
    if (n1 % 2 != 0 || n1 < 2 || e.iso_dim != n1 / 2 || corank(q).corank_Q != 0)
        fail(ErrorKind::NotSmoothEvenMaximal, "need maximal isotropics of a smooth even-dimensional form");
    const std::size_t half = n1 / 2;
    std::vector<int> labels(e.subspaces.size(), 0);
    if (e.subspaces.empty()) fail(ErrorKind::NotSmoothEvenMaximal, "no maximal isotropic subspaces");
    const Subspace& first = e.subspaces.front();
    for (std::size_t i = 0; i < e.subspaces.size(); ++i)
        labels[i] = (intersection_dim(first, e.subspaces[i]) - half) % 2 == 0 ? 0 : 1;
    for (std::size_t i = 0; i < e.subspaces.size(); ++i)
        for (std::size_t j = i + 1; j < e.subspaces.size(); ++j) {
            const bool related = (intersection_dim(e.subspaces[i], e.subspaces[j]) + half) % 2 == 0;
            if (related != (labels[i] == labels[j]))
                fail(ErrorKind::NotSmoothEvenMaximal, "intersection parity is not an equivalence relation");
        }
    const bool both = std::count(labels.begin(), labels.end(), 0) > 0 && std::count(labels.begin(), labels.end(), 1) > 0;
    if (!both) fail(ErrorKind::NotSmoothEvenMaximal, "maximal isotropics fall into a single class");
    e.labels = std::move(labels);
    return e;
}

inline IsotropicEnumeration component_classes(const QuadraticForm& q) {
    return component_classes(enum_isotropic(q, q.dim() / 2));
}

namespace detail {

inline CorankReport require_corank2_even(const QuadraticForm& q) {
    if (!q.is_primitive()) fail(ErrorKind::ZeroForm, "form is zero");
    auto rep = corank(q);
    if (q.dim() % 2 != 0 || q.dim() < 4 || rep.corank_Q != 2)
        fail(ErrorKind::WrongCorank, "need an even-dimensional form of corank 2, got corank " + std::to_string(rep.corank_Q));
    return rep;
}

/// q restricted to the coordinates that are not radical pivots; isometric
/// to the induced form on E / rad.
inline QuadraticForm quotient_by_radical(const QuadraticForm& q, const Subspace& rad) {
    const Field f = q.field();
    ScalarMatrix basis = zero_matrix(f, 0, q.dim());
    for (std::size_t j = 0; j < q.dim(); ++j)
        if (std::find(rad.pivots().begin(), rad.pivots().end(), j) == rad.pivots().end())
            basis.append_row(unit_vector(f, q.dim(), j));
    return q.restrict(basis);
}

} // namespace detail

struct Corank2Check {
    bool all_contain_radical = false;
    std::size_t maximal_count = 0;
};

inline Corank2Check corank2_radical_check(const QuadraticForm& q) {
    const auto rep = detail::require_corank2_even(q);
    // maximal isotropics of a corank-2 form of dimension 2l+2 have dimension l+2
    const auto e = enum_isotropic(q, q.dim() / 2 + 1);
    Corank2Check out{true, e.subspaces.size()};
    for (const auto& s : e.subspaces) out.all_contain_radical = out.all_contain_radical && s.contains(rep.radical);
    return out;
}

struct CoverSplit {
    bool split = false;
    std::size_t rational_maximal = 0;          // maximal isotropics of q over F_q
    std::size_t extension_maximal = 0;         // of the quotient form over F_{q^2}
    std::array<std::size_t, 2> class_sizes{};  // over F_{q^2}
    std::array<std::size_t, 2> rational_per_class{};
};

/// Prime base fields only: rationality of a subspace over F_{p^2} is read
/// off its echelon entries lying in F_p.
inline CoverSplit cover_split(const QuadraticForm& q) {
    const Field f = q.field();
    if (!f.is_finite() || f.degree() != 1) fail(ErrorKind::Unsupported, "cover_split needs a prime finite field");
    const auto rep = detail::require_corank2_even(q);
    CoverSplit out;
    out.rational_maximal = enum_isotropic(q, q.dim() / 2 + 1).subspaces.size();
    const QuadraticForm qbar = detail::quotient_by_radical(q, rep.radical).embed(Field::extension(f.characteristic(), 2));
    const auto classes = component_classes(qbar);
    out.extension_maximal = classes.subspaces.size();
    for (std::size_t i = 0; i < classes.subspaces.size(); ++i) {
        const int c = (*classes.labels)[i];
        ++out.class_sizes[c];
        const auto& b = classes.subspaces[i].basis();
        bool rational = true;
        for (std::size_t r = 0; r < b.rows(); ++r)
            for (std::size_t col = 0; col < b.cols(); ++col) rational = rational && b(r, col).in_prime_subfield();
        if (rational) ++out.rational_per_class[c];
    }
    out.split = out.rational_per_class[0] > 0 && out.rational_per_class[1] > 0;
    return out;
}

struct SingDim {
    int dim = -1;
    std::array<std::size_t, 3> counts{};   // #(Q cap P(rad)) over F_q, F_{q^2}, F_{q^3}
    std::size_t corank_Q = 0;
    bool consistent = false;               // dim == corank_Q - 1
};

inline constexpr std::size_t kMaxSingDimRank = 6;

/// Prime base fields only (the cubic extension must exist as a field here).
inline SingDim sing_dim(const QuadraticForm& q) {
    const Field f = q.field();
    if (!f.is_finite() || f.degree() != 1) fail(ErrorKind::Unsupported, "sing_dim needs a prime finite field");
    if (q.dim() > kMaxSingDimRank) fail(ErrorKind::TooLarge, "sing_dim limited to dimension 6");
    const auto rep = corank(q);
    const Subspace& rad = rep.radical;
    const std::size_t c = rad.dim();
    SingDim out;
    out.corank_Q = rep.corank_Q;
    for (std::size_t e = 1; e <= 3; ++e) {
        const Field k = e == 1 ? f : Field::extension(f.characteristic(), static_cast<unsigned>(e));
        if (c == 0) continue;
        const double qe = std::pow(double(f.order()), double(e));
        if ((std::pow(qe, double(c)) - 1) / (qe - 1) > kMaxCandidates) fail(ErrorKind::TooLarge, "too many radical points");
        const QuadraticForm qk = e == 1 ? q : q.embed(k);
        const detail::CodeForm cf(qk);
        // radical basis in k
        std::vector<ScalarVector> rb;
        for (std::size_t i = 0; i < c; ++i) {
            ScalarVector v = rad.vector(i);
            if (e != 1)
                for (auto& s : v) s = s.embed(k);
            rb.push_back(std::move(v));
        }
        std::size_t count = 0;
        for_each_projective_point(k, c, [&](const ScalarVector& coeffs) {
            detail::CodeVec v(q.dim(), 0);
            ScalarVector w = zero_vector(k, q.dim());
            for (std::size_t i = 0; i < c; ++i)
                for (std::size_t j = 0; j < q.dim(); ++j) w[j] += coeffs[i] * rb[i][j];
            for (std::size_t j = 0; j < q.dim(); ++j) v[j] = static_cast<std::uint16_t>(w[j].code());
            if (!cf.value(v.data())) ++count;
            return true;
        });
        out.counts[e - 1] = count;
    }
    for (std::size_t e = 1; e <= 3; ++e) {
        const double qe = std::pow(double(f.order()), double(e));
        for (int d = static_cast<int>(c); d >= 0; --d)
            if (double(out.counts[e - 1]) >= std::pow(qe, double(d))) {
                out.dim = std::max(out.dim, out.counts[e - 1] ? d : -1);
                break;
            }
    }
    out.consistent = out.dim == static_cast<int>(out.corank_Q) - 1;
    return out;
}

struct LineClass {
    std::size_t component = 0;   // index of the maximal isotropic containing W, in canonical order
    Subspace point;              // W cap rad
};

/// q: a quadric surface of corank 2 split into two planes over the field.
inline LineClass line_class(const QuadraticForm& q, const Subspace& w) {
    if (q.dim() != 4 || !q.is_primitive() || corank(q).corank_Q != 2)
        fail(ErrorKind::WrongShape, "need a rank-2 quadric surface");
    const Subspace rad = corank(q).radical;
    if (w.ambient() != 4 || w.dim() != 2 || !isotropic_check(q, w, IsotropyMode::Plain) || w == rad)
        fail(ErrorKind::WrongShape, "W must be an isotropic line other than the singular line");
    const auto planes = enum_isotropic(q, 3).subspaces;
    if (planes.size() != 2) fail(ErrorKind::WrongShape, "quadric does not split into two planes over the field");
    LineClass out{0, w.intersect(rad)};
    out.component = planes[0].contains(w) ? 0 : 1;
    return out;
}

struct LineAgreement {
    bool labels_equal = false;
    bool equivalent = false;
    bool agree() const { return labels_equal == equivalent; }
};

inline LineAgreement line_class_agreement(const QuadraticForm& q, const Subspace& w1, const Subspace& w2, int d = 0,
                                          std::uint64_t seed = 0) {
    const auto a = line_class(q, w1);
    const auto b = line_class(q, w2);
    LineAgreement out;
    out.labels_equal = a.component == b.component && a.point == b.point;
    auto alg = make_algebra(q);
    out.equivalent = mf_equiv(spinor_phi(alg, w1, d).pair(), spinor_phi(alg, w2, d).pair(), seed).found;
    return out;
}

} // namespace qbundle
