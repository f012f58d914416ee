#pragma once

// Clifford algebras of quadratic forms, Clifford ideals of isotropic
// subspaces, spinor matrix factorizations and their equivalence testing.
//
// Basis: the ordered monomials e_S = e_{s1} ... e_{sk} (s1 < ... < sk),
// indexed by the bitmask of S. With L trivialized, Cl_d depends only on the
// parity of d; the integer degree is kept as a label.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qbundle/exactalg.hpp"
#include "qbundle/quadform.hpp"

namespace qbundle {

inline constexpr std::size_t kMaxCliffordRank = 10;

using SparseTerms = std::vector<std::pair<std::uint32_t, Scalar>>;

/// Monomial masks of rank n+1 sorted by (size, lexicographic index list).
inline std::vector<std::uint32_t> monomial_order(std::size_t rank) {
    std::vector<std::uint32_t> masks(std::size_t{1} << rank);
    for (std::uint32_t m = 0; m < masks.size(); ++m) masks[m] = m;
    auto indices = [](std::uint32_t m) {
        std::vector<int> out;
        for (int i = 0; m; ++i, m >>= 1)
            if (m & 1) out.push_back(i);
        return out;
    };
    std::sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        if (pa != pb) return pa < pb;
        return indices(a) < indices(b);
    });
    return masks;
}

class CliffordAlgebra {
public:
    explicit CliffordAlgebra(QuadraticForm q) : q_(std::move(q)), rank_(q_.dim()) {
        if (rank_ > kMaxCliffordRank) fail(ErrorKind::TooLarge, "Clifford algebra rank limited to 10");
        build_generator_table();
        if (rank_ <= 7) build_full_table();
        order_ = monomial_order(rank_);
        position_.assign(size(), 0);
        for (std::size_t i = 0; i < order_.size(); ++i) position_[order_[i]] = i;
    }

    const QuadraticForm& form() const { return q_; }
    Field field() const { return q_.field(); }
    std::size_t rank() const { return rank_; }
    std::size_t size() const { return std::size_t{1} << rank_; }

    /// Canonical column order of monomials and its inverse.
    const std::vector<std::uint32_t>& order() const { return order_; }
    std::size_t position(std::uint32_t mask) const { return position_[mask]; }

    /// e_S * e_T expanded in the monomial basis.
    SparseTerms monomial_product(std::uint32_t s, std::uint32_t t) const {
        if (!full_.empty()) return full_[s * size() + t];
        return compute_product(s, t);
    }

    /// Dense product of coefficient vectors.
    ScalarVector multiply(const ScalarVector& a, const ScalarVector& b) const {
        ScalarVector out = zero_vector(field(), size());
        for (std::uint32_t s = 0; s < size(); ++s) {
            if (a[s].is_zero()) continue;
            for (std::uint32_t t = 0; t < size(); ++t) {
                if (b[t].is_zero()) continue;
                const Scalar c = a[s] * b[t];
                for (const auto& [m, x] : monomial_product(s, t)) out[m] += c * x;
            }
        }
        return out;
    }

    std::string monomial_name(std::uint32_t mask) const {
        if (mask == 0) return "1";
        std::string out;
        for (std::size_t i = 0; i < rank_; ++i)
            if (mask & (1u << i)) out += (out.empty() ? "e" : "*e") + std::to_string(i);
        return out;
    }

private:
    // right_[s * rank + j] = e_S * e_j
    void build_generator_table() {
        const Field f = field();
        right_.assign(size() * rank_, {});
        for (std::uint32_t s = 0; s < size(); ++s) {
            for (std::size_t j = 0; j < rank_; ++j) {
                SparseTerms out;
                if (s == 0) {
                    out.push_back({1u << j, Scalar::one(f)});
                } else {
                    const int top = 31 - std::countl_zero(s);
                    const std::uint32_t rest = s & ~(1u << top);
                    if (static_cast<std::size_t>(top) < j) {
                        out.push_back({s | (1u << j), Scalar::one(f)});
                    } else if (static_cast<std::size_t>(top) == j) {
                        // e_P e_j e_j = a_jj e_P
                        const Scalar& a = q_.coeff(j, j);
                        if (!a.is_zero()) out.push_back({rest, a});
                    } else {
                        // e_P e_top e_j = b(top,j) e_P - (e_P e_j) e_top
                        const Scalar& b = q_.coeff(j, static_cast<std::size_t>(top));
                        if (!b.is_zero()) out.push_back({rest, b});
                        for (const auto& [m, c] : right_[rest * rank_ + j]) out.push_back({m | (1u << top), -c});
                    }
                }
                right_[s * rank_ + j] = normalize(std::move(out));
            }
        }
    }

    SparseTerms compute_product(std::uint32_t s, std::uint32_t t) const {
        SparseTerms cur{{s, Scalar::one(field())}};
        for (std::size_t j = 0; j < rank_; ++j) {
            if (!(t & (1u << j))) continue;
            SparseTerms next;
            for (const auto& [m, c] : cur)
                for (const auto& [m2, c2] : right_[m * rank_ + j]) next.push_back({m2, c * c2});
            cur = normalize(std::move(next));
        }
        return cur;
    }

    void build_full_table() {
        full_.resize(size() * size());
        for (std::uint32_t s = 0; s < size(); ++s)
            for (std::uint32_t t = 0; t < size(); ++t) full_[s * size() + t] = compute_product(s, t);
    }

    static SparseTerms normalize(SparseTerms terms) {
        std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        SparseTerms out;
        for (auto& [m, c] : terms) {
            if (!out.empty() && out.back().first == m)
                out.back().second += c;
            else
                out.push_back({m, c});
        }
        std::erase_if(out, [](const auto& t) { return t.second.is_zero(); });
        return out;
    }

    QuadraticForm q_;
    std::size_t rank_;
    std::vector<SparseTerms> right_;
    std::vector<SparseTerms> full_;
    std::vector<std::uint32_t> order_;
    std::vector<std::size_t> position_;
};

using AlgebraPtr = std::shared_ptr<const CliffordAlgebra>;

inline AlgebraPtr make_algebra(const QuadraticForm& q) { return std::make_shared<const CliffordAlgebra>(q); }

/// Homogeneous element: only monomials e_S with |S| = degree (mod 2) carry
/// coefficients.
class CliffordElement {
public:
    CliffordElement(AlgebraPtr alg, int degree) : alg_(std::move(alg)), degree_(degree), coeffs_(zero_vector(alg_->field(), alg_->size())) {}

    CliffordElement(AlgebraPtr alg, int degree, ScalarVector coeffs) : alg_(std::move(alg)), degree_(degree), coeffs_(std::move(coeffs)) {
        if (coeffs_.size() != alg_->size()) fail(ErrorKind::DimensionMismatch, "coefficient vector has wrong size");
        for (std::uint32_t m = 0; m < coeffs_.size(); ++m)
            if (!coeffs_[m].is_zero() && !parity_ok(m))
                fail(ErrorKind::DimensionMismatch, "coefficient on monomial of the wrong parity");
    }

    static CliffordElement scalar(AlgebraPtr alg, const Scalar& c) {
        CliffordElement e(alg, 0);
        e.coeffs_[0] = c;
        return e;
    }
    static CliffordElement one(AlgebraPtr alg) { return scalar(alg, Scalar::one(alg->field())); }

    static CliffordElement monomial(AlgebraPtr alg, std::uint32_t mask, Scalar c) {
        CliffordElement e(alg, std::popcount(mask));
        e.coeffs_[mask] = std::move(c);
        return e;
    }
    static CliffordElement generator(AlgebraPtr alg, std::size_t i) {
        return monomial(alg, 1u << i, Scalar::one(alg->field()));
    }

    /// sum_i v_i e_i, an element of E = Fil_1 in degree 1.
    static CliffordElement vector(AlgebraPtr alg, std::span<const Scalar> v) {
        CliffordElement e(alg, 1);
        for (std::size_t i = 0; i < v.size(); ++i) e.coeffs_[1u << i] = v[i];
        return e;
    }

    const AlgebraPtr& algebra() const { return alg_; }
    int degree() const { return degree_; }
    bool even() const { return degree_ % 2 == 0; }
    const ScalarVector& coeffs() const { return coeffs_; }
    const Scalar& operator[](std::uint32_t mask) const { return coeffs_[mask]; }
    bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Scalar& s) { return s.is_zero(); });
    }

    /// Relabel the degree by a multiple of 2 (canonical with L trivial).
    CliffordElement with_degree(int d) const {
        if ((d - degree_) % 2 != 0) fail(ErrorKind::DimensionMismatch, "degree relabel must preserve parity");
        CliffordElement e = *this;
        e.degree_ = d;
        return e;
    }

    CliffordElement operator+(const CliffordElement& o) const {
        check_same(o);
        if ((degree_ - o.degree_) % 2 != 0) fail(ErrorKind::DimensionMismatch, "sum of elements of different parity");
        CliffordElement r = *this;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] += o.coeffs_[i];
        return r;
    }
    CliffordElement operator-(const CliffordElement& o) const { return *this + o.scale(-Scalar::one(alg_->field())); }

    CliffordElement scale(const Scalar& c) const {
        CliffordElement r = *this;
        for (auto& x : r.coeffs_) x *= c;
        return r;
    }

    /// Clifford product; the result degree is the sum of the degrees.
    CliffordElement operator*(const CliffordElement& o) const {
        check_same(o);
        return CliffordElement(alg_, degree_ + o.degree_, alg_->multiply(coeffs_, o.coeffs_));
    }

    bool operator==(const CliffordElement& o) const {
        return alg_->form() == o.alg_->form() && (degree_ - o.degree_) % 2 == 0 && coeffs_ == o.coeffs_;
    }
    bool operator!=(const CliffordElement& o) const { return !(*this == o); }

    /// Coefficients on e_0..e_n when the element lies in E; nullopt otherwise.
    std::optional<ScalarVector> as_vector() const {
        ScalarVector v = zero_vector(alg_->field(), alg_->rank());
        for (std::uint32_t m = 0; m < coeffs_.size(); ++m) {
            if (coeffs_[m].is_zero()) continue;
            if (std::popcount(m) != 1) return std::nullopt;
            v[std::countr_zero(m)] = coeffs_[m];
        }
        return v;
    }

    std::string to_string() const {
        std::string out;
        for (auto m : alg_->order()) {
            const Scalar& c = coeffs_[m];
            if (c.is_zero()) continue;
            const bool neg = !c.field().is_finite() && sgn(c.rational()) < 0;
            const Scalar mag = neg ? -c : c;
            out += out.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
            if (m == 0) {
                out += mag.to_string();
            } else if (mag.is_one()) {
                out += alg_->monomial_name(m);
            } else {
                out += (mag.compound() ? "(" + mag.to_string() + ")" : mag.to_string()) + "*" + alg_->monomial_name(m);
            }
        }
        return out.empty() ? "0" : out;
    }

private:
    bool parity_ok(std::uint32_t m) const { return (std::popcount(m) - degree_) % 2 == 0; }

    void check_same(const CliffordElement& o) const {
        if (alg_ != o.alg_ && alg_->form() != o.alg_->form())
            fail(ErrorKind::FormMismatch, "Clifford elements over different forms");
    }

    AlgebraPtr alg_;
    int degree_;
    ScalarVector coeffs_;
};

inline CliffordElement cl_mul(const CliffordElement& a, const CliffordElement& b) { return a * b; }

// ---------------------------------------------------------------------------
// Clifford ideals

/// Row-reduce coefficient vectors in the canonical monomial order. Returns
/// the nonzero reduced rows (mask-indexed) and their pivot masks.
inline std::pair<std::vector<ScalarVector>, std::vector<std::uint32_t>> canonical_span(
    const CliffordAlgebra& alg, const std::vector<ScalarVector>& vectors) {
    const Field f = alg.field();
    const auto& order = alg.order();
    ScalarMatrix m = zero_matrix(f, 0, alg.size());
    for (const auto& v : vectors) {
        ScalarVector permuted = zero_vector(f, alg.size());
        for (std::size_t c = 0; c < order.size(); ++c) permuted[c] = v[order[c]];
        m.append_row(permuted);
    }
    std::vector<ScalarVector> rows;
    std::vector<std::uint32_t> pivots;
    if (m.rows() == 0) return {rows, pivots};
    auto ech = row_reduce(m, f);
    for (std::size_t r = 0; r < ech.rref.rows(); ++r) {
        ScalarVector v = zero_vector(f, alg.size());
        for (std::size_t c = 0; c < order.size(); ++c) v[order[c]] = ech.rref(r, c);
        rows.push_back(std::move(v));
        pivots.push_back(order[ech.pivots[r]]);
    }
    return {rows, pivots};
}

/// Dimension of the span of a set of coefficient vectors.
inline std::size_t span_rank(const CliffordAlgebra& alg, const std::vector<ScalarVector>& vectors) {
    return canonical_span(alg, vectors).first.size();
}

struct CliffordIdealBasis {
    AlgebraPtr algebra;
    Subspace W;
    int degree = 0;
    std::vector<CliffordElement> basis;
    std::vector<std::uint32_t> pivots;   // pivot monomial of each basis element
    CliffordElement generator;           // det W = w_0 ... w_{r-1}

    std::size_t dim() const { return basis.size(); }

    /// Coordinates of x in the basis, or nullopt when x is not in the span.
    std::optional<ScalarVector> coordinates(const CliffordElement& x) const {
        const Field f = algebra->field();
        ScalarVector c = zero_vector(f, basis.size());
        ScalarVector rest = x.coeffs();
        for (std::size_t j = 0; j < basis.size(); ++j) {
            c[j] = rest[pivots[j]];
            if (c[j].is_zero()) continue;
            const auto& b = basis[j].coeffs();
            for (std::size_t m = 0; m < rest.size(); ++m) rest[m] -= c[j] * b[m];
        }
        for (const auto& s : rest)
            if (!s.is_zero()) return std::nullopt;
        return c;
    }

    std::vector<ScalarVector> vectors() const {
        std::vector<ScalarVector> out;
        for (const auto& b : basis) out.push_back(b.coeffs());
        return out;
    }
};

/// det W as the Clifford product of the echelon basis vectors of W.
inline CliffordElement top_wedge(const AlgebraPtr& alg, const Subspace& w) {
    CliffordElement g = CliffordElement::one(alg);
    for (std::size_t i = 0; i < w.dim(); ++i) g = g * CliffordElement::vector(alg, w.vector(i));
    return g;
}

/// Canonical basis of I_d = Cl_{d-r} . det W for an isotropic W of rank r.
inline CliffordIdealBasis ideal_basis(const AlgebraPtr& alg, const Subspace& w, int d) {
    const QuadraticForm& q = alg->form();
    if (w.ambient() != q.dim()) fail(ErrorKind::DimensionMismatch, "subspace does not live in the form's space");
    if (!isotropic_check(q, w, IsotropyMode::Plain)) fail(ErrorKind::NotIsotropic, "W is not isotropic");
    const int r = static_cast<int>(w.dim());
    CliffordElement g = top_wedge(alg, w);
    std::vector<ScalarVector> span;
    for (std::uint32_t m = 0; m < alg->size(); ++m) {
        if ((std::popcount(m) - (d - r)) % 2 != 0) continue;
        span.push_back((CliffordElement::monomial(alg, m, Scalar::one(alg->field())) * g).coeffs());
    }
    auto [rows, pivots] = canonical_span(*alg, span);
    CliffordIdealBasis out{alg, w, d, {}, std::move(pivots), g};
    for (auto& v : rows) out.basis.emplace_back(alg, d, std::move(v));
    return out;
}

inline CliffordIdealBasis ideal_basis(const QuadraticForm& q, const Subspace& w, int d) {
    return ideal_basis(make_algebra(q), w, d);
}

// ---------------------------------------------------------------------------
// Matrices of linear forms and matrix factorizations

/// Matrix whose entries are linear forms in x0..x_{nvars-1}:
/// M(x) = sum_i x_i * coeff[i].
struct LinearMatrix {
    Field field;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<ScalarMatrix> coeff;

    LinearMatrix(Field f, std::size_t r, std::size_t c, std::size_t nvars)
        : field(f), rows(r), cols(c), coeff(nvars, zero_matrix(f, r, c)) {}

    std::size_t nvars() const { return coeff.size(); }

    ScalarMatrix evaluate(std::span<const Scalar> point) const {
        ScalarMatrix out = zero_matrix(field, rows, cols);
        for (std::size_t v = 0; v < nvars(); ++v) {
            if (point[v].is_zero()) continue;
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) out(i, j) += point[v] * coeff[v](i, j);
        }
        return out;
    }

    LinearMatrix transpose() const {
        LinearMatrix t(field, cols, rows, nvars());
        for (std::size_t v = 0; v < nvars(); ++v) t.coeff[v] = coeff[v].transpose();
        return t;
    }

    Matrix<Poly> to_poly() const {
        auto vars = indexed_vars("x", nvars());
        Matrix<Poly> out(rows, cols, Poly(field, vars));
        for (std::size_t v = 0; v < nvars(); ++v) {
            const Poly xv = Poly::variable(field, vars, v);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j)
                    if (!coeff[v](i, j).is_zero()) out(i, j) += xv.scale(coeff[v](i, j));
        }
        return out;
    }

    /// Parse from a matrix of expression strings in x0..x_{nvars-1}.
    static LinearMatrix parse(Field f, std::size_t nvars, const std::vector<std::vector<std::string>>& entries) {
        auto vars = indexed_vars("x", nvars);
        const std::size_t r = entries.size();
        const std::size_t c = r ? entries[0].size() : 0;
        LinearMatrix m(f, r, c, nvars);
        for (std::size_t i = 0; i < r; ++i) {
            if (entries[i].size() != c) fail(ErrorKind::DimensionMismatch, "ragged matrix");
            for (std::size_t j = 0; j < c; ++j) {
                Poly p = parse_poly(entries[i][j], vars, f);
                for (const auto& [mono, coef] : p.terms()) {
                    if (mono.degree() != 1) fail(ErrorKind::NotHomogeneous, "entry is not a linear form");
                    std::size_t v = 0;
                    while (mono.exps[v] == 0) ++v;
                    m.coeff[v](i, j) = coef;
                }
            }
        }
        return m;
    }

    std::vector<std::vector<std::string>> to_strings() const {
        auto pm = to_poly();
        std::vector<std::vector<std::string>> out(rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) out[i].push_back(pm(i, j).to_string());
        return out;
    }

    bool operator==(const LinearMatrix& o) const {
        return field == o.field && rows == o.rows && cols == o.cols && coeff == o.coeff;
    }
};

/// A pair (first, second) with first * second = q * Id = second * first.
struct MatrixFactorization {
    QuadraticForm form;
    LinearMatrix first;
    LinearMatrix second;
};

struct SpinorFactorization {
    QuadraticForm form;
    Subspace W;
    int degree = 0;
    LinearMatrix phi;        // phi_d : I_{d-1}(-1) -> I_d
    LinearMatrix phi_prev;   // phi_{d-1} : I_{d-2}(-1) -> I_{d-1}, with I_{d-2} = I_d
    CliffordIdealBasis source;   // I_{d-1}
    CliffordIdealBasis target;   // I_d

    MatrixFactorization pair() const { return {form, phi, phi_prev}; }
};

namespace detail {

/// Matrix of left multiplication by sum x_i e_i from `src` to `dst`.
inline LinearMatrix clifford_multiplication(const CliffordIdealBasis& src, const CliffordIdealBasis& dst) {
    const auto& alg = src.algebra;
    const std::size_t n1 = alg->rank();
    LinearMatrix m(alg->field(), dst.dim(), src.dim(), n1);
    for (std::size_t i = 0; i < n1; ++i) {
        const CliffordElement ei = CliffordElement::generator(alg, i);
        for (std::size_t j = 0; j < src.dim(); ++j) {
            auto coords = dst.coordinates(ei * src.basis[j]);
            if (!coords) fail(ErrorKind::NotIsotropic, "Clifford multiplication left the ideal");
            for (std::size_t k = 0; k < dst.dim(); ++k) m.coeff[i](k, j) = (*coords)[k];
        }
    }
    return m;
}

} // namespace detail

inline SpinorFactorization spinor_phi(const AlgebraPtr& alg, const Subspace& w, int d) {
    const QuadraticForm& q = alg->form();
    if (!q.is_primitive()) fail(ErrorKind::ZeroForm, "spinor factorization of the zero form");
    auto target = ideal_basis(alg, w, d);
    auto source = ideal_basis(alg, w, d - 1);
    auto prev_source = ideal_basis(alg, w, d - 2);
    LinearMatrix phi = detail::clifford_multiplication(source, target);
    LinearMatrix prev = detail::clifford_multiplication(prev_source, source);
    return {q, w, d, std::move(phi), std::move(prev), std::move(source), std::move(target)};
}

inline SpinorFactorization spinor_phi(const QuadraticForm& q, const Subspace& w, int d) {
    return spinor_phi(make_algebra(q), w, d);
}

/// Symbolic check first * second == q * Id.
inline bool factors_form(const LinearMatrix& first, const LinearMatrix& second, const QuadraticForm& q) {
    if (first.cols != second.rows || first.rows != second.cols || first.rows != first.cols) return false;
    if (first.nvars() != q.dim() || second.nvars() != q.dim()) return false;
    const Matrix<Poly> prod = first.to_poly() * second.to_poly();
    const Poly qp = q.to_poly();
    for (std::size_t i = 0; i < prod.rows(); ++i)
        for (std::size_t j = 0; j < prod.cols(); ++j)
            if (prod(i, j) != (i == j ? qp : qp.zero_like())) return false;
    return true;
}

struct PointRank {
    ScalarVector point;
    std::size_t rank = 0;
    bool in_pw_sing = false;
    std::optional<std::size_t> expected;
};

struct MfVerifyReport {
    bool identity_holds = false;
    std::vector<PointRank> point_ranks;
    bool ranks_as_expected = true;   // vacuous when nothing was sampled
};

/// Checks the factorization identity in both orders; over a finite field and
/// given W, samples up to `max_points` points of Q and compares rank first(v)
/// with 2^{n-r-1} off PW cap Sing Q and 0 on it.
inline MfVerifyReport mf_verify(const MatrixFactorization& mf, const std::optional<Subspace>& w = std::nullopt,
                                std::size_t max_points = 4096) {
    MfVerifyReport rep;
    const QuadraticForm& q = mf.form;
    rep.identity_holds = factors_form(mf.first, mf.second, q) && factors_form(mf.second, mf.first, q);
    if (!q.field().is_finite() || !w) return rep;
    const std::size_t n1 = q.dim();
    const std::size_t r = w->dim();
    const Subspace rad = polar_and_radical(q).radical;
    std::size_t seen = 0;
    for_each_projective_point(q.field(), n1, [&](const ScalarVector& v) {
        if (!q(v).is_zero()) return true;
        PointRank pr;
        pr.point = v;
        pr.rank = rank(mf.first.evaluate(v), q.field());
        pr.in_pw_sing = w->contains(v) && rad.contains(v);
        if (pr.in_pw_sing)
            pr.expected = 0;
        else if (n1 >= r + 2)
            pr.expected = std::size_t{1} << (n1 - 1 - r - 1);
        if (pr.expected && *pr.expected != pr.rank) rep.ranks_as_expected = false;
        rep.point_ranks.push_back(std::move(pr));
        return ++seen < max_points;
    });
    return rep;
}

inline MfVerifyReport mf_verify(const SpinorFactorization& s, std::size_t max_points = 4096) {
    return mf_verify(s.pair(), s.W, max_points);
}

struct MfEquivResult {
    bool found = false;
    std::optional<ScalarMatrix> A;
    std::optional<ScalarMatrix> B;
    std::size_t solution_dim = 0;
    std::size_t samples = 0;
    bool probabilistic = false;   // "none" over a small field may be a sampling miss
};

inline constexpr std::size_t kMfEquivSamplesPerRound = 64;
inline constexpr std::size_t kMfEquivRounds = 2;

/// Search for constant invertible (A, B) with B * f = g * A. The solution set
/// is a linear space; random elements of it are tested for invertibility.
inline MfEquivResult mf_equiv(const LinearMatrix& f, const LinearMatrix& g, std::uint64_t seed = 0) {
    if (f.rows != g.rows || f.cols != g.cols || !f.rows || f.rows != f.cols)
        fail(ErrorKind::SizeMismatch, "matrix factorizations of different sizes");
    if (f.field != g.field || f.nvars() != g.nvars()) fail(ErrorKind::FormMismatch, "factorizations over different rings");
    const Field k = f.field;
    const std::size_t n = f.rows;
    MfEquivResult res;
    if (f == g) {
        res.found = true;
        res.A = identity_matrix(k, n);
        res.B = identity_matrix(k, n);
        res.solution_dim = 0;
        return res;
    }
    // unknowns: A(r,c) at r*n+c, B(r,c) at n*n + r*n+c
    const std::size_t nu = 2 * n * n;
    ScalarMatrix sys = zero_matrix(k, 0, nu);
    for (std::size_t v = 0; v < f.nvars(); ++v) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                ScalarVector eq = zero_vector(k, nu);
                for (std::size_t t = 0; t < n; ++t) {
                    eq[n * n + r * n + t] += f.coeff[v](t, c);   // (B f)(r,c)
                    eq[t * n + c] -= g.coeff[v](r, t);           // (g A)(r,c)
                }
                sys.append_row(eq);
            }
    }
    const ScalarMatrix ker = kernel_basis(sys, k);
    res.solution_dim = ker.rows();
    if (ker.rows() == 0) return res;
    std::mt19937_64 rng(seed);
    for (std::size_t round = 0; round < kMfEquivRounds; ++round) {
        for (std::size_t s = 0; s < kMfEquivSamplesPerRound; ++s) {
            ++res.samples;
            ScalarVector x = zero_vector(k, nu);
            for (std::size_t b = 0; b < ker.rows(); ++b) {
                Scalar c = k.is_finite() ? Scalar::random(k, rng)
                                         : Scalar::from_int(k, std::uniform_int_distribution<int>(-5, 5)(rng));
                for (std::size_t u = 0; u < nu; ++u) x[u] += c * ker(b, u);
            }
            ScalarMatrix A = zero_matrix(k, n, n), B = zero_matrix(k, n, n);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) {
                    A(r, c) = x[r * n + c];
                    B(r, c) = x[n * n + r * n + c];
                }
            if (is_invertible(A, k) && is_invertible(B, k)) {
                res.found = true;
                res.A = std::move(A);
                res.B = std::move(B);
                return res;
            }
        }
    }
    res.probabilistic = k.is_finite() && k.order() < 16;
    return res;
}

/// Equivalence of matrix factorizations of the same form (up to a unit
/// scalar c with g.form = c * f.form), tested on the first maps.
inline MfEquivResult mf_equiv(const MatrixFactorization& f, const MatrixFactorization& g, std::uint64_t seed = 0,
                              std::optional<Scalar> unit = std::nullopt) {
    if (f.form.dim() != g.form.dim() || f.form.field() != g.form.field())
        fail(ErrorKind::FormMismatch, "factorizations of forms on different spaces");
    const Scalar c = unit.value_or(Scalar::one(f.form.field()));
    if (c.is_zero()) fail(ErrorKind::FormMismatch, "unit scalar must be nonzero");
    QuadraticForm scaled(f.form.field(), f.form.dim());
    for (std::size_t i = 0; i < f.form.dim(); ++i)
        for (std::size_t j = i; j < f.form.dim(); ++j) scaled.set(i, j, f.form.coeff(i, j) * c);
    if (scaled != g.form) fail(ErrorKind::FormMismatch, "factorizations of different forms");
    return mf_equiv(f.first, g.first, seed);
}

/// Transposed factorization. The first map is phi_d^T, which presents the
/// dual of coker(phi_d); the second is phi_{d+1}^T.
inline MatrixFactorization dual_pair(const SpinorFactorization& s) {
    // phi_{d+1} coincides with phi_{d-1} entrywise (degree-2 periodicity).
    return {s.form, s.phi.transpose(), s.phi_prev.transpose()};
}

// ---------------------------------------------------------------------------
// Special Clifford group

struct SGammaReport {
    bool is_member = false;
    std::optional<CliffordElement> u_inverse;
    std::optional<Subspace> conjugated_W;
    bool ideal_transported = false;
};

/// Solve u * x = 1 in the even subalgebra.
inline std::optional<CliffordElement> even_inverse(const CliffordElement& u) {
    if (!u.even()) fail(ErrorKind::NotEven, "special Clifford group elements are even");
    const auto& alg = u.algebra();
    const Field f = alg->field();
    std::vector<std::uint32_t> evens;
    for (std::uint32_t m = 0; m < alg->size(); ++m)
        if (std::popcount(m) % 2 == 0) evens.push_back(m);
    ScalarMatrix sys = zero_matrix(f, evens.size(), evens.size());
    for (std::size_t c = 0; c < evens.size(); ++c) {
        const auto prod = (u * CliffordElement::monomial(alg, evens[c], Scalar::one(f))).coeffs();
        for (std::size_t r = 0; r < evens.size(); ++r) sys(r, c) = prod[evens[r]];
    }
    ScalarVector rhs = zero_vector(f, evens.size());
    rhs[0] = Scalar::one(f);   // evens[0] == 0, the unit monomial
    auto sol = solve(sys, rhs, f);
    if (!sol) return std::nullopt;
    CliffordElement x(alg, 0);
    ScalarVector coeffs = zero_vector(f, alg->size());
    for (std::size_t i = 0; i < evens.size(); ++i) coeffs[evens[i]] = (*sol)[i];
    x = CliffordElement(alg, -u.degree(), coeffs);
    if (!(x * u == CliffordElement::one(alg))) return std::nullopt;
    return x;
}

inline bool same_span(const CliffordAlgebra& alg, const std::vector<ScalarVector>& a, const std::vector<ScalarVector>& b) {
    return canonical_span(alg, a).first == canonical_span(alg, b).first;
}

inline SGammaReport sgamma(const AlgebraPtr& alg, const CliffordElement& u, const Subspace& w, int d = 0) {
    SGammaReport rep;
    auto inv = even_inverse(u);
    if (!inv) return rep;
    rep.u_inverse = inv;
    const Field f = alg->field();
    const std::size_t n1 = alg->rank();
    std::vector<ScalarVector> images;
    for (std::size_t i = 0; i < n1; ++i) {
        auto c = (u * CliffordElement::generator(alg, i) * *inv).as_vector();
        if (!c) return rep;
        images.push_back(*c);
    }
    rep.is_member = true;
    if (!isotropic_check(alg->form(), w, IsotropyMode::Plain)) return rep;
    std::vector<ScalarVector> conj;
    for (std::size_t i = 0; i < w.dim(); ++i) {
        ScalarVector v = zero_vector(f, n1);
        const auto wi = w.vector(i);
        for (std::size_t k = 0; k < n1; ++k)
            for (std::size_t t = 0; t < n1; ++t) v[t] += wi[k] * images[k][t];
        conj.push_back(std::move(v));
    }
    rep.conjugated_W = Subspace::span(f, n1, conj);
    bool ok = true;
    for (int dd : {d, d + 1}) {
        auto src = ideal_basis(alg, w, dd);
        auto dst = ideal_basis(alg, *rep.conjugated_W, dd);
        std::vector<ScalarVector> moved;
        for (const auto& b : src.basis) moved.push_back((b * *inv).coeffs());
        ok = ok && same_span(*alg, moved, dst.vectors()) && span_rank(*alg, moved) == src.dim();
    }
    rep.ideal_transported = ok;
    return rep;
}

inline SGammaReport sgamma(const QuadraticForm& q, const CliffordElement& u, const Subspace& w, int d = 0) {
    if (u.algebra()->form() != q) fail(ErrorKind::FormMismatch, "u lives over another form");
    return sgamma(u.algebra(), u, w, d);
}

// ---------------------------------------------------------------------------
// Hyperplane sections and cones

struct HyperplaneIdealReport {
    std::size_t dim_I = 0;          // dim I_d
    std::size_t dim_I_sub = 0;      // dim I'_d
    std::size_t dim_I_sub_prev = 0; // dim I'_{d-1}
    bool sub_contained = false;     // I'_d inside I_d
    bool sub_matches_subalgebra = false;  // I'_d computed in Cl(E') agrees
    bool complement_spans = false;  // I'_d + e_h I'_{d-1} = I_d, direct
    bool dims_add = false;
    bool ok() const { return sub_contained && sub_matches_subalgebra && complement_spans && dims_add; }
};

/// E' must be a coordinate hyperplane span{e_i : i != h}.
inline HyperplaneIdealReport hyperplane_ideal_check(const QuadraticForm& q, const Subspace& e_sub, const Subspace& w, int d) {
    const Field f = q.field();
    const std::size_t n1 = q.dim();
    if (w.ambient() != n1) fail(ErrorKind::DimensionMismatch, "W does not live in the form's space");
    if (e_sub.ambient() != n1 || e_sub.dim() + 1 != n1 || !e_sub.is_coordinate())
        fail(ErrorKind::NotCoordinate, "E' must be a coordinate hyperplane");
    if (!e_sub.contains(w)) fail(ErrorKind::NotContained, "W is not contained in E'");
    std::size_t h = 0;
    while (h < n1 && std::find(e_sub.pivots().begin(), e_sub.pivots().end(), h) != e_sub.pivots().end()) ++h;
    const std::uint32_t hbit = 1u << h;

    auto alg = make_algebra(q);
    const CliffordElement g = top_wedge(alg, w);
    const int r = static_cast<int>(w.dim());
    auto sub_span = [&](int dd) {
        std::vector<ScalarVector> vs;
        for (std::uint32_t m = 0; m < alg->size(); ++m) {
            if ((m & hbit) || (std::popcount(m) - (dd - r)) % 2 != 0) continue;
            vs.push_back((CliffordElement::monomial(alg, m, Scalar::one(f)) * g).coeffs());
        }
        return canonical_span(*alg, vs).first;
    };
    HyperplaneIdealReport rep;
    const auto big = ideal_basis(alg, w, d);
    const auto sub = sub_span(d);
    const auto sub_prev = sub_span(d - 1);
    rep.dim_I = big.dim();
    rep.dim_I_sub = sub.size();
    rep.dim_I_sub_prev = sub_prev.size();
    rep.dims_add = rep.dim_I == rep.dim_I_sub + rep.dim_I_sub_prev;
    rep.sub_contained = std::all_of(sub.begin(), sub.end(), [&](const ScalarVector& v) {
        return big.coordinates(CliffordElement(alg, d, v)).has_value();
    });

    // Independent computation inside Cl(E', q') and transport by index embedding.
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n1; ++i)
        if (i != h) keep.push_back(i);
    ScalarMatrix basis_sub = zero_matrix(f, 0, n1);
    for (auto i : keep) basis_sub.append_row(unit_vector(f, n1, i));
    const QuadraticForm q_sub = q.restrict(basis_sub);
    std::vector<ScalarVector> w_sub_rows;
    for (std::size_t i = 0; i < w.dim(); ++i) {
        ScalarVector v = zero_vector(f, keep.size());
        for (std::size_t t = 0; t < keep.size(); ++t) v[t] = w.basis()(i, keep[t]);
        w_sub_rows.push_back(std::move(v));
    }
    const auto sub_ideal = ideal_basis(make_algebra(q_sub), Subspace::span(f, keep.size(), w_sub_rows), d);
    std::vector<ScalarVector> transported;
    for (const auto& b : sub_ideal.basis) {
        ScalarVector v = zero_vector(f, alg->size());
        for (std::uint32_t m = 0; m < b.coeffs().size(); ++m) {
            if (b.coeffs()[m].is_zero()) continue;
            std::uint32_t big_mask = 0;
            for (std::size_t t = 0; t < keep.size(); ++t)
                if (m & (1u << t)) big_mask |= 1u << keep[t];
            v[big_mask] = b.coeffs()[m];
        }
        transported.push_back(std::move(v));
    }
    rep.sub_matches_subalgebra = same_span(*alg, transported, sub);

    std::vector<ScalarVector> all = sub;
    const CliffordElement eh = CliffordElement::generator(alg, h);
    for (const auto& v : sub_prev) all.push_back((eh * CliffordElement(alg, d - 1, v)).coeffs());
    rep.complement_spans = span_rank(*alg, all) == all.size() && same_span(*alg, all, big.vectors());
    return rep;
}

struct ConeIdealReport {
    std::size_t c = 0;
    std::size_t dim_I_shifted = 0;  // dim I_{d+c}
    std::size_t dim_I_bar = 0;      // dim of the quotient ideal in degree d
    bool well_defined = false;      // relations among spanning sets are preserved
    bool bijective = false;
    QuadraticForm quotient_form;
    Subspace quotient_W;
    bool ok() const { return well_defined && bijective && dim_I_shifted == dim_I_bar; }
};

/// K in the radical (b(K, E) = 0 and q|K = 0), K inside the isotropic W.
/// Compares the presentations of I_{d+c} and of the ideal of W/K in degree d.
inline ConeIdealReport cone_ideal_check(const QuadraticForm& q, const Subspace& kk, const Subspace& w, int d) {
    const Field f = q.field();
    const std::size_t n1 = q.dim();
    if (kk.ambient() != n1 || w.ambient() != n1) fail(ErrorKind::DimensionMismatch, "subspaces in the wrong space");
    const Subspace rad = polar_and_radical(q).radical;
    if (!rad.contains(kk) || !isotropic_check(q, kk, IsotropyMode::Plain))
        fail(ErrorKind::NotInRadical, "K is not inside the radical of q");
    if (!w.contains(kk)) fail(ErrorKind::NotContaining, "W does not contain K");
    if (!isotropic_check(q, w, IsotropyMode::Plain)) fail(ErrorKind::NotIsotropic, "W is not isotropic");

    const std::size_t c = kk.dim();
    std::vector<std::size_t> keep;   // non-pivot coordinates of K give E/K
    for (std::size_t j = 0; j < n1; ++j)
        if (std::find(kk.pivots().begin(), kk.pivots().end(), j) == kk.pivots().end()) keep.push_back(j);
    const std::size_t nbar = keep.size();
    // projection of each e_j onto E/K in the basis of kept coordinates
    std::vector<ScalarVector> proj(n1, zero_vector(f, nbar));
    for (std::size_t t = 0; t < nbar; ++t) proj[keep[t]][t] = Scalar::one(f);
    for (std::size_t row = 0; row < c; ++row) {
        const std::size_t p = kk.pivots()[row];
        for (std::size_t t = 0; t < nbar; ++t) proj[p][t] = -kk.basis()(row, keep[t]);
    }
    ScalarMatrix keep_basis = zero_matrix(f, 0, n1);
    for (auto j : keep) keep_basis.append_row(unit_vector(f, n1, j));
    const QuadraticForm qbar = q.restrict(keep_basis);

    auto project = [&](std::span<const Scalar> v) {
        ScalarVector out = zero_vector(f, nbar);
        for (std::size_t j = 0; j < n1; ++j)
            if (!v[j].is_zero())
                for (std::size_t t = 0; t < nbar; ++t) out[t] += v[j] * proj[j][t];
        return out;
    };

    // W basis with K first: extend a K basis by W basis vectors.
    std::vector<ScalarVector> w_rest;
    {
        Subspace acc = kk;
        for (std::size_t i = 0; i < w.dim(); ++i) {
            const auto v = w.vector(i);
            if (acc.contains(v)) continue;
            w_rest.push_back(v);
            acc = acc + Subspace::span(f, n1, std::vector<ScalarVector>{v});
        }
    }
    std::vector<ScalarVector> wbar_rows;
    for (const auto& v : w_rest) wbar_rows.push_back(project(v));
    const Subspace wbar = Subspace::span(f, nbar, wbar_rows);

    auto alg = make_algebra(q);
    auto alg_bar = make_algebra(qbar);
    CliffordElement det_w = CliffordElement::one(alg);
    for (std::size_t i = 0; i < c; ++i) det_w = det_w * CliffordElement::vector(alg, kk.vector(i));
    for (const auto& v : w_rest) det_w = det_w * CliffordElement::vector(alg, v);
    CliffordElement det_wbar = CliffordElement::one(alg_bar);
    for (const auto& v : wbar_rows) det_wbar = det_wbar * CliffordElement::vector(alg_bar, v);

    // image of e_S under Cl(E) -> Cl(E/K)
    auto phi_mono = [&](std::uint32_t m) {
        CliffordElement x = CliffordElement::one(alg_bar);
        for (std::size_t j = 0; j < n1; ++j)
            if (m & (1u << j)) x = x * CliffordElement::vector(alg_bar, proj[j]);
        return x;
    };

    const int r = static_cast<int>(w.dim());
    std::vector<ScalarVector> ys, ybars;
    for (std::uint32_t m = 0; m < alg->size(); ++m) {
        if ((std::popcount(m) - (d + static_cast<int>(c) - r)) % 2 != 0) continue;
        ys.push_back((CliffordElement::monomial(alg, m, Scalar::one(f)) * det_w).coeffs());
        ybars.push_back((phi_mono(m) * det_wbar).coeffs());
    }
    ConeIdealReport rep{c, 0, 0, false, false, qbar, wbar};
    const auto big = ideal_basis(alg, w, d + static_cast<int>(c));
    const auto small = ideal_basis(alg_bar, wbar, d);
    rep.dim_I_shifted = big.dim();
    rep.dim_I_bar = small.dim();

    // relations among ys must hold among ybars: ker(Y) subset of ker(Ybar)
    auto as_matrix = [&](const std::vector<ScalarVector>& vs, std::size_t len) {
        ScalarMatrix m = zero_matrix(f, len, vs.size());
        for (std::size_t col = 0; col < vs.size(); ++col)
            for (std::size_t row = 0; row < len; ++row) m(row, col) = vs[col][row];
        return m;
    };
    const ScalarMatrix ymat = as_matrix(ys, alg->size());
    const ScalarMatrix ybarmat = as_matrix(ybars, alg_bar->size());
    const ScalarMatrix rel = kernel_basis(ymat, f);
    bool preserved = true;
    for (std::size_t i = 0; i < rel.rows() && preserved; ++i) {
        const auto image = mat_vec(ybarmat, rel.row(i), f);
        preserved = std::all_of(image.begin(), image.end(), [](const Scalar& s) { return s.is_zero(); });
    }
    rep.well_defined = preserved;
    rep.bijective = span_rank(*alg_bar, ybars) == span_rank(*alg, ys) && same_span(*alg_bar, ybars, small.vectors()) &&
                    span_rank(*alg, ys) == big.dim();
    return rep;
}

} // namespace qbundle
