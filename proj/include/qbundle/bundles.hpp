#pragma once

// Quadric bundles q: E -> L over P^m with E = sum O(a_i), L = O(l), given by
// an upper triangular matrix of homogeneous polynomials in y0..ym.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qbundle/exactalg.hpp"
#include "qbundle/quadform.hpp"

namespace qbundle {

class QuadricBundleData {
public:
    /// Validates that entry (i,j) is homogeneous of degree l - a_i - a_j.
    static QuadricBundleData make(Field f, std::size_t base_dim, std::vector<int> twists, int l,
                                  const std::map<std::pair<std::size_t, std::size_t>, Poly>& entries) {
        QuadricBundleData b(f, base_dim, std::move(twists), l);
        for (const auto& [ij, p] : entries) b.set(ij.first, ij.second, p);
        return b;
    }

    QuadricBundleData(Field f, std::size_t base_dim, std::vector<int> twists, int l)
        : field_(f), base_dim_(base_dim), twists_(std::move(twists)), l_(l),
          vars_(indexed_vars("y", base_dim + 1)),
          upper_(twists_.size(), twists_.size(), Poly(f, vars_)) {
        if (twists_.empty()) fail(ErrorKind::DimensionMismatch, "bundle of rank 0");
    }

    Field field() const { return field_; }
    std::size_t base_dim() const { return base_dim_; }
    std::size_t fiber_rank() const { return twists_.size(); }
    const std::vector<int>& twists() const { return twists_; }
    int l() const { return l_; }
    const VarList& base_vars() const { return vars_; }

    int entry_degree(std::size_t i, std::size_t j) const { return l_ - twists_[i] - twists_[j]; }

    const Poly& entry(std::size_t i, std::size_t j) const { return i <= j ? upper_(i, j) : upper_(j, i); }

    void set(std::size_t i, std::size_t j, const Poly& p) {
        if (i > j) std::swap(i, j);
        if (j >= fiber_rank()) fail(ErrorKind::DimensionMismatch, "entry index out of range");
        if (p.ctx() != field_ || !same_vars(p.vars(), vars_))
            fail(ErrorKind::RingMismatch, "entry is not a polynomial in the base coordinates");
        if (!p.is_zero()) {
            const int d = entry_degree(i, j);
            if (!p.is_homogeneous())
                fail(ErrorKind::NotHomogeneous, "entry " + std::to_string(i) + " " + std::to_string(j) + " is not homogeneous");
            if (d < 0 || !p.is_homogeneous_of_degree(d))
                fail(ErrorKind::DegreeMismatch, "entry " + std::to_string(i) + " " + std::to_string(j) + " must have degree " +
                                                    std::to_string(d) + ", got " + std::to_string(p.total_degree()));
        }
        upper_(i, j) = p;
    }

    /// Symmetric polar matrix: 2 a_ii on the diagonal, a_ij off it.
    Matrix<Poly> polar_matrix() const {
        const std::size_t n1 = fiber_rank();
        Matrix<Poly> b(n1, n1, Poly(field_, vars_));
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n1; ++j) b(i, j) = i == j ? upper_(i, i) + upper_(i, i) : entry(i, j);
        return b;
    }

    /// Fiber over a point whose coordinates lie in the base field or in an
    /// extension of it.
    QuadraticForm fiber(std::span<const Scalar> point) const {
        if (point.size() != base_dim_ + 1) fail(ErrorKind::DimensionMismatch, "base point has wrong length");
        const Field k = point[0].field();
        for (const auto& c : point)
            if (c.field() != k) fail(ErrorKind::RingMismatch, "mixed fields in base point");
        if (std::all_of(point.begin(), point.end(), [](const Scalar& s) { return s.is_zero(); }))
            fail(ErrorKind::ZeroPoint, "base point is zero");
        QuadraticForm q(k, fiber_rank());
        for (std::size_t i = 0; i < fiber_rank(); ++i)
            for (std::size_t j = i; j < fiber_rank(); ++j) {
                const Poly& p = upper_(i, j);
                if (p.is_zero()) continue;
                q.set(i, j, k == field_ ? p.evaluate(point) : embed(p, k).evaluate(point));
            }
        return q;
    }

    bool operator==(const QuadricBundleData& o) const {
        return field_ == o.field_ && base_dim_ == o.base_dim_ && twists_ == o.twists_ && l_ == o.l_ && upper_ == o.upper_;
    }

    std::string to_string() const {
        std::string out = "field " + field_.spec() + "\nbase_dim " + std::to_string(base_dim_) + "\nfiber_rank " +
                          std::to_string(fiber_rank()) + "\ntwists";
        for (int a : twists_) out += " " + std::to_string(a);
        out += "\nL " + std::to_string(l_) + "\n";
        for (std::size_t i = 0; i < fiber_rank(); ++i)
            for (std::size_t j = i; j < fiber_rank(); ++j)
                if (!upper_(i, j).is_zero())
                    out += "entry " + std::to_string(i) + " " + std::to_string(j) + ": " + upper_(i, j).to_string() + "\n";
        return out;
    }

private:
    Field field_;
    std::size_t base_dim_;
    std::vector<int> twists_;
    int l_;
    VarList vars_;
    Matrix<Poly> upper_;
};

inline std::pair<QuadraticForm, CorankReport> fiber_and_corank(const QuadricBundleData& bundle, std::span<const Scalar> point) {
    QuadraticForm q = bundle.fiber(point);
    if (!q.is_primitive()) fail(ErrorKind::NonPrimitiveFiber, "fiber form vanishes identically");
    auto rep = corank(q);
    return {std::move(q), std::move(rep)};
}

/// Nonzero (n+2-c)-minors of the polar matrix; they generate the bilinear
/// corank >= c ideal. c = 0 gives no generators.
inline std::vector<Poly> stratum_minors(const QuadricBundleData& bundle, std::size_t c) {
    const std::size_t n1 = bundle.fiber_rank();
    if (c > n1) fail(ErrorKind::DimensionMismatch, "corank exceeds fiber rank");
    std::vector<Poly> out;
    if (c == 0) return out;
    const std::size_t k = n1 + 1 - c;
    const Matrix<Poly> b = bundle.polar_matrix();
    std::vector<std::vector<std::size_t>> subsets;
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == k) {
            subsets.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n1; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    std::set<std::string> seen;
    for (const auto& rows : subsets)
        for (const auto& cols : subsets) {
            Matrix<Poly> sub(k, k, b(0, 0).zero_like());
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) sub(i, j) = b(rows[i], cols[j]);
            Poly m = determinant(sub);
            if (m.is_zero()) continue;
            if (seen.insert(m.to_string()).second) out.push_back(std::move(m));
        }
    return out;
}

/// z^2 - beta z + gamma, with beta^2 - 4 gamma = sigma * det(b).
template <class P>
struct DiscriminantData {
    P beta;
    P gamma;
    int sigma = 1;

    std::string cover_relation() const {
        auto wrap = [](const P& p) { return p.size() > 1 ? "(" + p.to_string() + ")" : p.to_string(); };
        std::string out = "z^2";
        if (beta == beta.one_like())
            out += " - z";
        else if (beta == -beta.one_like())
            out += " + z";
        else if (beta.size() == 1 && (-beta).to_string()[0] != '-')
            out += " + " + (-beta).to_string() + "*z";
        else if (!beta.is_zero())
            out += " - " + wrap(beta) + "*z";
        if (gamma.size() == 1 && (-gamma).to_string()[0] != '-')
            out += " - " + (-gamma).to_string();
        else if (!gamma.is_zero())
            out += " + " + wrap(gamma);
        return out;
    }
};

inline constexpr std::size_t kMaxUniversalRank = 8;

/// Indeterminates of the universal form of rank 2m: xi0..xi{2m-1} for the
/// squares, then xi{i}{j} (i < j) for the cross terms in lexicographic order.
inline VarList universal_vars(std::size_t rank) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < rank; ++i) names.push_back("xi" + std::to_string(i));
    for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t j = i + 1; j < rank; ++j) names.push_back("xi" + std::to_string(i) + std::to_string(j));
    return make_vars(std::move(names));
}

inline std::size_t universal_cross_index(std::size_t rank, std::size_t i, std::size_t j) {
    std::size_t idx = rank;
    for (std::size_t a = 0; a < rank; ++a)
        for (std::size_t b = a + 1; b < rank; ++b, ++idx)
            if (a == i && b == j) return idx;
    fail(ErrorKind::DimensionMismatch, "bad cross index");
}

inline DiscriminantData<IntPoly> universal_disc(std::size_t rank) {
    if (rank == 0 || rank % 2 != 0) fail(ErrorKind::OddRank, "universal discriminant needs even positive rank");
    if (rank > kMaxUniversalRank) fail(ErrorKind::TooLarge, "universal discriminant limited to rank 8");
    const std::size_t m = rank / 2;
    const VarList vars = universal_vars(rank);
    const IntegerRing zz;
    const IntPoly zero(zz, vars);
    auto var = [&](std::size_t idx) { return IntPoly::variable(zz, vars, idx); };

    Matrix<IntPoly> alt(rank, rank, zero);
    Matrix<IntPoly> b(rank, rank, zero);
    for (std::size_t i = 0; i < rank; ++i) {
        b(i, i) = var(i).scale(2);
        for (std::size_t j = i + 1; j < rank; ++j) {
            const IntPoly x = var(universal_cross_index(rank, i, j));
            alt(i, j) = x;
            alt(j, i) = -x;
            b(i, j) = x;
            b(j, i) = x;
        }
    }
    IntPoly beta = pfaffian(alt);
    if (m % 2 == 1) beta = -beta;
    const IntPoly det = determinant(b);
    const IntPoly sq = beta * beta;
    std::optional<DiscriminantData<IntPoly>> found;
    for (int sigma : {-1, 1}) {
        try {
            IntPoly gamma = exact_int_div(sigma > 0 ? sq - det : sq + det, 4);
            if (found) fail(ErrorKind::NoValidSign, "both signs give an integral discriminant");
            found = DiscriminantData<IntPoly>{beta, std::move(gamma), sigma};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotDivisible) throw;
        }
    }
    if (!found) fail(ErrorKind::NoValidSign, "no sign makes beta^2 - sigma*det(b) divisible by 4");
    return *found;
}

/// Specialization of the universal discriminant to an even-rank bundle.
inline DiscriminantData<Poly> bundle_disc(const QuadricBundleData& bundle) {
    const std::size_t rank = bundle.fiber_rank();
    if (rank % 2 != 0) fail(ErrorKind::OddRank, "discriminant algebra needs even fiber rank");
    const auto uni = universal_disc(rank);
    std::vector<Poly> images;
    for (std::size_t i = 0; i < rank; ++i) images.push_back(bundle.entry(i, i));
    for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t j = i + 1; j < rank; ++j) images.push_back(bundle.entry(i, j));
    const Field f = bundle.field();
    auto conv = [f](const Integer& c) { return Scalar::from_mpz(f, c); };
    return {uni.beta.substitute<Scalar>(images, conv), uni.gamma.substitute<Scalar>(images, conv), uni.sigma};
}

// ---------------------------------------------------------------------------
// Hyperbolic reduction of bundles along constant coordinate subbundles

namespace detail {

using PolyVector = std::vector<Poly>;

inline Poly bundle_polar(const QuadricBundleData& bd, const PolyVector& v, const PolyVector& w) {
    Poly acc = bd.entry(0, 0).zero_like();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_zero()) continue;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (w[j].is_zero()) continue;
            const Poly& a = bd.entry(i, j);
            if (a.is_zero()) continue;
            acc += i == j ? (a + a) * v[i] * w[j] : a * v[i] * w[j];
        }
    }
    return acc;
}

inline Poly bundle_value(const QuadricBundleData& bd, const PolyVector& v) {
    Poly acc = bd.entry(0, 0).zero_like();
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i; j < v.size(); ++j)
            if (!v[i].is_zero() && !v[j].is_zero() && !bd.entry(i, j).is_zero()) acc += bd.entry(i, j) * v[i] * v[j];
    return acc;
}

/// One reduction step along e_k2 with unit pivot e_k1.
inline QuadricBundleData reduce_step(const QuadricBundleData& bd, std::size_t k2, std::size_t k1) {
    const std::size_t n1 = bd.fiber_rank();
    const Field f = bd.field();
    const Poly zero = bd.entry(0, 0).zero_like();
    const Scalar c = bd.entry(k1, k2).constant_term();
    const Scalar cinv = c.inverse();
    auto unit = [&](std::size_t i, const Poly& coeff) {
        PolyVector v(n1, zero);
        v[i] = coeff;
        return v;
    };
    const PolyVector fv = unit(k2, zero.one_like());
    // v = e_k1 / c - (a_k1k1 / c^2) f, so that b(f, v) = 1 and q(v) = 0
    PolyVector v(n1, zero);
    v[k1] = zero.constant_like(cinv);
    v[k2] = -bd.entry(k1, k1).scale(cinv * cinv);
    auto project = [&](const PolyVector& w) {
        const Poly bw_v = bundle_polar(bd, w, v);
        const Poly bw_f = bundle_polar(bd, w, fv);
        PolyVector out = w;
        for (std::size_t i = 0; i < n1; ++i) out[i] = out[i] - bw_v * fv[i] - bw_f * v[i];
        return out;
    };
    std::vector<std::size_t> keep;
    std::vector<int> twists;
    for (std::size_t i = 0; i < n1; ++i)
        if (i != k1 && i != k2) {
            keep.push_back(i);
            twists.push_back(bd.twists()[i]);
        }
    std::vector<PolyVector> images;
    for (auto i : keep) images.push_back(project(unit(i, zero.one_like())));
    QuadricBundleData out(f, bd.base_dim(), twists, bd.l());
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = a; b < keep.size(); ++b)
            out.set(a, b, a == b ? bundle_value(bd, images[a]) : bundle_polar(bd, images[a], images[b]));
    return out;
}

} // namespace detail

struct BundleReduction {
    QuadricBundleData reduced;
    std::vector<std::pair<std::size_t, std::size_t>> steps;   // (F coordinate, pivot) in original indices
};

/// F must be a coordinate subspace of the fiber with q|F = 0 symbolically.
/// `pivots[i]`, when given, is the pivot coordinate for the i-th vector of F.
inline BundleReduction bundle_reduce(const QuadricBundleData& bundle, const Subspace& fsub,
                                     const std::vector<std::size_t>& pivots = {}) {
    const std::size_t n1 = bundle.fiber_rank();
    if (fsub.ambient() != n1) fail(ErrorKind::DimensionMismatch, "F does not live in the fiber");
    if (!fsub.is_coordinate()) fail(ErrorKind::NotCoordinate, "only coordinate subbundles are supported");
    if (!pivots.empty() && pivots.size() != fsub.dim()) fail(ErrorKind::DimensionMismatch, "one pivot per vector of F");
    const auto& fidx = fsub.pivots();
    for (auto i : fidx)
        for (auto j : fidx)
            if (!bundle.entry(i, j).is_zero())
                fail(ErrorKind::NotIsotropicEverywhere, "q does not vanish on F: entry " + std::to_string(std::min(i, j)) +
                                                            " " + std::to_string(std::max(i, j)));
    // labels[k] = original index of current coordinate k
    std::vector<std::size_t> labels(n1);
    for (std::size_t i = 0; i < n1; ++i) labels[i] = i;
    QuadricBundleData cur = bundle;
    BundleReduction res{bundle, {}};
    std::set<std::size_t> remaining(fidx.begin(), fidx.end());
    for (std::size_t step = 0; step < fidx.size(); ++step) {
        const std::size_t orig_f = fidx[step];
        remaining.erase(orig_f);
        const std::size_t k2 = std::find(labels.begin(), labels.end(), orig_f) - labels.begin();
        auto is_unit = [&](std::size_t k) {
            const Poly& e = cur.entry(k, k2);
            return k != k2 && !e.is_zero() && e.is_constant();
        };
        std::optional<std::size_t> k1;
        if (!pivots.empty()) {
            auto it = std::find(labels.begin(), labels.end(), pivots[step]);
            if (it == labels.end() || remaining.count(pivots[step]) || !is_unit(it - labels.begin()))
                fail(ErrorKind::NoUnitPivot, "pivot " + std::to_string(pivots[step]) + " does not pair to a unit with e" +
                                                 std::to_string(orig_f));
            k1 = it - labels.begin();
        } else {
            for (std::size_t k = 0; k < cur.fiber_rank() && !k1; ++k)
                if (!remaining.count(labels[k]) && is_unit(k)) k1 = k;
            if (!k1) fail(ErrorKind::NoUnitPivot, "no coordinate pairs to a unit with e" + std::to_string(orig_f));
        }
        res.steps.push_back({orig_f, labels[*k1]});
        cur = detail::reduce_step(cur, k2, *k1);
        std::vector<std::size_t> next;
        for (std::size_t k = 0; k < labels.size(); ++k)
            if (k != k2 && k != *k1) next.push_back(labels[k]);
        labels = std::move(next);
    }
    res.reduced = std::move(cur);
    return res;
}

// ---------------------------------------------------------------------------
// Coordinate algebra of a family of binary quadrics

/// Rational function num/den in the base variables and T0, T1.
struct LocalSection {
    Poly numerator;
    Poly denominator;
    std::string to_string() const { return "(" + numerator.to_string() + ")/(" + denominator.to_string() + ")"; }
};

struct BinaryAlgebra {
    Poly beta;
    Poly constant;        // gamma0 * gamma1
    LocalSection on_T1;   // representative of z on D+(T1)
    LocalSection on_T0;   // representative of z on D+(T0)
    std::string relation() const { return DiscriminantData<Poly>{beta, constant, 1}.cover_relation(); }
};

/// mu_* O_M for M = V(gamma0 T0^2 - beta T0 T1 + gamma1 T1^2) in P^1.
inline BinaryAlgebra binary_algebra(const Poly& gamma0, const Poly& beta, const Poly& gamma1) {
    if (!same_vars(gamma0.vars(), beta.vars()) || !same_vars(beta.vars(), gamma1.vars()) || gamma0.ctx() != beta.ctx() ||
        beta.ctx() != gamma1.ctx())
        fail(ErrorKind::RingMismatch, "coefficients over different rings");
    if (gamma0.is_zero() && beta.is_zero() && gamma1.is_zero()) fail(ErrorKind::ZeroForm, "binary form is zero");
    const Field f = beta.ctx();
    std::vector<std::string> names = *beta.vars();
    std::vector<std::size_t> idx(names.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    names.push_back("T0");
    names.push_back("T1");
    const VarList ext = make_vars(names);
    const Poly t0 = Poly::variable(f, ext, names.size() - 2);
    const Poly t1 = Poly::variable(f, ext, names.size() - 1);
    const Poly g0 = gamma0.rename(ext, idx), b = beta.rename(ext, idx), g1 = gamma1.rename(ext, idx);
    return {beta, gamma0 * gamma1, {g0 * t0, t1}, {b * t0 - g1 * t1, t0}};
}

} // namespace qbundle
