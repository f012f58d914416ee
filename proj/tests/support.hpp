#pragma once

// Helpers shared by the test binaries: random inputs and brute-force oracles
// that do not go through the library code they check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qbundle/exactalg.hpp"
#include "qbundle/quadform.hpp"

namespace qbtest {

using namespace qbundle;

inline Scalar rand_scalar(Field f, std::mt19937_64& rng, int qrange = 3) {
    if (f.is_finite()) return Scalar::from_code(f, static_cast<std::uint32_t>(rng() % f.order()));
    std::uniform_int_distribution<int> d(-qrange, qrange);
    return Scalar::from_int(f, d(rng));
}

inline ScalarVector rand_vector(Field f, std::size_t n, std::mt19937_64& rng) {
    ScalarVector v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(rand_scalar(f, rng));
    return v;
}

/// Random coefficient table; each a_ij is nonzero with probability ~density.
inline QuadraticForm rand_form(Field f, std::size_t n, std::mt19937_64& rng, double density = 0.6) {
    QuadraticForm q(f, n);
    std::bernoulli_distribution keep(density);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (keep(rng)) q.set(i, j, rand_scalar(f, rng));
    return q;
}

/// q(v) straight from the polynomial, no polar matrix involved.
inline Scalar eval_form(const QuadraticForm& q, const ScalarVector& v) { return q.to_poly().evaluate(std::span<const Scalar>(v)); }

/// Random isotropic subspace of dimension r over a finite field, grown one
/// vector at a time inside the orthogonal of what is already chosen.
inline std::optional<Subspace> rand_isotropic(const QuadraticForm& q, std::size_t r, std::mt19937_64& rng, bool regular,
                                              int tries = 400) {
    const Field f = q.field();
    for (int attempt = 0; attempt < tries; ++attempt) {
        std::vector<ScalarVector> vs;
        for (int inner = 0; inner < 200 && vs.size() < r; ++inner) {
            ScalarVector v = rand_vector(f, q.dim(), rng);
            if (!q(v).is_zero()) continue;
            bool ok = true;
            for (const auto& w : vs) ok = ok && q.polar(v, w).is_zero();
            if (!ok) continue;
            auto cand = vs;
            cand.push_back(v);
            Subspace s = Subspace::span(f, q.dim(), cand);
            if (s.dim() != cand.size()) continue;
            if (regular && !isotropic_check(q, s, IsotropyMode::Regular)) continue;
            vs = std::move(cand);
        }
        if (vs.size() == r) return Subspace::span(f, q.dim(), vs);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Prime-field oracles on plain integers.

using IMat = std::vector<std::vector<long long>>;

inline long long mod(long long a, long long p) { return ((a % p) + p) % p; }

inline long long inv_mod(long long a, long long p) {
    long long r = 1, b = mod(a, p), e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

inline std::size_t rank_mod(IMat m, long long p) {
    std::size_t r = 0;
    const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && mod(m[piv][c], p) == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[r]);
        const long long iv = inv_mod(m[r][c], p);
        for (auto& x : m[r]) x = mod(x * iv, p);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && mod(m[i][c], p) != 0) {
                const long long t = m[i][c];
                for (std::size_t j = 0; j < cols; ++j) m[i][j] = mod(m[i][j] - t * m[r][j], p);
            }
        ++r;
    }
    return r;
}

/// Integer coefficient table (upper) of a form over F_p.
inline IMat upper_ints(const QuadraticForm& q) {
    const std::size_t n = q.dim();
    IMat a(n, std::vector<long long>(n, 0));
    const Poly poly = q.to_poly();
    for (const auto& [m, c] : poly.terms()) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            for (unsigned e = 0; e < m.exps[i]; ++e) idx.push_back(i);
        a[idx[0]][idx[1]] = c.code();
    }
    return a;
}

inline long long qval(const IMat& a, const std::vector<long long>& v, long long p) {
    long long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i; j < a.size(); ++j) s += a[i][j] * v[i] % p * v[j];
    return mod(s, p);
}

/// Calls fn on every vector of F_p^n.
template <class Fn>
void for_each_vector(long long p, std::size_t n, Fn&& fn) {
    std::vector<long long> v(n, 0);
    for (;;) {
        fn(v);
        std::size_t i = 0;
        while (i < n && ++v[i] == p) v[i++] = 0;
        if (i == n) return;
    }
}

/// #Q(F_p) by looping over all nonzero vectors.
inline std::size_t brute_point_count(const QuadraticForm& q) {
    const long long p = q.field().characteristic();
    const IMat a = upper_ints(q);
    std::size_t zeros = 0;
    for_each_vector(p, q.dim(), [&](const std::vector<long long>& v) {
        if (std::any_of(v.begin(), v.end(), [](long long x) { return x != 0; }) && qval(a, v, p) == 0) ++zeros;
    });
    return zeros / static_cast<std::size_t>(p - 1);
}

// ---------------------------------------------------------------------------
// Word-rewriting Clifford product: an independent oracle for cl_mul.
// Elements are maps from sorted index words to coefficients.

using Word = std::vector<std::size_t>;
using CliffMap = std::map<Word, Scalar>;

inline void add_to(CliffMap& out, const Word& w, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = out.find(w);
    if (it == out.end()) {
        out.emplace(w, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) out.erase(it);
    }
}

/// Normal form of c * e_{w[0]} ... e_{w[k]} using e_i e_i = a_ii and
/// e_i e_j = b_ij - e_j e_i for i > j.
inline void reduce_word(const QuadraticForm& q, const Word& w, const Scalar& c, CliffMap& out) {
    if (c.is_zero()) return;
    const ScalarMatrix b = q.polar_matrix();
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        if (w[k] == w[k + 1]) {
            Word rest(w.begin(), w.begin() + k);
            rest.insert(rest.end(), w.begin() + k + 2, w.end());
            // a_ii read from the polynomial: b_ii = 2 a_ii loses it in char 2
            reduce_word(q, rest, c * q.to_poly().coefficient(Monomial::unit(q.dim(), w[k], 2)), out);
            return;
        }
        if (w[k] > w[k + 1]) {
            Word swapped = w;
            std::swap(swapped[k], swapped[k + 1]);
            reduce_word(q, swapped, -c, out);
            Word rest(w.begin(), w.begin() + k);
            rest.insert(rest.end(), w.begin() + k + 2, w.end());
            reduce_word(q, rest, c * b(w[k], w[k + 1]), out);
            return;
        }
    }
    add_to(out, w, c);
}

inline CliffMap oracle_mul(const QuadraticForm& q, const CliffMap& x, const CliffMap& y) {
    CliffMap out;
    for (const auto& [w1, c1] : x)
        for (const auto& [w2, c2] : y) {
            Word w = w1;
            w.insert(w.end(), w2.begin(), w2.end());
            reduce_word(q, w, c1 * c2, out);
        }
    return out;
}

// ---------------------------------------------------------------------------
// The (q, W) grid for matrix-factorization checks: dims 2, 4, 5, 6, every
// isotropic rank, fields Q, F_2, F_3, F_5.

struct GridCase {
    QuadraticForm q;
    Subspace w;
    std::string label;
};

inline std::vector<GridCase> mf_grid() {
    std::vector<GridCase> out;
    struct Shape {
        const char* q;
        std::size_t n;
        std::vector<std::vector<std::vector<int>>> ws;   // subspaces as lists of rows
    };
    auto e = [](std::size_t n, std::vector<std::size_t> idx) {
        std::vector<std::vector<int>> rows;
        for (auto i : idx) {
            std::vector<int> r(n, 0);
            r[i] = 1;
            rows.push_back(r);
        }
        return rows;
    };
    const std::vector<Shape> shapes{
        {"x0*x1", 2, {e(2, {0}), e(2, {1})}},
        {"x0*x1 + x2*x3", 4, {e(4, {0}), e(4, {0, 2}), e(4, {1, 3}), {{1, 0, 1, 0}}, {{1, 0, 1, 0}, {0, -1, 0, 1}}}},
        {"x0*x1 + x2*x3 + x4^2", 5, {e(5, {0}), e(5, {0, 2}), {{1, 0, 1, 0, 0}, {0, -1, 0, 1, 0}}}},
        {"x0*x1 + x2*x3", 5, {e(5, {4}), e(5, {0, 4}), e(5, {0, 2, 4}), e(5, {0, 2})}},
        {"x0*x1 + x2*x3 + x4*x5", 6,
         {e(6, {0}), e(6, {0, 2}), e(6, {0, 2, 4}), e(6, {1, 3, 5}), {{1, 0, 1, 0, 0, 0}, {0, -1, 0, 1, 0, 0}, {0, 0, 0, 0, 1, 0}}}},
    };
    for (Field f : {Field::rationals(), Field::prime(2), Field::prime(3), Field::prime(5)})
        for (const auto& s : shapes) {
            const QuadraticForm q = QuadraticForm::parse(s.q, f, s.n);
            for (const auto& rows : s.ws) {
                std::vector<ScalarVector> vs;
                for (const auto& r : rows) {
                    ScalarVector v;
                    for (int x : r) v.push_back(Scalar::from_int(f, x));
                    vs.push_back(v);
                }
                Subspace w = Subspace::span(f, s.n, vs);
                out.push_back({q, w, f.spec() + " " + s.q + " r=" + std::to_string(w.dim())});
            }
        }
    return out;
}

} // namespace qbtest
