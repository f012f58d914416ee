#pragma once

// Cubic fourfolds containing the plane V(y0,y1,y2): decomposition by
// x-degree, the quadric surface bundle obtained by projecting from the
// plane, its discriminant cover, and the two-planes K3 model.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qbundle/bundles.hpp"
#include "qbundle/exactalg.hpp"

namespace qbundle {

/// Variables of P^5 in the order x0, x1, x2, y0, y1, y2.
inline VarList cubic_vars() { return make_vars({"x0", "x1", "x2", "y0", "y1", "y2"}); }

struct CubicWithPlane {
    Field field;
    Poly f;                       // in cubic_vars()
    Poly g;                       // cubic in y
    std::array<Poly, 3> q;        // quadrics in y
    std::array<std::array<Poly, 3>, 3> l;   // l[i][j], i <= j, linear in y; l[j][i] mirrors it

    /// g + sum q_i x_i + sum_{i<=j} l_ij x_i x_j as a polynomial in x, y.
    Poly recompose() const {
        const VarList v = f.vars();
        const std::vector<std::size_t> ymap{3, 4, 5};
        auto lift = [&](const Poly& p) { return p.rename(v, ymap); };
        auto x = [&](std::size_t i) { return Poly::variable(field, v, i); };
        Poly out = lift(g);
        for (std::size_t i = 0; i < 3; ++i) {
            out += lift(q[i]) * x(i);
            for (std::size_t j = i; j < 3; ++j) out += lift(l[i][j]) * x(i) * x(j);
        }
        return out;
    }

    bool linear_block_zero() const {
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i; j < 3; ++j)
                if (!l[i][j].is_zero()) return false;
        return true;
    }
};

namespace detail {

inline void check_cubic(const Poly& f) {
    if (f.nvars() != 6 || !same_vars(f.vars(), cubic_vars()))
        fail(ErrorKind::RingMismatch, "cubic must be a polynomial in x0,x1,x2,y0,y1,y2");
    if (f.is_zero() || !f.is_homogeneous_of_degree(3)) fail(ErrorKind::NotCubic, "f is not a homogeneous cubic");
}

inline unsigned x_degree(const Monomial& m) { return m.exps[0] + m.exps[1] + m.exps[2]; }

} // namespace detail

inline CubicWithPlane extract(const Poly& f) {
    detail::check_cubic(f);
    const Field k = f.ctx();
    std::string offending;
    for (const auto& [m, c] : f.terms())
        if (detail::x_degree(m) == 3) offending += (offending.empty() ? "" : ", ") + f.monomial_string(m);
    if (!offending.empty()) fail(ErrorKind::PlaneNotContained, "monomials of x-degree 3: " + offending);

    const VarList yv = indexed_vars("y", 3);
    const Poly zero(k, yv);
    const std::array<Poly, 3> zrow{zero, zero, zero};
    CubicWithPlane c{k, f, zero, zrow, {zrow, zrow, zrow}};
    for (const auto& [m, coeff] : f.terms()) {
        Monomial ym(3);
        for (std::size_t i = 0; i < 3; ++i) ym.exps[i] = m.exps[3 + i];
        std::vector<std::size_t> xs;
        for (std::size_t i = 0; i < 3; ++i)
            for (unsigned e = 0; e < m.exps[i]; ++e) xs.push_back(i);
        Poly* slot = xs.empty() ? &c.g : xs.size() == 1 ? &c.q[xs[0]] : &c.l[xs[0]][xs[1]];
        slot->add_term(ym, coeff);
    }
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) c.l[j][i] = c.l[i][j];
    return c;
}

/// Bundle O^3 + O(-1) -> O(1) on P^2 with l_ij in the 3x3 block, q_i in the
/// last column and g in the corner.
inline QuadricBundleData projection_bundle(const CubicWithPlane& c) {
    QuadricBundleData b(c.field, 2, {0, 0, 0, -1}, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i; j < 3; ++j) b.set(i, j, c.l[i][j]);
        b.set(i, 3, c.q[i]);
    }
    b.set(3, 3, c.g);
    return b;
}

struct CubicDiscriminant {
    DiscriminantData<Poly> formula;     // from the closed formula in l, q, g
    DiscriminantData<Poly> universal;   // bundle_disc of the projection bundle
    bool cross_check = false;
    bool degenerate = false;            // z^2 - beta z + gamma has a double root generically
};

/// Closed formula for (beta, gamma) of the projection bundle.
inline DiscriminantData<Poly> cubic_disc_formula(const CubicWithPlane& c) {
    const auto& l = c.l;
    const auto& q = c.q;
    const Poly& g = c.g;
    const Poly beta = l[0][1] * q[2] - l[0][2] * q[1] + l[1][2] * q[0];
    const Poly four = g.constant_like(Scalar::from_int(c.field, 4));
    const Poly gamma = (l[0][0] * l[1][2] * l[1][2] + l[1][1] * l[0][2] * l[0][2] + l[2][2] * l[0][1] * l[0][1] -
                        l[0][1] * l[0][2] * l[1][2] - four * l[0][0] * l[1][1] * l[2][2]) * g +
                       l[0][1] * l[1][2] * q[0] * q[2] + l[1][1] * l[2][2] * q[0] * q[0] + l[0][0] * l[2][2] * q[1] * q[1] +
                       l[0][0] * l[1][1] * q[2] * q[2] - l[0][0] * l[1][2] * q[1] * q[2] - l[1][1] * l[0][2] * q[0] * q[2] -
                       l[2][2] * l[0][1] * q[0] * q[1];
    return {beta, gamma, 1};
}

inline CubicDiscriminant discriminant_cover(const CubicWithPlane& c) {
    CubicDiscriminant out{cubic_disc_formula(c), bundle_disc(projection_bundle(c)), false, false};
    out.formula.sigma = out.universal.sigma;
    const bool beta_ok = out.formula.beta == out.universal.beta || out.formula.beta == -out.universal.beta;
    out.cross_check = beta_ok && out.formula.gamma == out.universal.gamma;
    const Poly four = c.g.constant_like(Scalar::from_int(c.field, 4));
    const Poly disc = out.formula.beta * out.formula.beta - four * out.formula.gamma;
    if (c.field.characteristic() != 2) {
        out.degenerate = disc.is_zero();
    } else {
        // z^2 = gamma over a perfect field: a double root iff gamma is a square
        bool square = true;
        for (const auto& [m, coeff] : out.formula.gamma.terms())
            for (auto e : m.exps) square = square && e % 2 == 0;
        out.degenerate = out.formula.beta.is_zero() && square;
    }
    return out;
}

struct TwoPlanesK3 {
    Poly f12;   // bidegree (1,2) in (x, y)
    Poly f21;   // bidegree (2,1)
    bool degenerate = false;   // one of the two equations vanishes
};

inline TwoPlanesK3 two_planes_k3(const Poly& f) {
    detail::check_cubic(f);
    TwoPlanesK3 out{f.zero_like(), f.zero_like(), false};
    std::string x3, y3;
    for (const auto& [m, c] : f.terms()) {
        const unsigned d = detail::x_degree(m);
        if (d == 3) x3 += (x3.empty() ? "" : ", ") + f.monomial_string(m);
        if (d == 0) y3 += (y3.empty() ? "" : ", ") + f.monomial_string(m);
        if (d == 1) out.f12.add_term(m, c);
        if (d == 2) out.f21.add_term(m, c);
    }
    if (!x3.empty()) fail(ErrorKind::PlaneNotContained, "monomials of x-degree 3: " + x3);
    if (!y3.empty()) fail(ErrorKind::SecondPlaneNotContained, "monomials of y-degree 3: " + y3);
    out.degenerate = out.f12.is_zero() || out.f21.is_zero();
    return out;
}

struct CorankSurvey {
    Field field;                                   // where the base points live
    std::size_t points = 0;
    std::map<std::size_t, std::size_t> by_corank;  // corank_Q -> number of base points
    std::vector<ScalarVector> corank2_points;      // corank_Q >= 2
    std::size_t non_primitive = 0;                 // fibers with q = 0
};

/// Corank of every fiber over P^m(k); k is the bundle field or an extension.
inline CorankSurvey corank_survey(const QuadricBundleData& bundle, Field k) {
    CorankSurvey s{k, 0, {}, {}, 0};
    for_each_projective_point(k, bundle.base_dim() + 1, [&](const ScalarVector& y) {
        ++s.points;
        const QuadraticForm q = bundle.fiber(y);
        if (!q.is_primitive()) {
            ++s.non_primitive;
            return true;
        }
        const std::size_t c = corank(q).corank_Q;
        ++s.by_corank[c];
        if (c >= 2) s.corank2_points.push_back(y);
        return true;
    });
    return s;
}

} // namespace qbundle
