// Acceptance run: one PASS/FAIL line per criterion, with wall time. Exit
// status is nonzero when any criterion fails.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "qbundle/bundles.hpp"
#include "qbundle/clifford.hpp"
#include "qbundle/cubic4fold.hpp"
#include "qbundle/fano.hpp"
#include "support.hpp"

using namespace qbundle;

namespace {

const Field QQ = Field::rationals();
Field F(std::uint32_t q) { return Field::finite(q); }
QuadraticForm form(const char* text, Field f, std::size_t n) { return QuadraticForm::parse(text, f, n); }
Subspace coord(Field f, std::size_t n, std::vector<std::size_t> idx) { return Subspace::coordinate(f, n, idx); }

struct Check {
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (failures.size() < 8) failures.push_back(what);
    }
    void note(const std::string& s) { notes.push_back(s); }
};

struct Criterion {
    int id;
    std::string title;
    double limit_s;   // 0: no time bound
    std::function<void(Check&)> body;
};

// ---------------------------------------------------------------------------
// Universal discriminant

IntPoly upoly(const std::string& s, std::size_t rank) { return parse_int_poly(s, universal_vars(rank)); }

Matrix<IntPoly> universal_polar(std::size_t r) {
    const auto vars = universal_vars(r);
    Matrix<IntPoly> b(r, r, IntPoly(IntegerRing{}, vars));
    for (std::size_t i = 0; i < r; ++i) {
        b(i, i) = parse_int_poly("2*xi" + std::to_string(i), vars);
        for (std::size_t j = i + 1; j < r; ++j) b(i, j) = b(j, i) = parse_int_poly("xi" + std::to_string(i) + std::to_string(j), vars);
    }
    return b;
}

void crit1(Check& c) {
    const auto d = universal_disc(2);
    c.expect(d.beta == upoly("-xi01", 2), "beta = " + d.beta.to_string());
    c.expect(d.gamma == upoly("xi0*xi1", 2), "gamma = " + d.gamma.to_string());
}

// Reference rank-4 output with its one inconsistent monomial repaired: the term
// xi1*xi02*xi23*xi23 is not of the right multidegree and must be xi1*xi02*xi03*xi23.
const char* kRank4GammaTail =
    " + xi0*xi1*xi23^2 + xi0*xi2*xi13^2 + xi0*xi3*xi12^2 + xi1*xi2*xi03^2 + xi1*xi3*xi02^2 + xi2*xi3*xi01^2"
    " - xi0*xi12*xi13*xi23 - xi2*xi01*xi03*xi13 - xi3*xi01*xi02*xi12 + xi01*xi03*xi12*xi23";

void crit2(Check& c) {
    const auto d = universal_disc(4);
    c.expect(d.beta == upoly("xi01*xi23 - xi02*xi13 + xi03*xi12", 4), "beta = " + d.beta.to_string());
    const IntPoly corrected = upoly(std::string("-4*xi0*xi1*xi2*xi3") + kRank4GammaTail + " - xi1*xi02*xi03*xi23", 4);
    const IntPoly literal = upoly(std::string("-4*xi0*xi1*xi2*xi3") + kRank4GammaTail + " - xi1*xi02*xi23*xi23", 4);
    c.expect(corrected.size() == 12, "corrected gamma has 12 terms");
    c.expect(d.gamma == corrected, "gamma = " + d.gamma.to_string());
    // term-for-term: every monomial with its coefficient
    for (const auto& [m, k] : corrected.terms()) c.expect(d.gamma.coefficient(m) == k, "coefficient of " + corrected.monomial_string(m));
    const IntPoly det = determinant(universal_polar(4));
    const IntPoly four = IntPoly::constant(IntegerRing{}, universal_vars(4), 4);
    c.expect(d.beta * d.beta - four * literal != det, "literal reference gamma should fail the identity");
    c.note("reference monomial xi1*xi02*xi23*xi23 read as xi1*xi02*xi03*xi23");
}

void crit3(Check& c) {
    for (std::size_t r : {2u, 4u, 6u}) {
        const auto start = std::chrono::steady_clock::now();
        const auto d = universal_disc(r);
        const IntPoly det = determinant(universal_polar(r));
        const IntPoly four = IntPoly::constant(IntegerRing{}, universal_vars(r), 4);
        const IntPoly lhs = d.beta * d.beta - four * d.gamma;
        int sigma = 0;
        if (lhs == det) sigma = 1;
        else if (lhs == -det) sigma = -1;
        c.expect(sigma != 0, "identity fails at rank " + std::to_string(r));
        c.expect(sigma == d.sigma, "sigma mismatch at rank " + std::to_string(r));
        // sigma = (-1)^(r/2): the gamma computed with the other sign is not integral
        c.expect(sigma == ((r / 2) % 2 ? -1 : 1), "unexpected sigma at rank " + std::to_string(r));
        const IntPoly other = d.beta * d.beta + (sigma > 0 ? det : -det);
        bool divisible = true;
        for (const auto& [m, k] : other.terms()) divisible = divisible && k % 4 == 0;
        c.expect(!divisible, "both signs divisible at rank " + std::to_string(r));
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (r == 6) {
            c.expect(s < 30, "rank 6 took too long");
            std::ostringstream os;
            os << "rank 6 in " << std::fixed << std::setprecision(2) << s << " s";
            c.note(os.str());
        }
    }
}

// ---------------------------------------------------------------------------
// Clifford and spinor factorizations

void crit4(Check& c) {
    std::size_t n = 0;
    for (const auto& g : qbtest::mf_grid()) {
        auto alg = make_algebra(g.q);
        for (int d : {0, 1}) {
            const auto s = spinor_phi(alg, g.w, d);
            c.expect(mf_verify(s.pair()).identity_holds, g.label + " d=" + std::to_string(d));
            ++n;
        }
    }
    c.note(std::to_string(n) + " factorizations checked");
}

void crit5(Check& c) {
    const auto q = form("x0*x3 + x1*x2", QQ, 4);
    const auto w = coord(QQ, 4, {2, 3});
    const auto s = spinor_phi(q, w, 0);
    const auto reference = LinearMatrix::parse(QQ, 4, {{"x3", "x2"}, {"-x1", "x0"}});
    const auto partner = LinearMatrix::parse(QQ, 4, {{"x0", "-x2"}, {"x1", "x3"}});
    c.expect(factors_form(reference, partner, q), "reference matrix does not factor q");
    c.expect(mf_equiv(s.phi, reference, 0).found, "spinor_phi not equivalent to the reference matrix");
    c.expect(mf_equiv(s.pair(), MatrixFactorization{q, reference, partner}, 0).found, "pair not equivalent");
    const auto odd = ideal_basis(q, w, 1), even = ideal_basis(q, w, 0);
    std::vector<std::string> o, e;
    for (const auto& x : odd.basis) o.push_back(x.to_string());
    for (const auto& x : even.basis) e.push_back(x.to_string());
    c.expect(o == std::vector<std::string>{"e0*e2*e3", "e1*e2*e3"}, "odd ideal basis");
    c.expect(e == std::vector<std::string>{"e2*e3", "e0*e1*e2*e3"}, "even ideal basis");
}

void crit6(Check& c) {
    struct Case {
        const char* q;
        std::size_t n;
        std::vector<std::size_t> w;
    };
    std::size_t n = 0;
    for (Field f : {QQ, F(3), F(2)})
        for (const Case& k : {Case{"x0*x3 + x1*x2", 4, {2, 3}}, Case{"x0*x3 + x1*x2", 4, {2}}, Case{"x0*x1 + x2*x3 + x4*x5", 6, {1, 3, 5}},
                              Case{"x0*x1 + x2*x3 + x4*x5", 6, {1, 3}}, Case{"x0*x1 + x2*x3 + x4*x5", 6, {0}}}) {
            const auto q = form(k.q, f, k.n);
            auto alg = make_algebra(q);
            const auto w = coord(f, k.n, k.w);
            const int r = static_cast<int>(k.w.size());
            for (int d : {0, 1}) {
                const auto dp = dual_pair(spinor_phi(alg, w, d));
                const auto res = mf_equiv(dp, spinor_phi(alg, w, r - d - 1).pair(), 0);
                c.expect(res.found, f.spec() + " " + k.q + " r=" + std::to_string(r) + " d=" + std::to_string(d));
                ++n;
            }
        }
    c.note(std::to_string(n) + " dual pairs matched with seed 0");
}

void crit7(Check& c) {
    std::size_t sampled = 0;
    for (const auto& g : qbtest::mf_grid()) {
        auto alg = make_algebra(g.q);
        const std::size_t n = g.q.dim() - 1, r = g.w.dim();
        for (int d : {0, 1}) {
            std::vector<ScalarVector> part;
            for (std::uint32_t m = 0; m < alg->size(); ++m)
                if (static_cast<int>(std::popcount(m) % 2) == d)
                    part.push_back(CliffordElement::scalar(alg, Scalar::one(g.q.field())).coeffs()), part.back().assign(alg->size(), Scalar::zero(g.q.field())),
                        part.back()[m] = Scalar::one(g.q.field());
            c.expect(span_rank(*alg, part) == (std::size_t{1} << n), g.label + " parity part");
            const auto b = ideal_basis(alg, g.w, d);
            c.expect(b.dim() == (std::size_t{1} << (n - r)), g.label + " dim I_d");
            const auto s = spinor_phi(alg, g.w, d);
            const auto rep = mf_verify(s);
            c.expect(rep.ranks_as_expected, g.label + " point ranks");
            for (const auto& pr : rep.point_ranks) {
                if (!pr.in_pw_sing && n == r) continue;   // 2^(n-r-1) is not an integer: Q is two points
                const std::size_t want = pr.in_pw_sing ? 0 : std::size_t{1} << (n - r - 1);
                c.expect(pr.rank == want, g.label + " rank at a point");
            }
            sampled += rep.point_ranks.size();
        }
    }
    c.note(std::to_string(sampled) + " points of Q sampled");
}

void crit8(Check& c) {
    // worked examples
    {
        const auto q = form("x0*x1 + x2*x3", QQ, 4);
        const auto r = hyperplane_ideal_check(q, coord(QQ, 4, {1, 2, 3}), coord(QQ, 4, {2}), 0);
        c.expect(r.ok() && r.dim_I == 4 && r.dim_I_sub == 2 && r.dim_I_sub_prev == 2, "hyperplane example 1");
        const auto s = form("x0*x3 + x1*x2", QQ, 4);
        const auto r2 = hyperplane_ideal_check(s, coord(QQ, 4, {1, 2, 3}), coord(QQ, 4, {2, 3}), 0);
        c.expect(r2.ok() && r2.dim_I == 2 && r2.dim_I_sub == 1, "hyperplane example 2");
        const auto k = form("x0*x1 + x2*x3", QQ, 5);
        for (int d : {0, 1}) {
            const auto cr = cone_ideal_check(k, coord(QQ, 5, {4}), coord(QQ, 5, {2, 4}), d);
            c.expect(cr.ok() && cr.dim_I_shifted == 4 && cr.dim_I_bar == 4, "cone example");
        }
    }
    std::mt19937_64 rng(8);
    int hyper = 0, cone = 0;
    for (int t = 0; t < 2000 && (hyper < 20 || cone < 20); ++t) {
        const Field f = std::vector<Field>{F(2), F(3), F(5)}[t % 3];
        if (hyper < 20) {
            const std::size_t n = 3 + rng() % 3;
            const auto q = qbtest::rand_form(f, n, rng);
            const std::size_t h = rng() % n;
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < n; ++i)
                if (i != h) rest.push_back(i);
            const Subspace ep = coord(f, n, rest);
            const auto qe = q.restrict(ep.basis());
            const std::size_t r = rng() % 3;
            std::optional<Subspace> wp = r == 0 ? std::optional<Subspace>(Subspace(f, n - 1)) : qbtest::rand_isotropic(qe, r, rng, false, 20);
            if (wp) {
                std::vector<ScalarVector> rows;
                for (std::size_t i = 0; i < wp->dim(); ++i) {
                    const auto v = wp->vector(i);
                    ScalarVector full;
                    for (std::size_t j = 0, k = 0; j < n; ++j) full.push_back(j == h ? Scalar::zero(f) : v[k++]);
                    rows.push_back(full);
                }
                const Subspace w = rows.empty() ? Subspace(f, n) : Subspace::span(f, n, rows);
                for (int d : {0, 1}) {
                    const auto rep = hyperplane_ideal_check(q, ep, w, d);
                    c.expect(rep.ok() && rep.dim_I == rep.dim_I_sub + rep.dim_I_sub_prev, "random hyperplane " + q.to_string());
                }
                ++hyper;
            }
        }
        if (cone < 20) {
            const std::size_t n0 = 2 + rng() % 3, cdim = 1 + rng() % 2;
            const auto q0 = qbtest::rand_form(f, n0, rng);
            const std::size_t n = n0 + cdim;
            const auto q = QuadraticForm::parse(q0.to_poly().is_zero() ? "0" : q0.to_string(), f, n);
            std::vector<std::size_t> kidx;
            for (std::size_t i = n0; i < n; ++i) kidx.push_back(i);
            const Subspace kk = coord(f, n, kidx);
            const std::size_t r = rng() % 2;
            std::optional<Subspace> wp = r == 0 ? std::optional<Subspace>(Subspace(f, n0)) : qbtest::rand_isotropic(q0, r, rng, false, 20);
            if (wp) {
                std::vector<ScalarVector> rows;
                for (std::size_t i = 0; i < wp->dim(); ++i) {
                    auto v = wp->vector(i);
                    v.resize(n, Scalar::zero(f));
                    rows.push_back(v);
                }
                for (std::size_t i = 0; i < kk.dim(); ++i) rows.push_back(kk.vector(i));
                const Subspace w = Subspace::span(f, n, rows);
                for (int d : {0, 1}) {
                    const auto rep = cone_ideal_check(q, kk, w, d);
                    c.expect(rep.ok(), "random cone " + q.to_string());
                }
                ++cone;
            }
        }
    }
    c.expect(hyper == 20 && cone == 20, "could not build 20 random instances of each kind");
    c.note(std::to_string(hyper) + " hyperplane and " + std::to_string(cone) + " cone instances");
}

// ---------------------------------------------------------------------------
// Cubic fourfolds

void crit9(Check& c) {
    const auto vars = cubic_vars();
    const Poly f = parse_poly("x0^2*y0 + x1^2*y1 + x2^2*y2 + x0*y0^2 + x1*y1^2 + x2*y2^2", vars, QQ);
    const auto cw = extract(f);
    const auto b = projection_bundle(cw);
    const auto d = discriminant_cover(cw);
    const auto yv = indexed_vars("y", 3);
    const Poly g = parse_poly("y0*y1*y2*(y0^3 + y1^3 + y2^3)", yv, QQ);
    c.expect(b.fiber_rank() == 4 && b.twists() == std::vector<int>{0, 0, 0, -1}, "projection bundle shape");
    c.expect(d.cross_check, "closed formula and universal specialization disagree");
    c.expect(d.formula.beta.is_zero(), "beta = " + d.formula.beta.to_string());
    c.expect(d.formula.gamma == g || d.formula.gamma == -g, "gamma = " + d.formula.gamma.to_string());
    const auto k3 = two_planes_k3(f);
    c.expect(k3.f21 == parse_poly("x0^2*y0 + x1^2*y1 + x2^2*y2", vars, QQ), "f21 = " + k3.f21.to_string());
    c.expect(k3.f12 == parse_poly("x0*y0^2 + x1*y1^2 + x2*y2^2", vars, QQ), "f12 = " + k3.f12.to_string());
    c.note(std::string("gamma = ") + (d.formula.gamma == g ? "+" : "-") +
           "y0*y1*y2*(y0^3 + y1^3 + y2^3); cover z^2 - beta*z + gamma, i.e. z^2 " + (d.formula.gamma == g ? "+" : "-") +
           " y0*y1*y2*(y0^3 + y1^3 + y2^3) = 0");
}

void crit10(Check& c) {
    const VarList lv = make_vars({"l00", "l01", "l02", "l11", "l12", "l22", "q0", "q1", "q2", "g"});
    const IntPoly reference = parse_int_poly(
        "(l00*l12^2 + l11*l02^2 + l22*l01^2 - l01*l02*l12 - 4*l00*l11*l22)*g + l01*l12*q0*q2 + l11*l22*q0^2"
        " + l00*l22*q1^2 + l00*l11*q2^2 - l00*l12*q1*q2 - l11*l02*q0*q2 - l22*l01*q0*q1",
        lv);
    // xi0 xi1 xi2 xi3 xi01 xi02 xi03 xi12 xi13 xi23 -> l00 l11 l22 g l01 l02 q0 l12 q1 q2
    const std::vector<std::size_t> map{0, 3, 5, 9, 1, 2, 6, 4, 7, 8};
    const auto d = universal_disc(4);
    const IntPoly gamma = d.gamma.rename(lv, map);
    c.expect(gamma == reference, "specialized gamma = " + gamma.to_string());
    const IntPoly beta = d.beta.rename(lv, map);
    c.expect(beta == parse_int_poly("l01*q2 - l02*q1 + l12*q0", lv), "specialized beta = " + beta.to_string());
}

// ---------------------------------------------------------------------------
// Finite fields

void crit11(Check& c) {
    const auto q = form("x0*x1 + x2*x3", F(3), 4);
    const auto pts = enum_isotropic(q, 1);
    c.expect(pts.subspaces.size() == 16 && qbtest::brute_point_count(q) == 16, "point count");
    const auto e = component_classes(q);
    c.expect(e.subspaces.size() == 8, "line count");
    const auto& lab = *e.labels;
    c.expect(std::count(lab.begin(), lab.end(), 0) == 4 && std::count(lab.begin(), lab.end(), 1) == 4, "4+4 split");
    for (std::size_t i = 0; i < lab.size(); ++i)
        for (std::size_t j = i + 1; j < lab.size(); ++j)
            c.expect(intersection_dim(e.subspaces[i], e.subspaces[j]) == (lab[i] == lab[j] ? 0u : 1u), "ruling intersections");
    // surfaces of corank 2: every maximal isotropic contains the radical; two of them when the pair of planes is rational
    for (auto [text, p, count] : {std::tuple{"x0*x1", 3u, 2u}, std::tuple{"x0*x1", 2u, 2u}, std::tuple{"x2^2 + x3^2", 5u, 2u},
                                  std::tuple{"x2^2 + x3^2", 3u, 0u}, std::tuple{"x0^2 + x0*x1 + x1^2", 2u, 0u}}) {
        const auto chk = corank2_radical_check(form(text, F(p), 4));
        c.expect(chk.all_contain_radical && chk.maximal_count == count, std::string("corank 2: ") + text);
    }
    const auto six = corank2_radical_check(form("x0*x1 + x2*x3", F(2), 6));
    c.expect(six.all_contain_radical, "corank 2 in dimension 6");
    for (std::uint32_t p : {3u, 5u, 7u, 13u}) {
        const auto s = cover_split(form("x2^2 + x3^2", F(p), 4));
        c.expect(s.split == (p % 4 == 1), "cover_split at p = " + std::to_string(p));
    }
}

void crit12(Check& c) {
    const auto q = form("x0*x1", F(3), 4);
    const Subspace rad = coord(F(3), 4, {2, 3});
    std::vector<Subspace> lines;
    for (const auto& l : enum_isotropic(q, 2).subspaces)
        if (l != rad) lines.push_back(l);
    c.expect(lines.size() == 24, "expected 24 lines, got " + std::to_string(lines.size()));
    std::size_t equal = 0, pairs = 0;
    auto alg = make_algebra(q);
    std::vector<MatrixFactorization> mfs;
    std::vector<LineClass> labels;
    for (const auto& l : lines) {
        mfs.push_back(spinor_phi(alg, l, 0).pair());
        labels.push_back(line_class(q, l));
    }
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i; j < lines.size(); ++j) {
            const bool same = labels[i].component == labels[j].component && labels[i].point == labels[j].point;
            const bool eq = mf_equiv(mfs[i], mfs[j], 0).found;
            c.expect(same == eq, "lines " + std::to_string(i) + ", " + std::to_string(j));
            equal += same;
            ++pairs;
        }
    c.note(std::to_string(pairs) + " pairs, " + std::to_string(equal) + " with equal labels");
}

// ---------------------------------------------------------------------------
// Property suites

void prop_polar(Check& c, std::mt19937_64& rng) {
    for (int t = 0; t < 100; ++t) {
        const Field f = std::vector<Field>{F(2), F(5), QQ, F(9)}[t % 4];
        const std::size_t n = 1 + rng() % 6;
        const auto q = qbtest::rand_form(f, n, rng);
        const auto v = qbtest::rand_vector(f, n, rng), w = qbtest::rand_vector(f, n, rng);
        ScalarVector vw(n, Scalar::zero(f));
        for (std::size_t i = 0; i < n; ++i) vw[i] = v[i] + w[i];
        const Scalar expected = qbtest::eval_form(q, vw) - qbtest::eval_form(q, v) - qbtest::eval_form(q, w);
        c.expect(q.polar(v, w) == expected, "polar " + q.to_string());
        c.expect(dot(v, mat_vec(q.polar_matrix(), w, f)) == expected, "polar matrix " + q.to_string());
    }
}

void prop_char2(Check& c, std::mt19937_64& rng) {
    for (int t = 0; t < 100; ++t) {
        const Field f = t % 3 == 0 ? F(4) : F(2);
        const std::size_t n = 1 + rng() % 7;
        const auto q = qbtest::rand_form(f, n, rng);
        const auto b = q.polar_matrix();
        for (std::size_t i = 0; i < n; ++i) c.expect(b(i, i).is_zero(), "alternating " + q.to_string());
        c.expect(rank(b, f) % 2 == 0, "even rank " + q.to_string());
        const auto r = corank(q);
        c.expect(r.corank_Q == r.corank_b || r.corank_Q + 1 == r.corank_b, "corank relation " + q.to_string());
    }
}

void prop_reduction(Check& c, std::mt19937_64& rng) {
    int done = 0;
    for (int t = 0; done < 100 && t < 2000; ++t) {
        const Field f = std::vector<Field>{F(2), F(3), F(5), F(4)}[t % 4];
        const std::size_t n = 2 + rng() % 5;
        const auto q = qbtest::rand_form(f, n, rng, 0.5);
        const std::size_t r = 1 + rng() % 2;
        auto w = qbtest::rand_isotropic(q, r, rng, true, 5);
        if (!w) continue;
        ++done;
        const auto red = hyperbolic_reduce(q, *w);
        const auto a = corank(q), b = corank(red.reduced);
        c.expect(red.reduced.dim() == n - 2 * r, "reduced dimension");
        c.expect(a.corank_b == b.corank_b && a.corank_Q == b.corank_Q, "corank " + q.to_string());
    }
    c.expect(done == 100, "only " + std::to_string(done) + " reduction cases");
}

void prop_fano(Check& c, std::mt19937_64& rng) {
    int cases = 0;
    for (int attempt = 0; attempt < 2000 && cases < 100; ++attempt) {
        const std::uint32_t p = attempt % 2 ? 3 : 2;
        const std::size_t n = p == 2 ? 3 + rng() % 4 : 3 + rng() % 3;
        const auto q = qbtest::rand_form(F(p), n, rng);
        const std::size_t r = 1 + rng() % 2;
        if (2 * r > n) continue;
        const auto fsub = qbtest::rand_isotropic(q, r, rng, true);
        if (!fsub) continue;
        const auto red = hyperbolic_reduce(q, *fsub);
        const auto z = red.z_basis();
        const std::size_t m = n - 2 * r;
        for (std::size_t k = 1; k <= m; ++k) {
            std::set<Subspace> above, images;
            for (const auto& u : enum_isotropic(q, k + r).subspaces)
                if (u.contains(*fsub)) above.insert(u);
            for (const auto& u : enum_isotropic(red.reduced, k).subspaces) {
                std::vector<ScalarVector> rows;
                for (std::size_t i = 0; i < r; ++i) rows.push_back(fsub->vector(i));
                for (std::size_t i = 0; i < k; ++i) {
                    ScalarVector v = zero_vector(F(p), n);
                    const auto cu = u.vector(i);
                    for (std::size_t j = 0; j < m; ++j)
                        for (std::size_t t = 0; t < n; ++t) v[t] += cu[j] * z(j, t);
                    rows.push_back(v);
                }
                images.insert(Subspace::span(F(p), n, rows));
            }
            c.expect(images == above, "Fano correspondence " + q.to_string());
        }
        ++cases;
    }
    c.expect(cases == 100, "only " + std::to_string(cases) + " Fano cases");
}

void prop_parse(Check& c, std::mt19937_64& rng) {
    const std::vector<Field> fields{QQ, F(5), F(2), F(9)};
    for (int t = 0; t < 100; ++t) {
        const Field f = fields[t % fields.size()];
        const std::size_t nv = 1 + rng() % 6;
        const auto vars = indexed_vars("x", nv);
        Poly p(f, vars);
        const int nterms = 1 + static_cast<int>(rng() % 6);
        for (int k = 0; k < nterms; ++k) {
            Poly mono = Poly::constant(f, vars, qbtest::rand_scalar(f, rng, 7));
            const unsigned deg = rng() % 5;
            for (unsigned d = 0; d < deg; ++d) mono *= Poly::variable(f, vars, rng() % nv);
            p += mono;
        }
        const std::string s = p.to_string();
        const Poly back = parse_poly(s, vars, f);
        c.expect(back == p && back.to_string() == s, "round trip " + s);
    }
}

void crit13(Check& c) {
    std::mt19937_64 rng(13);
    prop_polar(c, rng);
    prop_char2(c, rng);
    prop_reduction(c, rng);
    prop_fano(c, rng);
    prop_parse(c, rng);
}

} // namespace

int main() {
    const std::vector<Criterion> all{
        {1, "universal discriminant, rank 2", 1, crit1},
        {2, "universal discriminant, rank 4", 1, crit2},
        {3, "beta^2 - 4 gamma = sigma det(b), ranks 2, 4, 6", 30, crit3},
        {4, "phi_d phi_(d-1) = q Id on the grid", 120, crit4},
        {5, "surface factorization and ideal bases", 1, crit5},
        {6, "dual pair vs complementary degree", 30, crit6},
        {7, "dimension laws and point ranks", 0, crit7},
        {8, "hyperplane and cone ideal relations", 0, crit8},
        {9, "Fermat pipeline", 1, crit9},
        {10, "cubic gamma vs universal gamma", 10, crit10},
        {11, "finite-field enumeration", 60, crit11},
        {12, "line and spinor classes on V(x0 x1) over F_3", 120, crit12},
        {13, "property suites, 100 cases each", 120, crit13},
    };
    int failed = 0;
    for (const auto& cr : all) {
        Check c;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.body(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = cr.limit_s == 0 || s < cr.limit_s;
        const bool pass = c.ok && in_time;
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << cr.id << ": " << cr.title << " (" << std::fixed << std::setprecision(3)
                  << s << " s";
        if (cr.limit_s > 0) std::cout << ", limit " << cr.limit_s << " s";
        std::cout << ")\n";
        for (const auto& n : c.notes) std::cout << "    note: " << n << "\n";
        for (const auto& f : c.failures) std::cout << "    failed: " << f << "\n";
        if (!in_time) std::cout << "    failed: over the time limit\n";
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
    return failed ? 1 : 0;
}
