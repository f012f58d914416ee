#include <gtest/gtest.h>

#include <random>

#include "qbundle/bundles.hpp"
#include "support.hpp"

using namespace qbundle;

namespace {

const Field QQ = Field::rationals();
Field F(std::uint32_t q) { return Field::finite(q); }

Poly y(const QuadricBundleData& b, const char* text) { return parse_poly(text, b.base_vars(), b.field()); }

QuadricBundleData fermat_bundle(Field f) {
    QuadricBundleData b(f, 2, {0, 0, 0, -1}, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string yi = "y" + std::to_string(i);
        b.set(i, i, y(b, yi.c_str()));
        b.set(i, 3, y(b, (yi + "^2").c_str()));
    }
    return b;
}

ScalarVector pt(Field f, std::vector<long long> c) {
    ScalarVector v;
    for (auto x : c) v.push_back(Scalar::from_int(f, x));
    return v;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::Unsupported;
}

/// Random bundle of rank n over P^m with twists in {-1, 0, 1} and L = O(1).
QuadricBundleData rand_bundle(Field f, std::size_t m, std::size_t n, std::mt19937_64& rng) {
    std::vector<int> tw;
    for (std::size_t i = 0; i < n; ++i) tw.push_back(static_cast<int>(rng() % 2) - 1);
    QuadricBundleData b(f, m, tw, 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const int d = b.entry_degree(i, j);
            Poly p(f, b.base_vars());
            for (int t = 0; t < 3; ++t) {
                Poly mono = Poly::constant(f, b.base_vars(), qbtest::rand_scalar(f, rng));
                for (int k = 0; k < d; ++k) mono *= Poly::variable(f, b.base_vars(), rng() % (m + 1));
                p += mono;
            }
            b.set(i, j, p);
        }
    return b;
}

} // namespace

TEST(Bundle, Validation) {
    QuadricBundleData b(QQ, 2, {0, 0, 0, -1}, 1);
    EXPECT_EQ(b.entry_degree(0, 3), 2);
    EXPECT_EQ(kind_of([&] { b.set(0, 3, y(b, "y0")); }), ErrorKind::DegreeMismatch);
    EXPECT_EQ(kind_of([&] { b.set(0, 0, y(b, "y0 + y1^2")); }), ErrorKind::NotHomogeneous);
    b.set(3, 3, y(b, "y0^3 - y1*y2^2"));
    EXPECT_EQ(b.entry(3, 3).total_degree(), 3);
}

TEST(Fiber, Examples) {
    const auto fb = fermat_bundle(F(2));
    const auto [q, rep] = fiber_and_corank(fb, pt(F(2), {1, 1, 1}));
    EXPECT_EQ(q.to_string(), "x0^2 + x0*x3 + x1^2 + x1*x3 + x2^2 + x2*x3");
    // b pairs e3 with e0+e1+e2 only: the radical is span{e0+e1, e1+e2}, and Q vanishes on it
    EXPECT_EQ(rep.corank_b, 2u);
    EXPECT_EQ(rep.corank_Q, 2u);

    // x0 x1 + y0 x2^2 at y0 = 0
    QuadricBundleData d(QQ, 1, {1, 0, 0, 0}, 1);
    d.set(0, 1, y(d, "1"));
    d.set(2, 2, y(d, "y0"));
    EXPECT_EQ(fiber_and_corank(d, pt(QQ, {0, 1})).second.corank_Q, 2u);
    EXPECT_EQ(fiber_and_corank(d, pt(QQ, {1, 1})).second.corank_Q, 1u);

    QuadricBundleData c(F(5), 2, {0, 0}, 0);
    c.set(0, 0, y(c, "1"));
    c.set(1, 1, y(c, "2"));
    for (auto p : {pt(F(5), {1, 0, 0}), pt(F(5), {3, 4, 1}), pt(F(5), {0, 0, 1})}) EXPECT_EQ(fiber_and_corank(c, p).second.corank_Q, 0u);

    EXPECT_EQ(kind_of([&] { fiber_and_corank(c, pt(F(5), {0, 0, 0})); }), ErrorKind::ZeroPoint);
    EXPECT_EQ(kind_of([&] { fiber_and_corank(d, pt(QQ, {1, 1, 1})); }), ErrorKind::DimensionMismatch);
    QuadricBundleData z(QQ, 1, {0, 0}, 1);
    z.set(0, 0, y(z, "y0"));
    EXPECT_EQ(kind_of([&] { fiber_and_corank(z, pt(QQ, {0, 1})); }), ErrorKind::NonPrimitiveFiber);
}

TEST(Fiber, ExtensionPoint) {
    const auto fb = fermat_bundle(F(2));
    const Scalar a = Scalar::generator(F(4));
    const ScalarVector p{Scalar::one(F(4)), a, a * a};
    const auto [q, rep] = fiber_and_corank(fb, p);
    EXPECT_EQ(q.field(), F(4));
    EXPECT_GE(rep.corank_Q, 1u);
}

TEST(StratumMinors, Examples) {
    const auto fb = fermat_bundle(QQ);
    const auto m1 = stratum_minors(fb, 1);
    ASSERT_EQ(m1.size(), 1u);
    EXPECT_EQ(m1[0].total_degree(), 6);
    EXPECT_TRUE(m1[0].is_homogeneous());
    EXPECT_EQ(m1[0], determinant(fb.polar_matrix()));
    EXPECT_TRUE(stratum_minors(fb, 0).empty());
    // the sextic: det of [[2y0,0,0,y0^2],[0,2y1,0,y1^2],[0,0,2y2,y2^2],[y0^2,y1^2,y2^2,0]]
    EXPECT_EQ(m1[0], parse_poly("-4*y0^4*y1*y2 - 4*y0*y1^4*y2 - 4*y0*y1*y2^4", fb.base_vars(), QQ));
}

TEST(StratumMinors, PointwiseConsistency) {
    std::mt19937_64 rng(31);
    for (std::uint32_t p : {3u, 5u, 2u}) {
        const auto b = rand_bundle(F(p), 2, 4, rng);
        for (std::size_t c = 1; c <= 3; ++c) {
            const auto minors = stratum_minors(b, c);
            int tested = 0;
            for (int t = 0; t < 200 && tested < 50; ++t) {
                auto point = qbtest::rand_vector(F(p), 3, rng);
                if (std::all_of(point.begin(), point.end(), [](const Scalar& s) { return s.is_zero(); })) continue;
                const QuadraticForm q = b.fiber(point);
                const std::size_t cb = corank(q).corank_b;
                bool all_zero = true;
                for (const auto& m : minors) all_zero = all_zero && m.evaluate(point).is_zero();
                EXPECT_EQ(cb >= c, all_zero) << "c=" << c;
                ++tested;
            }
            EXPECT_EQ(tested, 50);
        }
    }
}

TEST(UniversalDisc, RankTwo) {
    const auto d = universal_disc(2);
    const auto v = universal_vars(2);
    EXPECT_EQ(d.beta, parse_int_poly("-xi01", v));
    EXPECT_EQ(d.gamma, parse_int_poly("xi0*xi1", v));
    EXPECT_EQ(d.sigma, -1);
}

TEST(UniversalDisc, RankFour) {
    const auto d = universal_disc(4);
    const auto v = universal_vars(4);
    EXPECT_EQ(d.beta, parse_int_poly("xi01*xi23 - xi02*xi13 + xi03*xi12", v));
    const IntPoly expected = parse_int_poly(
        "-4*xi0*xi1*xi2*xi3 + xi0*xi1*xi23^2 + xi0*xi2*xi13^2 + xi0*xi3*xi12^2 + xi1*xi2*xi03^2 + xi1*xi3*xi02^2"
        " + xi2*xi3*xi01^2 - xi0*xi12*xi13*xi23 - xi1*xi02*xi03*xi23 - xi2*xi01*xi03*xi13 - xi3*xi01*xi02*xi12"
        " + xi01*xi03*xi12*xi23",
        v);
    EXPECT_EQ(d.gamma, expected);
    EXPECT_EQ(d.gamma.size(), 12u);
    EXPECT_EQ(d.sigma, 1);
}

TEST(UniversalDisc, IdentityRanks246) {
    for (std::size_t r : {2u, 4u, 6u}) {
        const auto d = universal_disc(r);
        const auto vars = universal_vars(r);
        // polar matrix of the universal form, built here from the variable names
        Matrix<IntPoly> b(r, r, IntPoly(IntegerRing{}, vars));
        for (std::size_t i = 0; i < r; ++i) {
            b(i, i) = parse_int_poly("2*xi" + std::to_string(i), vars);
            for (std::size_t j = i + 1; j < r; ++j) b(i, j) = b(j, i) = parse_int_poly("xi" + std::to_string(i) + std::to_string(j), vars);
        }
        const IntPoly det = determinant(b);
        const IntPoly four = IntPoly::constant(IntegerRing{}, vars, 4);
        const IntPoly lhs = d.beta * d.beta - four * d.gamma;
        EXPECT_EQ(lhs, d.sigma > 0 ? det : -det) << r;
        EXPECT_EQ(d.sigma, (r / 2) % 2 ? -1 : 1);
    }
}

TEST(UniversalDisc, Errors) {
    EXPECT_EQ(kind_of([] { universal_disc(3); }), ErrorKind::OddRank);
    EXPECT_EQ(kind_of([] { universal_disc(0); }), ErrorKind::OddRank);
    EXPECT_EQ(kind_of([] { universal_disc(10); }), ErrorKind::TooLarge);
}

TEST(BundleDisc, Fermat) {
    const auto d = bundle_disc(fermat_bundle(QQ));
    EXPECT_TRUE(d.beta.is_zero());
    const Poly g = parse_poly("y0*y1*y2*(y0^3 + y1^3 + y2^3)", indexed_vars("y", 3), QQ);
    EXPECT_TRUE(d.gamma == g || d.gamma == -g);
    EXPECT_EQ(d.gamma, g);   // the sign this convention produces
}

TEST(BundleDisc, RankTwo) {
    // gamma0 T0^2 - beta T0 T1 + gamma1 T1^2 over P^1 with constant beta
    QuadricBundleData b(QQ, 1, {0, 0}, 2);
    b.set(0, 0, y(b, "y0^2"));
    b.set(0, 1, y(b, "-3*y0*y1"));
    b.set(1, 1, y(b, "y1^2 + y0*y1"));
    const auto d = bundle_disc(b);
    EXPECT_EQ(d.beta, y(b, "3*y0*y1"));
    EXPECT_EQ(d.gamma, y(b, "y0^3*y1 + y0^2*y1^2"));
    EXPECT_EQ(d.cover_relation(), "z^2 - 3*y0*y1*z + (y0^3*y1 + y0^2*y1^2)");

    QuadricBundleData k(QQ, 0, {0, 0}, 0);
    k.set(0, 0, y(k, "1"));
    k.set(1, 1, y(k, "-1"));
    const auto dk = bundle_disc(k);
    EXPECT_EQ(dk.cover_relation(), "z^2 - 1");   // two reduced points
    QuadricBundleData o(QQ, 0, {0, 0, 0}, 0);
    o.set(0, 0, y(o, "1"));
    EXPECT_EQ(kind_of([&] { bundle_disc(o); }), ErrorKind::OddRank);
}

TEST(BundleDisc, IdentityAtPoints) {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 6; ++t) {
        const auto b = rand_bundle(F(7), 2, t % 2 ? 4 : 2, rng);
        const auto d = bundle_disc(b);
        for (int s = 0; s < 10; ++s) {
            const auto p = qbtest::rand_vector(F(7), 3, rng);
            const Scalar beta = d.beta.evaluate(p), gamma = d.gamma.evaluate(p);
            const Scalar det = determinant(b.fiber(p).polar_matrix());
            EXPECT_EQ(beta * beta - Scalar::from_int(F(7), 4) * gamma, d.sigma > 0 ? det : -det);
        }
    }
}

TEST(BundleReduce, SplitOffHyperbolicPlane) {
    QuadricBundleData b(QQ, 2, {0, 0, 0, 0, -1}, 1);
    b.set(0, 1, y(b, "y0"));
    // not a unit pairing: the pivot must be a constant
    EXPECT_EQ(kind_of([&] { bundle_reduce(b, Subspace::coordinate(QQ, 5, {0})); }), ErrorKind::NoUnitPivot);

    QuadricBundleData c(QQ, 2, {1, 0, 0, 0, -1}, 1);
    c.set(0, 1, y(c, "1"));
    c.set(2, 2, y(c, "y0"));
    c.set(2, 3, y(c, "y1 - y2"));
    c.set(3, 4, y(c, "y2^2"));
    c.set(4, 4, y(c, "y0^3"));
    const auto red = bundle_reduce(c, Subspace::coordinate(QQ, 5, {0}));
    ASSERT_EQ(red.reduced.fiber_rank(), 3u);
    EXPECT_EQ(red.reduced.entry(0, 0), c.entry(2, 2));
    EXPECT_EQ(red.reduced.entry(0, 1), c.entry(2, 3));
    EXPECT_EQ(red.reduced.entry(1, 2), c.entry(3, 4));
    EXPECT_EQ(red.reduced.entry(2, 2), c.entry(4, 4));
    EXPECT_EQ(red.steps, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));
}

TEST(BundleReduce, CubicTypeExample) {
    // l00 = 0, l01 = 1: one step leaves a rank-2 bundle over P^2
    QuadricBundleData c(QQ, 2, {0, 1, 0, -1}, 1);
    c.set(0, 1, y(c, "1"));
    c.set(0, 2, y(c, "y0"));
    c.set(2, 2, y(c, "y2"));
    c.set(0, 3, y(c, "y1*y2"));
    c.set(1, 3, y(c, "y1"));
    c.set(2, 3, y(c, "y1^2"));
    c.set(3, 3, y(c, "y0^3 + y2^3"));
    const auto red = bundle_reduce(c, Subspace::coordinate(QQ, 4, {0}));
    EXPECT_EQ(red.reduced.fiber_rank(), 2u);
    EXPECT_EQ(red.reduced.base_dim(), 2u);
    std::mt19937_64 rng(33);
    for (int s = 0; s < 30; ++s) {
        const auto p = qbtest::rand_vector(QQ, 3, rng);
        if (std::all_of(p.begin(), p.end(), [](const Scalar& x) { return x.is_zero(); })) continue;
        const auto a = corank(c.fiber(p)), b = corank(red.reduced.fiber(p));
        EXPECT_EQ(a.corank_Q, b.corank_Q);
    }
}

TEST(BundleReduce, Errors) {
    QuadricBundleData b(QQ, 1, {0, 0, 0, 0}, 0);
    b.set(0, 1, y(b, "1"));
    b.set(2, 3, y(b, "1"));
    b.set(0, 0, y(b, "1"));
    EXPECT_EQ(kind_of([&] { bundle_reduce(b, Subspace::coordinate(QQ, 4, {0})); }), ErrorKind::NotIsotropicEverywhere);
    ScalarVector diag{Scalar::one(QQ), Scalar::one(QQ), Scalar::zero(QQ), Scalar::zero(QQ)};
    EXPECT_EQ(kind_of([&] { bundle_reduce(b, Subspace::span(QQ, 4, std::vector<ScalarVector>{diag})); }), ErrorKind::NotCoordinate);

    // F = radical of a corank-2 bundle: isotropic but no unit pivot
    QuadricBundleData r(QQ, 1, {0, 0, 0, 0}, 0);
    r.set(0, 1, y(r, "1"));
    EXPECT_EQ(kind_of([&] { bundle_reduce(r, Subspace::coordinate(QQ, 4, {2, 3})); }), ErrorKind::NoUnitPivot);
    EXPECT_EQ(kind_of([&] { bundle_reduce(r, Subspace::coordinate(QQ, 4, {0}), {3}); }), ErrorKind::NoUnitPivot);
    EXPECT_EQ(bundle_reduce(r, Subspace::coordinate(QQ, 4, {0}), {1}).reduced.fiber_rank(), 2u);
}

TEST(BundleReduce, PreservesCorankRandom) {
    std::mt19937_64 rng(34);
    for (std::uint32_t p : {3u, 5u, 2u}) {
        for (int t = 0; t < 10; ++t) {
            auto b = rand_bundle(F(p), 2, 5, rng);
            std::vector<int> tw = b.twists();
            tw[0] = tw[1] = 0;
            QuadricBundleData c(F(p), 2, tw, 1);
            for (std::size_t i = 0; i < 5; ++i)
                for (std::size_t j = i; j < 5; ++j) {
                    if (i == 0 && j == 0) continue;
                    if (i == 0 && j == 1) continue;
                    if (c.entry_degree(i, j) != b.entry_degree(i, j)) {
                        // rebuild degree-mismatched entries as zero
                        continue;
                    }
                    c.set(i, j, b.entry(i, j));
                }
            // L = O(1), a0 = a1 = 0 would make a01 of degree 1; use a unit on (0,1) via twists
            QuadricBundleData d(F(p), 2, {1, 0, tw[2], tw[3], tw[4]}, 1);
            d.set(0, 1, Poly::constant(F(p), d.base_vars(), Scalar::one(F(p))));
            for (std::size_t i = 1; i < 5; ++i)
                for (std::size_t j = i; j < 5; ++j)
                    if (i >= 2 || j >= 2 || (i == 1 && j == 1)) {
                        if (d.entry_degree(i, j) == c.entry_degree(i, j)) d.set(i, j, c.entry(i, j));
                    }
            for (std::size_t j = 2; j < 5; ++j) {
                const int deg = d.entry_degree(0, j);
                Poly m = Poly::constant(F(p), d.base_vars(), qbtest::rand_scalar(F(p), rng));
                for (int k = 0; k < deg; ++k) m *= Poly::variable(F(p), d.base_vars(), rng() % 3);
                if (deg >= 0) d.set(0, j, m);
            }
            const auto red = bundle_reduce(d, Subspace::coordinate(F(p), 5, {0}));
            for (int s = 0; s < 20; ++s) {
                const auto pt3 = qbtest::rand_vector(F(p), 3, rng);
                if (std::all_of(pt3.begin(), pt3.end(), [](const Scalar& x) { return x.is_zero(); })) continue;
                const auto a = corank(d.fiber(pt3)), r = corank(red.reduced.fiber(pt3));
                EXPECT_EQ(a.corank_b, r.corank_b);
                EXPECT_EQ(a.corank_Q, r.corank_Q);
            }
        }
    }
}

TEST(BinaryAlgebra, Examples) {
    const auto v = indexed_vars("y", 2);
    auto P = [&](const char* s) { return parse_poly(s, v, QQ); };
    EXPECT_EQ(binary_algebra(P("0"), P("1"), P("0")).relation(), "z^2 - z");
    EXPECT_EQ(binary_algebra(P("1"), P("0"), P("1")).relation(), "z^2 + 1");
    EXPECT_EQ(kind_of([&] { binary_algebra(P("0"), P("0"), P("0")); }), ErrorKind::ZeroForm);
}

TEST(BinaryAlgebra, LocalRepresentatives) {
    const auto v = indexed_vars("y", 2);
    auto P = [&](const char* s) { return parse_poly(s, v, QQ); };
    const Poly g0 = P("y0^2 + y1"), beta = P("3*y0 - y1^2"), g1 = P("y0*y1 - 2");
    const auto ba = binary_algebra(g0, beta, g1);
    const VarList ext = ba.on_T1.numerator.vars();
    const std::vector<std::size_t> idx{0, 1};
    const Poly G0 = g0.rename(ext, idx), B = beta.rename(ext, idx), G1 = g1.rename(ext, idx);
    const Poly T0 = Poly::variable(QQ, ext, 2), T1 = Poly::variable(QQ, ext, 3);
    const Poly eq = G0 * T0 * T0 - B * T0 * T1 + G1 * T1 * T1;
    auto rel = [&](const LocalSection& s) {
        return s.numerator * s.numerator - B * s.numerator * s.denominator + G0 * G1 * s.denominator * s.denominator;
    };
    // z^2 - beta z + gamma0 gamma1 vanishes on M for both representatives
    EXPECT_EQ(rel(ba.on_T1), G0 * eq);
    EXPECT_EQ(rel(ba.on_T0), G1 * eq);
    // and they agree on the overlap modulo the equation
    EXPECT_EQ(ba.on_T1.numerator * ba.on_T0.denominator - ba.on_T0.numerator * ba.on_T1.denominator, eq);
}

TEST(BinaryAlgebra, MatchesBundleDisc) {
    // rank-2 bundle with a00 = gamma0, a01 = -beta, a11 = gamma1 in symbols
    QuadricBundleData b(QQ, 2, {0, 0}, 1);
    b.set(0, 0, y(b, "y0"));
    b.set(0, 1, y(b, "-y1"));
    b.set(1, 1, y(b, "y2"));
    const auto d = bundle_disc(b);
    const auto ba = binary_algebra(y(b, "y0"), y(b, "y1"), y(b, "y2"));
    EXPECT_EQ(ba.constant, d.gamma);
    EXPECT_TRUE(ba.beta == d.beta || ba.beta == -d.beta);
}
