#pragma once

// Sparse multivariate polynomials over Z or over a Field, kept in canonical
// form: no stored zero coefficients, terms ordered by graded lex.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbundle/error.hpp"
#include "qbundle/exactalg/field.hpp"

namespace qbundle {

using Integer = mpz_class;

/// Context type for polynomials with integer coefficients.
struct IntegerRing {
    bool operator==(const IntegerRing&) const { return true; }
    bool operator!=(const IntegerRing&) const { return false; }
    std::string spec() const { return "Z"; }
};

template <class R>
struct CoeffTraits;

template <>
struct CoeffTraits<Integer> {
    using Context = IntegerRing;
    static Integer zero(const Context&) { return 0; }
    static Integer one(const Context&) { return 1; }
    static Integer from_int(const Context&, long long n) { return Integer(std::to_string(n)); }
    static Integer from_rational(const Context&, const mpq_class& q) {
        if (q.get_den() != 1) fail(ErrorKind::NotDivisible, "non-integral literal " + q.get_str() + " over Z");
        return q.get_num();
    }
    static std::optional<Integer> named_constant(const Context&, const std::string&) { return std::nullopt; }
    static bool is_zero(const Integer& x) { return sgn(x) == 0; }
    static bool is_one(const Integer& x) { return x == 1; }
    static bool is_negative(const Integer& x) { return sgn(x) < 0; }
    static bool compound(const Integer&) { return false; }
    static std::string to_string(const Integer& x) { return x.get_str(); }
};

template <>
struct CoeffTraits<Scalar> {
    using Context = Field;
    static Scalar zero(const Context& f) { return Scalar::zero(f); }
    static Scalar one(const Context& f) { return Scalar::one(f); }
    static Scalar from_int(const Context& f, long long n) { return Scalar::from_int(f, n); }
    static Scalar from_rational(const Context& f, const mpq_class& q) { return Scalar::from_rational(f, q); }
    static std::optional<Scalar> named_constant(const Context& f, const std::string& name) {
        if (f.kind() == FieldKind::Extension && name == f.generator()) return Scalar::generator(f);
        return std::nullopt;
    }
    static bool is_zero(const Scalar& x) { return x.is_zero(); }
    static bool is_one(const Scalar& x) { return x.is_one(); }
    static bool is_negative(const Scalar& x) { return !x.field().is_finite() && sgn(x.rational()) < 0; }
    static bool compound(const Scalar& x) { return x.compound(); }
    static std::string to_string(const Scalar& x) { return x.to_string(); }
};

using VarList = std::shared_ptr<const std::vector<std::string>>;

inline VarList make_vars(std::vector<std::string> names) {
    return std::make_shared<const std::vector<std::string>>(std::move(names));
}

/// prefix0, prefix1, ..., prefix{n-1}
inline VarList indexed_vars(const std::string& prefix, std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
    return make_vars(std::move(names));
}

inline bool same_vars(const VarList& a, const VarList& b) { return a == b || *a == *b; }

struct Monomial {
    std::vector<std::uint16_t> exps;

    Monomial() = default;
    explicit Monomial(std::size_t nvars) : exps(nvars, 0) {}
    Monomial(std::initializer_list<std::uint16_t> e) : exps(e) {}

    static Monomial unit(std::size_t nvars, std::size_t i, std::uint16_t e = 1) {
        Monomial m(nvars);
        m.exps[i] = e;
        return m;
    }

    unsigned degree() const {
        unsigned d = 0;
        for (auto e : exps) d += e;
        return d;
    }

    Monomial operator*(const Monomial& o) const {
        Monomial m(exps.size());
        for (std::size_t i = 0; i < exps.size(); ++i) m.exps[i] = static_cast<std::uint16_t>(exps[i] + o.exps[i]);
        return m;
    }

    bool operator==(const Monomial& o) const { return exps == o.exps; }
};

/// Graded lex, largest first: compares total degree, then exponents of
/// x0, x1, ... in turn.
struct GrlexDescending {
    bool operator()(const Monomial& a, const Monomial& b) const {
        const unsigned da = a.degree(), db = b.degree();
        if (da != db) return da > db;
        return a.exps > b.exps;
    }
};

template <class R>
class MultiPoly {
public:
    using Traits = CoeffTraits<R>;
    using Context = typename Traits::Context;
    using TermMap = std::map<Monomial, R, GrlexDescending>;

    MultiPoly(Context ctx, VarList vars) : ctx_(std::move(ctx)), vars_(std::move(vars)) {}

    static MultiPoly constant(Context ctx, VarList vars, const R& c) {
        MultiPoly p(std::move(ctx), std::move(vars));
        p.add_term(Monomial(p.nvars()), c);
        return p;
    }

    static MultiPoly variable(Context ctx, VarList vars, std::size_t i) {
        MultiPoly p(ctx, std::move(vars));
        p.add_term(Monomial::unit(p.nvars(), i), Traits::one(ctx));
        return p;
    }

    const Context& ctx() const { return ctx_; }
    const VarList& vars() const { return vars_; }
    std::size_t nvars() const { return vars_->size(); }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0); }

    R constant_term() const { return coefficient(Monomial(nvars())); }

    R coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Traits::zero(ctx_) : it->second;
    }

    /// -1 for the zero polynomial.
    int total_degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.begin()->first.degree()); }

    /// Zero counts as homogeneous of every degree.
    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        const unsigned d = terms_.begin()->first.degree();
        return std::all_of(terms_.begin(), terms_.end(), [d](const auto& t) { return t.first.degree() == d; });
    }

    bool is_homogeneous_of_degree(int d) const {
        if (terms_.empty()) return true;
        return d >= 0 && is_homogeneous() && total_degree() == d;
    }

    void add_term(const Monomial& m, const R& c) {
        if (Traits::is_zero(c)) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (inserted) return;
        it->second = it->second + c;
        if (Traits::is_zero(it->second)) terms_.erase(it);
    }

    MultiPoly zero_like() const { return MultiPoly(ctx_, vars_); }
    MultiPoly one_like() const { return constant(ctx_, vars_, Traits::one(ctx_)); }
    MultiPoly constant_like(const R& c) const { return constant(ctx_, vars_, c); }

    MultiPoly operator+(const MultiPoly& o) const {
        check(o);
        MultiPoly r = *this;
        for (const auto& [m, c] : o.terms_) r.add_term(m, c);
        return r;
    }

    MultiPoly operator-(const MultiPoly& o) const {
        check(o);
        MultiPoly r = *this;
        for (const auto& [m, c] : o.terms_) r.add_term(m, Traits::zero(ctx_) - c);
        return r;
    }

    MultiPoly operator-() const { return zero_like() - *this; }

    MultiPoly operator*(const MultiPoly& o) const {
        check(o);
        MultiPoly r = zero_like();
        for (const auto& [ma, ca] : terms_)
            for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
        return r;
    }

    MultiPoly scale(const R& c) const {
        MultiPoly r = zero_like();
        if (Traits::is_zero(c)) return r;
        for (const auto& [m, a] : terms_) r.add_term(m, a * c);
        return r;
    }

    MultiPoly& operator+=(const MultiPoly& o) { return *this = *this + o; }
    MultiPoly& operator-=(const MultiPoly& o) { return *this = *this - o; }
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

    MultiPoly pow(unsigned e) const {
        MultiPoly r = one_like();
        MultiPoly b = *this;
        while (e) {
            if (e & 1) r *= b;
            e >>= 1;
            if (e) b *= b;
        }
        return r;
    }

    bool operator==(const MultiPoly& o) const {
        if (!same_vars(vars_, o.vars_) || terms_.size() != o.terms_.size()) return false;
        auto a = terms_.begin();
        for (auto b = o.terms_.begin(); b != o.terms_.end(); ++a, ++b)
            if (!(a->first == b->first) || !(a->second == b->second)) return false;
        return true;
    }
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    R evaluate(std::span<const R> point) const {
        if (point.size() != nvars()) fail(ErrorKind::DimensionMismatch, "evaluation point has wrong length");
        R acc = Traits::zero(ctx_);
        for (const auto& [m, c] : terms_) {
            R t = c;
            for (std::size_t i = 0; i < m.exps.size(); ++i)
                for (unsigned e = 0; e < m.exps[i]; ++e) t = t * point[i];
            acc = acc + t;
        }
        return acc;
    }

    /// Replace variable i by images[i]; coefficients are converted with `conv`.
    template <class S, class Conv>
    MultiPoly<S> substitute(const std::vector<MultiPoly<S>>& images, Conv conv) const {
        if (images.size() != nvars()) fail(ErrorKind::DimensionMismatch, "substitution has wrong arity");
        if (images.empty()) fail(ErrorKind::DimensionMismatch, "substitution needs a target ring");
        const auto& proto = images.front();
        MultiPoly<S> out = proto.zero_like();
        // cache powers per variable
        std::vector<std::vector<MultiPoly<S>>> powers(nvars());
        auto power = [&](std::size_t i, unsigned e) -> const MultiPoly<S>& {
            auto& v = powers[i];
            if (v.empty()) v.push_back(proto.one_like());
            while (v.size() <= e) v.push_back(v.back() * images[i]);
            return v[e];
        };
        for (const auto& [m, c] : terms_) {
            MultiPoly<S> t = proto.constant_like(conv(c));
            for (std::size_t i = 0; i < m.exps.size(); ++i)
                if (m.exps[i]) t *= power(i, m.exps[i]);
            out += t;
        }
        return out;
    }

    MultiPoly substitute(const std::vector<MultiPoly>& images) const {
        return substitute<R>(images, [](const R& c) { return c; });
    }

    /// Same terms, coefficients mapped into another ring.
    template <class S, class Conv>
    MultiPoly<S> map_coefficients(typename CoeffTraits<S>::Context ctx, Conv conv) const {
        MultiPoly<S> out(std::move(ctx), vars_);
        for (const auto& [m, c] : terms_) out.add_term(m, conv(c));
        return out;
    }

    /// Same terms, re-labelled into a variable list; `index_map[i]` is the
    /// new index of variable i.
    MultiPoly rename(VarList target, const std::vector<std::size_t>& index_map) const {
        MultiPoly out(ctx_, std::move(target));
        for (const auto& [m, c] : terms_) {
            Monomial nm(out.nvars());
            for (std::size_t i = 0; i < m.exps.size(); ++i) {
                if (m.exps[i] == 0) continue;
                if (index_map[i] >= out.nvars()) fail(ErrorKind::DimensionMismatch, "rename target too small");
                nm.exps[index_map[i]] = static_cast<std::uint16_t>(nm.exps[index_map[i]] + m.exps[i]);
            }
            out.add_term(nm, c);
        }
        return out;
    }

    /// Canonical text: graded-lex order, explicit `*` and `^`.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            const bool neg = Traits::is_negative(c);
            const R mag = neg ? Traits::zero(ctx_) - c : c;
            if (first)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            first = false;
            std::string mono = monomial_string(m);
            if (mono.empty()) {
                out += Traits::to_string(mag);
            } else if (Traits::is_one(mag)) {
                out += mono;
            } else if (Traits::compound(mag)) {
                out += "(" + Traits::to_string(mag) + ")*" + mono;
            } else {
                out += Traits::to_string(mag) + "*" + mono;
            }
        }
        return out;
    }

    std::string monomial_string(const Monomial& m) const {
        std::string out;
        for (std::size_t i = 0; i < m.exps.size(); ++i) {
            if (m.exps[i] == 0) continue;
            if (!out.empty()) out += "*";
            out += (*vars_)[i];
            if (m.exps[i] > 1) out += "^" + std::to_string(m.exps[i]);
        }
        return out;
    }

private:
    void check(const MultiPoly& o) const {
        if (!same_vars(vars_, o.vars_)) fail(ErrorKind::RingMismatch, "polynomials over different variables");
        if (ctx_ != o.ctx_) fail(ErrorKind::RingMismatch, "polynomials over different coefficient rings");
    }

    Context ctx_;
    VarList vars_;
    TermMap terms_;
};

using IntPoly = MultiPoly<Integer>;
using Poly = MultiPoly<Scalar>;

/// Divide every coefficient by `divisor`; NotDivisible names the first
/// (graded-lex largest) monomial whose coefficient is not divisible.
inline IntPoly exact_int_div(const IntPoly& poly, const Integer& divisor) {
    if (divisor == 0) fail(ErrorKind::DivisionByZero, "exact_int_div by zero");
    IntPoly out = poly.zero_like();
    for (const auto& [m, c] : poly.terms()) {
        if (!mpz_divisible_p(c.get_mpz_t(), divisor.get_mpz_t())) {
            std::string mono = poly.monomial_string(m);
            fail(ErrorKind::NotDivisible, "coefficient of " + (mono.empty() ? std::string("1") : mono) +
                                              " not divisible by " + divisor.get_str());
        }
        out.add_term(m, Integer(c / divisor));
    }
    return out;
}

/// Image of an integer polynomial in a field.
inline Poly to_field(const IntPoly& p, Field f) {
    return p.map_coefficients<Scalar>(f, [f](const Integer& c) { return Scalar::from_mpz(f, c); });
}

/// Embed a polynomial over F_p into an extension of F_p.
inline Poly embed(const Poly& p, Field target) {
    return p.map_coefficients<Scalar>(target, [target](const Scalar& c) { return c.embed(target); });
}

} // namespace qbundle
