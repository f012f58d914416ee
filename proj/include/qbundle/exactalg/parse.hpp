#pragma once

// Recursive-descent parser for polynomial expressions:
//
//   expr    := term (('+' | '-') term)*
//   term    := factor ('*' factor)*
//   factor  := ('+' | '-') factor | power
//   power   := primary ('^' INTEGER)?
//   primary := INTEGER ('/' INTEGER)? | IDENT | '(' expr ')'
//
// Identifiers are looked up in the variable list; over an extension field the
// generator name (default `a`) denotes the field generator.

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "qbundle/error.hpp"
#include "qbundle/exactalg/field.hpp"
#include "qbundle/exactalg/poly.hpp"

namespace qbundle {

namespace detail {

template <class R>
class PolyParser {
public:
    using P = MultiPoly<R>;
    using Traits = CoeffTraits<R>;

    PolyParser(std::string_view text, VarList vars, typename Traits::Context ctx)
        : text_(text), vars_(std::move(vars)), ctx_(std::move(ctx)) {}

    P parse() {
        P result = expr();
        skip_ws();
        if (pos_ != text_.size()) syntax("unexpected '" + std::string(1, text_[pos_]) + "'");
        return result;
    }

private:
    [[noreturn]] void syntax(const std::string& msg) {
        throw Error(ErrorKind::SyntaxError, msg + " at offset " + std::to_string(pos_), pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    P expr() {
        P acc = term();
        for (;;) {
            if (peek('+')) {
                ++pos_;
                acc += term();
            } else if (peek('-')) {
                ++pos_;
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    P term() {
        P acc = factor();
        while (peek('*')) {
            ++pos_;
            acc *= factor();
        }
        return acc;
    }

    P factor() {
        if (peek('-')) {
            ++pos_;
            return -factor();
        }
        if (peek('+')) {
            ++pos_;
            return factor();
        }
        return power();
    }

    P power() {
        P base = primary();
        if (!peek('^')) return base;
        ++pos_;
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            throw Error(ErrorKind::NonIntegerExponent,
                        "exponent must be a nonnegative integer literal at offset " + std::to_string(pos_), pos_);
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == '/'))
            throw Error(ErrorKind::NonIntegerExponent,
                        "exponent must be a nonnegative integer literal at offset " + std::to_string(start), start);
        const std::string digits(text_.substr(start, pos_ - start));
        if (digits.size() > 5 || std::stoul(digits) > 65535)
            throw Error(ErrorKind::NonIntegerExponent, "exponent too large at offset " + std::to_string(start), start);
        return base.pow(static_cast<unsigned>(std::stoul(digits)));
    }

    std::string read_digits() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    P primary() {
        skip_ws();
        if (pos_ >= text_.size()) syntax("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            P inner = expr();
            if (!peek(')')) syntax("expected ')'");
            ++pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mpq_class value{mpz_class{read_digits()}};
            if (peek('/')) {
                ++pos_;
                skip_ws();
                if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    syntax("expected integer denominator");
                const std::size_t at = pos_;
                mpz_class den(read_digits());
                if (den == 0) throw Error(ErrorKind::SyntaxError, "zero denominator at offset " + std::to_string(at), at);
                value = mpq_class(value.get_num(), den);
                value.canonicalize();
            }
            try {
                return P::constant(ctx_, vars_, Traits::from_rational(ctx_, value));
            } catch (const Error& e) {
                throw Error(ErrorKind::SyntaxError, std::string(e.what()) + " at offset " + std::to_string(pos_), pos_);
            }
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name(text_.substr(start, pos_ - start));
            for (std::size_t i = 0; i < vars_->size(); ++i)
                if ((*vars_)[i] == name) return P::variable(ctx_, vars_, i);
            if (auto k = Traits::named_constant(ctx_, name)) return P::constant(ctx_, vars_, *k);
            throw Error(ErrorKind::UnknownVariable, "unknown variable '" + name + "' at offset " + std::to_string(start),
                        start);
        }
        syntax("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    VarList vars_;
    typename Traits::Context ctx_;
    std::size_t pos_ = 0;
};

} // namespace detail

template <class R>
MultiPoly<R> parse_poly(std::string_view text, VarList vars, typename CoeffTraits<R>::Context ctx) {
    return detail::PolyParser<R>(text, std::move(vars), std::move(ctx)).parse();
}

inline Poly parse_poly(std::string_view text, VarList vars, Field f) {
    return parse_poly<Scalar>(text, std::move(vars), f);
}

inline IntPoly parse_int_poly(std::string_view text, VarList vars) {
    return parse_poly<Integer>(text, std::move(vars), IntegerRing{});
}

/// Field spec: `Q`, `F_<q>`, `F<q>`, `GF(<q>)` or `GF(<p>^<k>)`, optionally
/// followed by `mod <monic polynomial in a>` for extension fields.
inline Field parse_field(std::string_view spec) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    spec = trim(spec);
    std::string_view modulus_text;
    if (auto at = spec.find(" mod "); at != std::string_view::npos) {
        modulus_text = trim(spec.substr(at + 5));
        spec = trim(spec.substr(0, at));
    }
    if (spec == "Q" || spec == "QQ" || spec == "Rationals") {
        if (!modulus_text.empty()) fail(ErrorKind::BadFieldSpec, "Q takes no modulus");
        return Field::rationals();
    }
    std::string_view body;
    bool paren = false;
    if (spec.starts_with("GF(")) {
        body = spec.substr(3);
        paren = true;
    } else if (spec.starts_with("F_")) {
        body = spec.substr(2);
    } else if (spec.starts_with("F")) {
        body = spec.substr(1);
    } else {
        fail(ErrorKind::BadFieldSpec, "unrecognized field '" + std::string(spec) + "'");
    }
    if (paren) {
        if (!body.ends_with(")")) fail(ErrorKind::BadFieldSpec, "missing ')' in field spec");
        body.remove_suffix(1);
    }
    auto to_uint = [&](std::string_view s) -> std::uint32_t {
        if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(c); }))
            fail(ErrorKind::BadFieldSpec, "bad number in field spec '" + std::string(spec) + "'");
        return static_cast<std::uint32_t>(std::stoul(std::string(s)));
    };
    std::uint32_t p = 0, k = 1;
    if (auto caret = body.find('^'); caret != std::string_view::npos) {
        p = to_uint(body.substr(0, caret));
        k = to_uint(body.substr(caret + 1));
        if (!is_prime(p)) fail(ErrorKind::BadFieldSpec, std::to_string(p) + " is not prime");
    } else {
        const std::uint32_t q = to_uint(body);
        Field f = Field::finite(q);
        p = f.characteristic();
        k = f.degree();
    }
    if (modulus_text.empty()) return Field::extension(p, k);
    if (k == 1) fail(ErrorKind::BadFieldSpec, "prime fields take no modulus");
    Poly m = parse_poly(modulus_text, make_vars({"a"}), Field::prime(p));
    std::vector<std::uint32_t> coeffs(k + 1, 0);
    for (const auto& [mono, c] : m.terms()) {
        if (mono.exps[0] > k) fail(ErrorKind::BadFieldSpec, "modulus degree exceeds extension degree");
        coeffs[mono.exps[0]] = c.code();
    }
    return Field::extension(p, k, coeffs);
}

} // namespace qbundle
