#pragma once

// Exact scalars: the rationals (arbitrary precision), prime fields F_p and
// small extension fields F_{p^k} = F_p[a]/(modulus).

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qbundle/error.hpp"

namespace qbundle {

enum class FieldKind { Rationals, Prime, Extension };

inline constexpr std::uint32_t kMaxExtensionPrime = 97;
inline constexpr std::uint32_t kMaxExtensionDegree = 4;

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

namespace detail {

struct FieldData {
    FieldKind kind = FieldKind::Rationals;
    std::uint32_t p = 0;
    std::uint32_t k = 1;
    std::uint32_t order = 0;              // 0 for Q
    std::vector<std::uint32_t> modulus;   // monic, low -> high, size k+1 (extension only)
    bool default_modulus = true;
    std::string generator = "a";
};

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

// Dense polynomials over F_p, low -> high, used only for moduli.
using SmallPoly = std::vector<std::uint32_t>;

inline void trim(SmallPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline SmallPoly poly_mod(SmallPoly a, const SmallPoly& m, std::uint32_t p) {
    trim(a);
    const std::size_t dm = m.size() - 1;
    const std::uint64_t inv_lead = powmod(m.back(), p - 2, p);
    while (a.size() > dm) {
        const std::size_t shift = a.size() - 1 - dm;
        const std::uint64_t c = a.back() * inv_lead % p;
        for (std::size_t i = 0; i <= dm; ++i)
            a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - c * m[i] % p) % p);
        trim(a);
    }
    return a;
}

inline bool is_irreducible(const SmallPoly& m, std::uint32_t p) {
    const std::size_t k = m.size() - 1;
    if (k <= 1) return k == 1;
    // Trial division by every monic polynomial of degree 1..k/2.
    for (std::size_t d = 1; d <= k / 2; ++d) {
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < d; ++i) count *= p;
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            SmallPoly f(d + 1, 0);
            std::uint64_t t = idx;
            for (std::size_t i = 0; i < d; ++i) {
                f[i] = static_cast<std::uint32_t>(t % p);
                t /= p;
            }
            f[d] = 1;
            if (poly_mod(m, f, p).empty()) return false;
        }
    }
    return true;
}

inline SmallPoly default_modulus(std::uint32_t p, std::uint32_t k) {
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < k; ++i) count *= p;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        SmallPoly m(k + 1, 0);
        std::uint64_t t = idx;
        for (std::uint32_t i = 0; i < k; ++i) {
            m[i] = static_cast<std::uint32_t>(t % p);
            t /= p;
        }
        m[k] = 1;
        if (is_irreducible(m, p)) return m;
    }
    fail(ErrorKind::BadFieldSpec, "no irreducible polynomial found");
}

class FieldRegistry {
public:
    static FieldRegistry& instance() {
        static FieldRegistry reg;
        return reg;
    }

    const FieldData* intern(FieldData data) {
        auto key = std::make_tuple(static_cast<int>(data.kind), data.p, data.k, data.modulus);
        std::lock_guard<std::mutex> lock(mu_);
        auto it = fields_.find(key);
        if (it != fields_.end()) return it->second.get();
        auto owned = std::make_unique<FieldData>(std::move(data));
        const FieldData* ptr = owned.get();
        fields_.emplace(std::move(key), std::move(owned));
        return ptr;
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, std::uint32_t, std::uint32_t, SmallPoly>, std::unique_ptr<FieldData>> fields_;
};

} // namespace detail

/// Handle to an interned, immutable field descriptor. Equality is identity.
class Field {
public:
    Field() : d_(rationals().d_) {}

    static Field rationals() {
        static const detail::FieldData* d = detail::FieldRegistry::instance().intern(detail::FieldData{});
        return Field(d);
    }

    static Field prime(std::uint32_t p) {
        if (!is_prime(p) || p >= (1u << 31))
            fail(ErrorKind::BadFieldSpec, std::to_string(p) + " is not a prime below 2^31");
        detail::FieldData d;
        d.kind = FieldKind::Prime;
        d.p = p;
        d.order = p;
        return Field(detail::FieldRegistry::instance().intern(std::move(d)));
    }

    static Field extension(std::uint32_t p, std::uint32_t k) {
        check_extension_bounds(p, k);
        if (k == 1) return prime(p);
        return extension(p, k, detail::default_modulus(p, k), true);
    }

    /// `modulus` is monic of degree k, coefficients low -> high.
    static Field extension(std::uint32_t p, std::uint32_t k, std::vector<std::uint32_t> modulus) {
        check_extension_bounds(p, k);
        for (auto& c : modulus) c %= p;
        detail::trim(modulus);
        if (modulus.size() != k + 1 || modulus.back() != 1)
            fail(ErrorKind::BadFieldSpec, "modulus must be monic of degree " + std::to_string(k));
        if (!detail::is_irreducible(modulus, p))
            fail(ErrorKind::BadFieldSpec, "modulus is reducible over F_" + std::to_string(p));
        const bool is_default = modulus == detail::default_modulus(p, k);
        return extension(p, k, std::move(modulus), is_default);
    }

    /// Field with q elements (q a prime power), default modulus.
    static Field finite(std::uint32_t q) {
        for (std::uint32_t p = 2; p <= q; ++p) {
            if (q % p != 0) continue;
            if (!is_prime(p)) continue;
            std::uint32_t k = 0;
            std::uint32_t t = q;
            while (t % p == 0) {
                t /= p;
                ++k;
            }
            if (t != 1) break;
            return k == 1 ? prime(p) : extension(p, k);
        }
        fail(ErrorKind::BadFieldSpec, std::to_string(q) + " is not a prime power");
    }

    FieldKind kind() const { return d_->kind; }
    bool is_finite() const { return d_->kind != FieldKind::Rationals; }
    std::uint32_t characteristic() const { return d_->p; }
    std::uint32_t degree() const { return d_->k; }
    /// Number of elements; 0 for Q.
    std::uint32_t order() const { return d_->order; }
    const std::vector<std::uint32_t>& modulus() const { return d_->modulus; }
    const std::string& generator() const { return d_->generator; }
    bool has_default_modulus() const { return d_->default_modulus; }

    Field prime_subfield() const { return is_finite() ? prime(d_->p) : *this; }

    /// Canonical spec string, accepted by parse().
    std::string spec() const;

    bool operator==(const Field& o) const { return d_ == o.d_; }
    bool operator!=(const Field& o) const { return d_ != o.d_; }

    const detail::FieldData* data() const { return d_; }

private:
    explicit Field(const detail::FieldData* d) : d_(d) {}

    static void check_extension_bounds(std::uint32_t p, std::uint32_t k) {
        if (!is_prime(p)) fail(ErrorKind::BadFieldSpec, std::to_string(p) + " is not prime");
        if (k == 0) fail(ErrorKind::BadFieldSpec, "extension degree must be positive");
        if (k > 1 && (p > kMaxExtensionPrime || k > kMaxExtensionDegree))
            fail(ErrorKind::BadFieldSpec, "extension fields limited to p <= 97 and k <= 4");
    }

    static Field extension(std::uint32_t p, std::uint32_t k, std::vector<std::uint32_t> modulus, bool is_default) {
        detail::FieldData d;
        d.kind = FieldKind::Extension;
        d.p = p;
        d.k = k;
        d.order = 1;
        for (std::uint32_t i = 0; i < k; ++i) d.order *= p;
        d.modulus = std::move(modulus);
        d.default_modulus = is_default;
        return Field(detail::FieldRegistry::instance().intern(std::move(d)));
    }

    const detail::FieldData* d_;

    friend class Scalar;
};

/// An element of a Field in canonical form: reduced fraction for Q, a residue
/// in [0,p) for F_p, and for F_{p^k} the base-p packing of the coefficient
/// vector (low coefficient in the lowest digit).
class Scalar {
public:
    /// Placeholder value with no field; only assignment and destruction are valid.
    Scalar() = default;

    static Scalar zero(Field f) { return Scalar(f.data(), 0); }
    static Scalar one(Field f) {
        Scalar s(f.data(), 1);
        if (!f.is_finite()) s.q_ = 1;
        return s;
    }

    static Scalar from_int(Field f, long long n) {
        if (!f.is_finite()) {
            Scalar s(f.data(), 0);
            s.q_ = mpq_class(mpz_class(std::to_string(n)));
            return s;
        }
        const long long p = f.characteristic();
        long long r = n % p;
        if (r < 0) r += p;
        return Scalar(f.data(), static_cast<std::uint32_t>(r));
    }

    static Scalar from_mpz(Field f, const mpz_class& n) {
        if (!f.is_finite()) {
            Scalar s(f.data(), 0);
            s.q_ = n;
            return s;
        }
        mpz_class r = n % f.characteristic();
        if (r < 0) r += f.characteristic();
        return Scalar(f.data(), static_cast<std::uint32_t>(r.get_ui()));
    }

    /// Throws DivisionByZero when the denominator vanishes in `f`.
    static Scalar from_rational(Field f, const mpq_class& x) {
        if (!f.is_finite()) {
            Scalar s(f.data(), 0);
            s.q_ = x;
            s.q_.canonicalize();
            return s;
        }
        Scalar den = from_mpz(f, x.get_den());
        if (den.is_zero()) fail(ErrorKind::DivisionByZero, "denominator vanishes in " + f.spec());
        return from_mpz(f, x.get_num()) / den;
    }

    /// Finite fields only: the element with packed code `code` (0 <= code < order).
    static Scalar from_code(Field f, std::uint32_t code) {
        if (!f.is_finite() || code >= f.order()) fail(ErrorKind::RingMismatch, "invalid element code");
        return Scalar(f.data(), code);
    }

    /// The class of the generator `a` in F_p[a]/(modulus).
    static Scalar generator(Field f) {
        if (f.kind() != FieldKind::Extension) fail(ErrorKind::RingMismatch, "field has no generator");
        return Scalar(f.data(), f.characteristic());
    }

    static std::vector<Scalar> elements(Field f) {
        if (!f.is_finite()) fail(ErrorKind::Unsupported, "cannot enumerate Q");
        std::vector<Scalar> out;
        out.reserve(f.order());
        for (std::uint32_t c = 0; c < f.order(); ++c) out.push_back(Scalar(f.data(), c));
        return out;
    }

    /// Uniform random element of a finite field; small random fraction over Q.
    template <class Rng>
    static Scalar random(Field f, Rng& rng) {
        if (f.is_finite()) {
            std::uniform_int_distribution<std::uint32_t> dist(0, f.order() - 1);
            return Scalar(f.data(), dist(rng));
        }
        std::uniform_int_distribution<int> num(-9, 9);
        std::uniform_int_distribution<int> den(1, 4);
        return from_rational(f, mpq_class(num(rng), den(rng)));
    }

    Field field() const;
    bool valid() const { return f_ != nullptr; }

    bool is_zero() const { return f_->kind == FieldKind::Rationals ? sgn(q_) == 0 : v_ == 0; }
    bool is_one() const { return f_->kind == FieldKind::Rationals ? q_ == 1 : v_ == 1; }

    const mpq_class& rational() const { return q_; }
    std::uint32_t code() const { return v_; }

    /// Coefficients c_0..c_{k-1} of an extension element (k = 1 for F_p).
    std::vector<std::uint32_t> digits() const {
        std::vector<std::uint32_t> d(f_->k);
        std::uint32_t t = v_;
        for (std::uint32_t i = 0; i < f_->k; ++i) {
            d[i] = t % f_->p;
            t /= f_->p;
        }
        return d;
    }

    /// True when the element lies in the prime subfield.
    bool in_prime_subfield() const { return f_->kind == FieldKind::Rationals || v_ < f_->p; }

    Scalar operator+(const Scalar& o) const {
        check(o);
        switch (f_->kind) {
        case FieldKind::Rationals: {
            Scalar s(f_, 0);
            s.q_ = q_ + o.q_;
            return s;
        }
        case FieldKind::Prime:
            return Scalar(f_, static_cast<std::uint32_t>((std::uint64_t(v_) + o.v_) % f_->p));
        case FieldKind::Extension:
            return Scalar(f_, digitwise(v_, o.v_, true));
        }
        return *this;
    }

    Scalar operator-(const Scalar& o) const {
        check(o);
        switch (f_->kind) {
        case FieldKind::Rationals: {
            Scalar s(f_, 0);
            s.q_ = q_ - o.q_;
            return s;
        }
        case FieldKind::Prime:
            return Scalar(f_, static_cast<std::uint32_t>((std::uint64_t(v_) + f_->p - o.v_) % f_->p));
        case FieldKind::Extension:
            return Scalar(f_, digitwise(v_, o.v_, false));
        }
        return *this;
    }

    Scalar operator-() const { return zero(field()) - *this; }

    Scalar operator*(const Scalar& o) const {
        check(o);
        switch (f_->kind) {
        case FieldKind::Rationals: {
            Scalar s(f_, 0);
            s.q_ = q_ * o.q_;
            return s;
        }
        case FieldKind::Prime:
            return Scalar(f_, static_cast<std::uint32_t>(std::uint64_t(v_) * o.v_ % f_->p));
        case FieldKind::Extension:
            return Scalar(f_, ext_mul(v_, o.v_));
        }
        return *this;
    }

    Scalar inverse() const {
        if (is_zero()) fail(ErrorKind::DivisionByZero, "inverse of zero");
        switch (f_->kind) {
        case FieldKind::Rationals: {
            Scalar s(f_, 0);
            s.q_ = 1 / q_;
            return s;
        }
        case FieldKind::Prime:
            return Scalar(f_, static_cast<std::uint32_t>(detail::powmod(v_, f_->p - 2, f_->p)));
        case FieldKind::Extension:
            return pow(f_->order - 2);
        }
        return *this;
    }

    Scalar operator/(const Scalar& o) const { return *this * o.inverse(); }

    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    Scalar pow(std::uint64_t e) const {
        Scalar r = one(field());
        Scalar b = *this;
        while (e) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    bool operator==(const Scalar& o) const {
        if (f_ != o.f_) return false;
        return f_ == nullptr || (f_->kind == FieldKind::Rationals ? q_ == o.q_ : v_ == o.v_);
    }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    /// Total order used only for canonical sorting.
    bool operator<(const Scalar& o) const {
        check(o);
        return f_->kind == FieldKind::Rationals ? q_ < o.q_ : v_ < o.v_;
    }

    /// Move an element of F_p into an extension of F_p, or leave it unchanged.
    Scalar embed(Field target) const {
        if (target.data() == f_) return *this;
        if (f_->kind == FieldKind::Prime && target.is_finite() && target.characteristic() == f_->p)
            return Scalar(target.data(), v_);
        fail(ErrorKind::RingMismatch, "cannot embed " + field().spec() + " into " + target.spec());
    }

    /// Printed form using the expression grammar: integers or a/b over Q,
    /// residues for F_p, polynomials in the generator for extensions.
    std::string to_string() const {
        switch (f_->kind) {
        case FieldKind::Rationals: return q_.get_str();
        case FieldKind::Prime: return std::to_string(v_);
        case FieldKind::Extension: break;
        }
        auto d = digits();
        std::string out;
        for (std::size_t i = d.size(); i-- > 0;) {
            if (d[i] == 0) continue;
            if (!out.empty()) out += " + ";
            if (i == 0) {
                out += std::to_string(d[i]);
                continue;
            }
            if (d[i] != 1) out += std::to_string(d[i]) + "*";
            out += f_->generator;
            if (i > 1) out += "^" + std::to_string(i);
        }
        return out.empty() ? "0" : out;
    }

    /// Whether to_string() needs parentheses when used as a product factor.
    bool compound() const {
        if (f_->kind != FieldKind::Extension) return false;
        auto d = digits();
        return std::count_if(d.begin(), d.end(), [](std::uint32_t c) { return c != 0; }) > 1;
    }

private:
    Scalar(const detail::FieldData* f, std::uint32_t v) : f_(f), v_(v) {}

    void check(const Scalar& o) const {
        if (f_ != o.f_ || f_ == nullptr) fail(ErrorKind::RingMismatch, "scalars from different fields");
    }

    std::uint32_t digitwise(std::uint32_t a, std::uint32_t b, bool add) const {
        const std::uint32_t p = f_->p;
        std::uint32_t out = 0, scale = 1;
        for (std::uint32_t i = 0; i < f_->k; ++i) {
            const std::uint32_t x = a % p, y = b % p;
            a /= p;
            b /= p;
            out += ((add ? x + y : x + p - y) % p) * scale;
            scale *= p;
        }
        return out;
    }

    std::uint32_t ext_mul(std::uint32_t a, std::uint32_t b) const {
        const std::uint32_t p = f_->p, k = f_->k;
        std::array<std::uint64_t, 2 * kMaxExtensionDegree> prod{};
        std::array<std::uint32_t, kMaxExtensionDegree> x{}, y{};
        for (std::uint32_t i = 0; i < k; ++i) {
            x[i] = a % p;
            a /= p;
            y[i] = b % p;
            b /= p;
        }
        for (std::uint32_t i = 0; i < k; ++i)
            for (std::uint32_t j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + std::uint64_t(x[i]) * y[j]) % p;
        const auto& m = f_->modulus;
        for (std::uint32_t d = 2 * k - 2; d >= k; --d) {
            const std::uint64_t c = prod[d];
            if (c == 0) continue;
            prod[d] = 0;
            for (std::uint32_t i = 0; i < k; ++i) prod[d - k + i] = (prod[d - k + i] + p - c * m[i] % p) % p;
        }
        std::uint32_t out = 0, scale = 1;
        for (std::uint32_t i = 0; i < k; ++i) {
            out += static_cast<std::uint32_t>(prod[i]) * scale;
            scale *= p;
        }
        return out;
    }

    const detail::FieldData* f_ = nullptr;
    std::uint32_t v_ = 0;
    mpq_class q_;
};

inline Field Scalar::field() const {
    if (f_ == nullptr) fail(ErrorKind::RingMismatch, "scalar has no field");
    return Field(f_);
}

inline std::string Field::spec() const {
    switch (d_->kind) {
    case FieldKind::Rationals: return "Q";
    case FieldKind::Prime: return "F_" + std::to_string(d_->p);
    case FieldKind::Extension: break;
    }
    std::string out = "F_" + std::to_string(d_->order);
    if (d_->default_modulus) return out;
    std::string m;
    for (std::size_t i = d_->modulus.size(); i-- > 0;) {
        const auto c = d_->modulus[i];
        if (c == 0) continue;
        if (!m.empty()) m += " + ";
        if (i == 0) {
            m += std::to_string(c);
            continue;
        }
        if (c != 1) m += std::to_string(c) + "*";
        m += d_->generator;
        if (i > 1) m += "^" + std::to_string(i);
    }
    return out + " mod " + m;
}

} // namespace qbundle
