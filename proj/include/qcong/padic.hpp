#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "congruence.hpp"
#include "errors.hpp"
#include "rational.hpp"

namespace qcong {

inline bool is_prime(std::int64_t n)
{
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// Residue class in Z/p^k.
class PadicInt {
public:
    PadicInt(std::uint64_t p, int k, std::uint64_t residue = 0) : p_(p), k_(k), modulus_(1)
    {
        if (p < 2) throw OutOfRange("p must be >= 2");
        if (k < 1) throw OutOfRange("precision k must be >= 1");
        for (int i = 0; i < k; ++i) {
            if (modulus_ > (std::uint64_t{1} << 62) / p) throw OutOfRange("p^k too large");
            modulus_ *= p;
        }
        residue_ = residue % modulus_;
    }

    std::uint64_t prime() const { return p_; }
    int precision() const { return k_; }
    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t residue() const { return residue_; }
    bool is_unit() const { return residue_ % p_ != 0; }

    PadicInt& operator+=(const PadicInt& o)
    {
        same_ring(o);
        residue_ = (residue_ + o.residue_) % modulus_;
        return *this;
    }
    PadicInt& operator-=(const PadicInt& o)
    {
        same_ring(o);
        residue_ = (residue_ + modulus_ - o.residue_) % modulus_;
        return *this;
    }
    PadicInt& operator*=(const PadicInt& o)
    {
        same_ring(o);
        residue_ = mulmod(residue_, o.residue_);
        return *this;
    }
    PadicInt& operator/=(const PadicInt& o)
    {
        same_ring(o);
        return *this *= o.inverse();
    }

    PadicInt operator-() const { return PadicInt(p_, k_, (modulus_ - residue_) % modulus_); }

    PadicInt inverse() const
    {
        if (!is_unit()) throw NonUnitDenominator("division by a non-unit residue");
        // extended Euclid on signed values
        std::int64_t t = 0, new_t = 1;
        auto r = static_cast<std::int64_t>(modulus_), new_r = static_cast<std::int64_t>(residue_);
        while (new_r != 0) {
            const std::int64_t quot = r / new_r;
            t = std::exchange(new_t, t - quot * new_t);
            r = std::exchange(new_r, r - quot * new_r);
        }
        if (t < 0) t += static_cast<std::int64_t>(modulus_);
        return PadicInt(p_, k_, static_cast<std::uint64_t>(t));
    }

    PadicInt pow(std::uint64_t e) const
    {
        PadicInt base = *this, out(p_, k_, 1);
        while (e) {
            if (e & 1) out *= base;
            base *= base;
            e >>= 1;
        }
        return out;
    }

    friend PadicInt operator+(PadicInt a, const PadicInt& b) { return a += b; }
    friend PadicInt operator-(PadicInt a, const PadicInt& b) { return a -= b; }
    friend PadicInt operator*(PadicInt a, const PadicInt& b) { return a *= b; }
    friend PadicInt operator/(PadicInt a, const PadicInt& b) { return a /= b; }
    friend bool operator==(const PadicInt&, const PadicInt&) = default;

private:
    std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) const
    {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % modulus_);
    }
    void same_ring(const PadicInt& o) const
    {
        if (o.p_ != p_ || o.k_ != k_) throw OutOfRange("mixing residues of different rings");
    }

    std::uint64_t p_;
    int k_;
    std::uint64_t modulus_;
    std::uint64_t residue_ = 0;
};

/// a/b -> a * b^{-1} mod p^k.
inline PadicInt embed(const Rational& r, std::uint64_t p, int k)
{
    PadicInt zero(p, k);
    const BigInt mod{static_cast<unsigned long>(zero.modulus())};
    if (mpz_divisible_ui_p(r.get_den_mpz_t(), static_cast<unsigned long>(p)))
        throw NonUnitDenominator(r.get_str() + " has a denominator divisible by " + std::to_string(p));
    BigInt num, inv;
    mpz_mod(num.get_mpz_t(), r.get_num_mpz_t(), mod.get_mpz_t());
    mpz_invert(inv.get_mpz_t(), r.get_den_mpz_t(), mod.get_mpz_t());
    BigInt res = num * inv % mod;
    return PadicInt(p, k, res.get_ui());
}

/// Rising factorial (a)_m = a (a+1) ... (a+m-1).
inline Rational rising(const Rational& a, std::int64_t m)
{
    if (m < 0) throw OutOfRange("rising factorial needs m >= 0");
    Rational r = 1;
    for (std::int64_t j = 0; j < m; ++j) r *= a + j;
    return r;
}

/// Gamma_p(x) mod p^k, evaluated at the representative X in [1, p^k] of x:
/// Gamma_p(X) = (-1)^X prod_{0<j<X, p∤j} j. Gamma_p is 1-Lipschitz for odd
/// p, so this is Gamma_p(x) mod p^k.
inline PadicInt gamma_p(const Rational& x, std::uint64_t p, int k)
{
    const PadicInt xr = embed(x, p, k);
    const std::uint64_t X = xr.residue() == 0 ? xr.modulus() : xr.residue();
    const std::uint64_t mod = xr.modulus();
    unsigned __int128 prod = 1;
    for (std::uint64_t j = 1; j < X; ++j)
        if (j % p != 0) prod = prod * j % mod;
    auto value = static_cast<std::uint64_t>(prod);
    if (X % 2 == 1) value = (mod - value) % mod;
    return PadicInt(p, k, value);
}

enum class ClassicalFamily { B2, H2, LR, COR13, SIDE, MP, HAMME0, RF34 };

inline std::string_view classical_name(ClassicalFamily f)
{
    switch (f) {
    case ClassicalFamily::B2: return "B2";
    case ClassicalFamily::H2: return "H2";
    case ClassicalFamily::LR: return "LR";
    case ClassicalFamily::COR13: return "COR13";
    case ClassicalFamily::SIDE: return "SIDE";
    case ClassicalFamily::MP: return "MP";
    case ClassicalFamily::HAMME0: return "HAMME0";
    case ClassicalFamily::RF34: return "RF34";
    }
    return "?";
}

/// A_k = ((1/2)_k / k!)^3
inline Rational a_term(std::int64_t k)
{
    const Rational r = rising(Rational{1, 2}, k) / rising(Rational{1}, k);
    return r * r * r;
}

/// ((-1/2)_k / k!)^3
inline Rational neg_half_term(std::int64_t k)
{
    const Rational r = rising(Rational{-1, 2}, k) / rising(Rational{1}, k);
    return r * r * r;
}

/// Both sides of a classical congruence before reduction.
struct ClassicalSides {
    std::optional<Rational> lhs_rational;
    std::optional<Rational> rhs_rational;
    std::optional<PadicInt> lhs_residue; ///< when the side involves Gamma_p
    std::optional<PadicInt> rhs_residue;
    int precision = 2;
};

namespace detail {

inline void require_odd_prime(std::int64_t p)
{
    if (p == 2) throw OutOfRange("p must be an odd prime");
    if (!is_prime(p)) throw NotPrime(std::to_string(p) + " is not prime");
}

inline Rational sign_power(std::int64_t e) { return e % 2 == 0 ? Rational{1} : Rational{-1}; }

} // namespace detail

inline ClassicalSides classical_sides(ClassicalFamily family, std::int64_t p)
{
    detail::require_odd_prime(p);
    const auto up = static_cast<std::uint64_t>(p);
    const std::int64_t h = (p - 1) / 2;
    const bool one_mod_4 = p % 4 == 1;
    ClassicalSides s;
    auto sum_a = [&] {
        Rational acc = 0;
        for (std::int64_t k = 0; k <= h; ++k) acc += a_term(k);
        return acc;
    };
    auto sum_neg = [&] {
        Rational acc = 0;
        for (std::int64_t k = 0; k <= h + 1; ++k) acc += neg_half_term(k);
        return acc;
    };
    auto gamma4 = [&](int k) { return gamma_p(Rational{1, 4}, up, k).pow(4); };

    switch (family) {
    case ClassicalFamily::B2: {
        Rational acc = 0;
        for (std::int64_t k = 0; k <= h; ++k) acc += detail::sign_power(k) * (4 * k + 1) * a_term(k);
        s.lhs_rational = acc;
        s.rhs_rational = Rational{p} * detail::sign_power(h);
        s.precision = 3;
        break;
    }
    case ClassicalFamily::H2:
        s.precision = 2;
        s.lhs_rational = sum_a();
        if (one_mod_4)
            s.rhs_residue = -gamma4(2);
        else
            s.rhs_rational = Rational{0};
        break;
    case ClassicalFamily::LR:
        s.precision = 3;
        s.lhs_rational = sum_a();
        if (one_mod_4)
            s.rhs_residue = -gamma4(3);
        else
            s.rhs_residue = embed(Rational{-p * p, 16}, up, 3) * gamma4(3);
        break;
    case ClassicalFamily::COR13:
        s.precision = one_mod_4 ? 3 : 2;
        s.lhs_rational = sum_neg();
        s.rhs_rational = Rational{p} * rising(Rational{1, 4}, h) / rising(Rational{7, 4}, h);
        break;
    case ClassicalFamily::SIDE: {
        Rational acc = 0;
        for (std::int64_t k = 0; k <= h + 1; ++k) acc += detail::sign_power(k) * (4 * k - 1) * neg_half_term(k);
        s.lhs_rational = acc;
        s.rhs_rational = Rational{p} * detail::sign_power((p + 1) / 2);
        s.precision = 3;
        break;
    }
    case ClassicalFamily::MP:
        if (!one_mod_4) throw WrongResidueClass("MP needs p = 1 (mod 4)");
        s.precision = 2;
        s.lhs_rational = sum_neg();
        s.rhs_rational = Rational{0};
        break;
    case ClassicalFamily::HAMME0: {
        if (!one_mod_4) throw WrongResidueClass("HAMME0 needs p = 1 (mod 4)");
        s.precision = 2;
        const std::int64_t r = (p - 1) / 4;
        // binom(-1/2, r) = (-1)^r (1/2)_r / r!
        s.lhs_rational = detail::sign_power(r) * rising(Rational{1, 2}, r) / rising(Rational{1}, r);
        const PadicInt g = gamma_p(Rational{1, 4}, up, 2);
        s.rhs_residue = -(g * g / gamma_p(Rational{1, 2}, up, 2));
        break;
    }
    case ClassicalFamily::RF34:
        if (one_mod_4) throw WrongResidueClass("RF34 needs p = 3 (mod 4)");
        s.precision = 2;
        s.lhs_rational = rising(Rational{3, 4}, h) / rising(Rational{5, 4}, h);
        s.rhs_residue = embed(Rational{-p, 16}, up, 2) * gamma4(2);
        break;
    }
    return s;
}

/// Reduces both sides mod p^k at the precision the congruence claims and
/// compares residues.
inline CongruenceVerdict verify_classical(ClassicalFamily family, std::int64_t p)
{
    detail::Stopwatch clock;
    const ClassicalSides s = classical_sides(family, p);
    const auto up = static_cast<std::uint64_t>(p);
    const PadicInt lhs = s.lhs_residue ? *s.lhs_residue : embed(*s.lhs_rational, up, s.precision);
    const PadicInt rhs = s.rhs_residue ? *s.rhs_residue : embed(*s.rhs_rational, up, s.precision);
    CongruenceVerdict v;
    v.family = classical_name(family);
    v.p = p;
    v.prime_power = std::make_pair(p, s.precision);
    v.passed = lhs == rhs;
    std::ostringstream detail;
    detail << "mod " << p << "^" << s.precision << ": lhs " << lhs.residue() << ", rhs " << rhs.residue();
    if (s.lhs_rational) detail << " (lhs = " << s.lhs_rational->get_str() << ")";
    v.detail = detail.str();
    v.millis = clock.millis();
    return v;
}

} // namespace qcong
