#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "errors.hpp"

namespace qcong {

/// Exact rational scalar. mpq_class keeps numerator/denominator coprime with
/// a positive denominator once canonicalized; every helper here returns a
/// canonical value.
using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1)
{
    if (den == 0) throw DivByZero("rational with zero denominator");
    Rational r{BigInt{static_cast<long>(num)}, BigInt{static_cast<long>(den)}};
    r.canonicalize();
    return r;
}

/// Parses "a", "-a", "a/b" (base 10).
inline Rational parse_rational(std::string_view text)
{
    std::string s{text};
    if (s.empty()) throw ConfigError("empty rational literal");
    Rational r;
    if (r.set_str(s, 10) != 0) throw ConfigError("malformed rational literal '" + s + "'");
    if (r.get_den() == 0) throw DivByZero("rational literal with zero denominator");
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

/// r^e for any integer e (r != 0 when e < 0).
inline Rational pow(const Rational& r, std::int64_t e)
{
    if (e < 0) {
        if (r == 0) throw DivByZero("zero raised to a negative power");
        Rational inv = 1 / r;
        return pow(inv, -e);
    }
    BigInt num, den;
    mpz_pow_ui(num.get_mpz_t(), r.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(den.get_mpz_t(), r.get_den_mpz_t(), static_cast<unsigned long>(e));
    Rational out{num, den};
    out.canonicalize();
    return out;
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational{-r} : r; }

} // namespace qcong
