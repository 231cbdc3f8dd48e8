#pragma once

#include <cstdint>
#include <sstream>
#include <vector>

#include "congruence.hpp"
#include "errors.hpp"
#include "padic.hpp"
#include "qseries.hpp"

namespace qcong {

/// Coefficients of q * prod_{j>=1} (1 - q^{4j})^6 up to q^N.
struct EtaCoefficients {
    std::int64_t N = 0;
    std::vector<std::int64_t> a; ///< a[n] for 0 <= n <= N; a[0] = 0

    std::int64_t operator()(std::int64_t n) const
    {
        if (n < 0 || n > N) throw OutOfRange("coefficient index outside expansion range");
        return a[static_cast<std::size_t>(n)];
    }
};

inline EtaCoefficients eta_coefficients(std::int64_t N)
{
    if (N < 1) throw OutOfRange("expansion order must be >= 1");
    // expand in x = q^4, then a(4i + 1) = [x^i]
    const std::int64_t order = (N - 1) / 4;
    const PowerSeries s = infinite_product({ProductFactor{Rational{1}, 1, 1, 6}}, order);
    EtaCoefficients out;
    out.N = N;
    out.a.assign(static_cast<std::size_t>(N + 1), 0);
    for (std::int64_t i = 0; i <= order; ++i) {
        const Rational& c = s[i];
        if (!c.get_den().fits_slong_p() || c.get_den() != 1 || !c.get_num().fits_slong_p())
            throw OutOfRange("coefficient does not fit in 64 bits");
        out.a[static_cast<std::size_t>(4 * i + 1)] = c.get_num().get_si();
    }
    return out;
}

/// 2(a^2 - b^2) for p = a^2 + b^2 with a odd, b even, a, b > 0; 0 for p = 3 (mod 4).
inline std::int64_t a_p_formula(std::int64_t p)
{
    if (!is_prime(p)) throw NotPrime(std::to_string(p) + " is not prime");
    if (p == 2) throw OutOfRange("p must be odd");
    if (p % 4 == 3) return 0;
    for (std::int64_t a = 1; a * a <= p; a += 2) {
        const std::int64_t rest = p - a * a;
        std::int64_t b = 0;
        while ((b + 1) * (b + 1) <= rest) ++b;
        if (b * b == rest && b % 2 == 0) return 2 * (a * a - b * b);
    }
    throw OutOfRange("no two-squares representation found for " + std::to_string(p));
}

/// Three sub-checks at p: product coefficient vs formula, a(p) vs
/// -Gamma_p(1/4)^4 mod p^2 (p = 1 mod 4 only), and sum_{k<=(p-1)/2} A_k vs
/// a(p) mod p^2.
inline CongruenceVerdict verify_modform(std::int64_t p, const EtaCoefficients& eta)
{
    detail::Stopwatch clock;
    if (!is_prime(p)) throw NotPrime(std::to_string(p) + " is not prime");
    if (p == 2) throw OutOfRange("p must be odd");
    if (p > eta.N) throw OutOfRange("p exceeds the expansion order");
    const auto up = static_cast<std::uint64_t>(p);
    const std::int64_t ap = a_p_formula(p);
    const bool product_match = eta(p) == ap;

    bool gamma_match = true;
    const bool gamma_applies = p % 4 == 1;
    if (gamma_applies) {
        const PadicInt g = gamma_p(Rational{1, 4}, up, 2);
        gamma_match = embed(Rational{ap}, up, 2) == -g.pow(4);
    }

    Rational sum = 0;
    for (std::int64_t k = 0; k <= (p - 1) / 2; ++k) sum += a_term(k);
    const bool sum_match = embed(sum, up, 2) == embed(Rational{ap}, up, 2);

    CongruenceVerdict v;
    v.family = "MODFORM";
    v.p = p;
    v.prime_power = std::make_pair(p, 2);
    v.passed = product_match && gamma_match && sum_match;
    std::ostringstream d;
    d << "a(p) = " << ap << "; product " << (product_match ? "ok" : "mismatch") << "; gamma "
      << (gamma_applies ? (gamma_match ? "ok" : "mismatch") : "n/a") << "; sum " << (sum_match ? "ok" : "mismatch");
    v.detail = d.str();
    v.millis = clock.millis();
    return v;
}

} // namespace qcong
