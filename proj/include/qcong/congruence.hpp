#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cyclotomic.hpp"
#include "errors.hpp"
#include "laurent_poly.hpp"
#include "qseries.hpp"
#include "rational.hpp"

namespace qcong {

/// prod Phi_index(q)^exponent
struct ModulusSpec {
    std::vector<std::pair<std::int64_t, int>> parts;

    ModulusSpec() = default;
    ModulusSpec(std::initializer_list<std::pair<std::int64_t, int>> p) : parts(p) { validate(); }
    explicit ModulusSpec(std::vector<std::pair<std::int64_t, int>> p) : parts(std::move(p)) { validate(); }

    bool empty() const { return parts.empty(); }

    std::string to_string() const
    {
        if (parts.empty()) return "exact";
        std::ostringstream os;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) os << '*';
            os << "Phi_" << parts[i].first;
            if (parts[i].second != 1) os << '^' << parts[i].second;
        }
        return os.str();
    }

    friend bool operator==(const ModulusSpec&, const ModulusSpec&) = default;

private:
    void validate() const
    {
        std::set<std::int64_t> seen;
        for (const auto& [index, exp] : parts) {
            if (index < 1) throw InvalidIndex("modulus index must be >= 1");
            if (exp < 1) throw OutOfRange("modulus exponent must be >= 1");
            if (!seen.insert(index).second) throw InvalidIndex("repeated modulus index");
        }
    }
};

struct CongruenceVerdict {
    std::string family;
    std::optional<std::int64_t> n;
    std::optional<std::int64_t> ell;
    std::optional<std::int64_t> p;
    ModulusSpec modulus;
    /// p-adic verdicts: the congruence holds modulo p^k with (p, k) here.
    std::optional<std::pair<std::int64_t, int>> prime_power;
    bool passed = false;
    bool skipped = false;
    std::string detail;
    double millis = 0;
};

namespace detail {

class Stopwatch {
public:
    double millis() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Number of times `phi` divides `z` exactly, capped at `limit`. On the
/// first inexact division, `remainder_degree` receives the remainder's degree.
inline int cyclotomic_valuation(const LaurentPoly& z, const LaurentPoly& phi, int limit,
                                std::int64_t* remainder_degree = nullptr)
{
    if (z.is_zero()) return limit;
    std::vector<Rational> cur = z.dense();
    const std::vector<Rational> den = phi.dense();
    int v = 0;
    while (v < limit) {
        auto quot = exact_quotient(cur, den);
        if (!quot) {
            if (remainder_degree) {
                // recompute the remainder for the report
                std::vector<Rational> rem = cur;
                const std::size_t dn = den.size() - 1;
                for (std::size_t i = rem.size(); i-- > dn;) {
                    if (rem[i] == 0) continue;
                    Rational f = rem[i] / den.back();
                    for (std::size_t j = 0; j <= dn; ++j) rem[i - dn + j] -= f * den[j];
                }
                std::int64_t deg = -1;
                for (std::size_t i = 0; i < std::min(rem.size(), dn); ++i)
                    if (rem[i] != 0) deg = static_cast<std::int64_t>(i);
                *remainder_degree = deg;
            }
            return v;
        }
        cur = std::move(*quot);
        ++v;
    }
    return v;
}

inline std::map<ScaledFactor, int> scaled_counts(const FactoredDen& d)
{
    std::map<ScaledFactor, int> out;
    for (const auto& f : d.scaled) ++out[f];
    return out;
}

} // namespace detail

/// Sum over the multiset-lcm of the factored denominators. The result has
/// unit exponent 0 and sign +1.
inline RatFun sum_ratfun(std::span<const RatFun> terms)
{
    if (terms.empty()) throw OutOfRange("sum_ratfun needs at least one term");
    FactoredDen lcm;
    std::map<ScaledFactor, int> lcm_scaled;
    for (const auto& t : terms) {
        for (const auto& [m, mult] : t.den.atoms) lcm.atoms[m] = std::max(lcm.atoms[m], mult);
        for (const auto& [f, mult] : detail::scaled_counts(t.den)) lcm_scaled[f] = std::max(lcm_scaled[f], mult);
    }
    for (const auto& [f, mult] : lcm_scaled)
        for (int i = 0; i < mult; ++i) lcm.mul_scaled(f.c, f.e);

    detail::DensePoly acc;
    for (const auto& t : terms) {
        if (t.is_zero()) continue;
        detail::DensePoly d(t.num);
        if (t.den.sign < 0) d.scale(Rational{-1});
        d.shift(-t.den.unit_exponent);
        for (const auto& [m, mult] : lcm.atoms) {
            auto it = t.den.atoms.find(m);
            const int have = it == t.den.atoms.end() ? 0 : it->second;
            for (int i = have; i < mult; ++i) d.mul_binomial(Rational{1}, m);
        }
        const auto have_scaled = detail::scaled_counts(t.den);
        for (const auto& [f, mult] : lcm_scaled) {
            auto it = have_scaled.find(f);
            const int have = it == have_scaled.end() ? 0 : it->second;
            for (int i = have; i < mult; ++i) d.mul_binomial(f.c, f.e);
        }
        acc.add(d);
    }
    acc.trim();
    return RatFun{std::move(acc).to_poly(), std::move(lcm)};
}

inline RatFun sum_ratfun(std::initializer_list<RatFun> terms)
{
    return sum_ratfun(std::span<const RatFun>(terms.begin(), terms.size()));
}

inline RatFun difference(const RatFun& a, const RatFun& b)
{
    const RatFun pair[2] = {a, -b};
    return sum_ratfun(std::span<const RatFun>(pair, 2));
}

inline bool ratfun_equal(const RatFun& a, const RatFun& b) { return difference(a, b).is_zero(); }

/// Exact multiplicity of Phi_m in a - b written in lowest terms (negative
/// when Phi_m survives in the denominator). `cap` bounds the work.
inline int reduced_cyclotomic_valuation(const RatFun& a, const RatFun& b, std::int64_t m, CyclotomicCache& cache,
                                        int cap = 64)
{
    const RatFun d = difference(a, b);
    const int s = d.den.multiplicity(m);
    return detail::cyclotomic_valuation(d.num, cache.get(m), cap + s) - s;
}

/// Decides lhs = rhs modulo the product of cyclotomic powers.
///
/// With Delta = Z / D over a common factored denominator and s_m the
/// structural multiplicity of Phi_m in D, the congruence holds modulo
/// Phi_m^e exactly when Phi_m^{e + s_m} divides Z.
inline CongruenceVerdict check_congruence(const RatFun& lhs, const RatFun& rhs, const ModulusSpec& modulus,
                                          CyclotomicCache& cache)
{
    detail::Stopwatch clock;
    CongruenceVerdict v;
    v.modulus = modulus;
    const RatFun delta = difference(lhs, rhs);
    std::ostringstream detail;
    if (delta.is_zero()) {
        v.passed = true;
        detail << "lhs == rhs exactly";
    } else {
        detail << "numerator degree span [" << delta.num.min_exp() << ", " << delta.num.max_exp() << "]";
        v.passed = true;
        for (const auto& [m, e] : modulus.parts) {
            const int s = delta.den.multiplicity(m);
            std::int64_t rem_deg = -1;
            const int got = detail::cyclotomic_valuation(delta.num, cache.get(m), e + s, &rem_deg);
            detail << "; Phi_" << m << ": need " << e << "+" << s << ", got " << got;
            if (got < e + s) {
                v.passed = false;
                detail << " FAILED (remainder degree " << rem_deg << ")";
                break;
            }
        }
    }
    v.detail = detail.str();
    v.millis = clock.millis();
    return v;
}

/// Which range the T3 sum runs over.
enum class Truncation { full, half };

/// The cyclotomic modulus each q-family claims at (n, ell).
inline ModulusSpec theorem_modulus(Family family, std::int64_t n, std::int64_t ell)
{
    if (n == 1) return {};
    const std::int64_t n2 = 2 * n;
    switch (family) {
    case Family::T1: return n % 4 == 1 ? ModulusSpec{{n, 2}, {n2, 3}} : ModulusSpec{{n, 3}, {n2, 3}};
    case Family::T2: return n % 4 == 1 ? ModulusSpec{{n, 3}, {n2, 3}} : ModulusSpec{{n, 2}, {n2, 3}};
    case Family::T3: return (n + 2 * ell) % 4 == 1 ? ModulusSpec{{n, 2}, {n2, 3}} : ModulusSpec{{n, 3}, {n2, 3}};
    case Family::E05:
    case Family::CONJ413: return ModulusSpec{{n, 2}, {n2, 1}};
    case Family::MODPHI: return ModulusSpec{{n, 2}};
    }
    throw OutOfRange("unknown family");
}

/// Left-hand sum of `family`; T3 honours the requested truncation.
inline RatFun theorem_lhs(Family family, std::int64_t n, std::int64_t ell, Truncation trunc = Truncation::full)
{
    std::int64_t upper = summand_upper(family, n, ell);
    if (family == Family::T3 && trunc == Truncation::half) upper = (n - 1) / 2 + ell;
    std::vector<RatFun> terms;
    terms.reserve(static_cast<std::size_t>(upper + 1));
    for (std::int64_t k = 0; k <= upper; ++k) terms.push_back(summand(family, n, ell, k));
    return sum_ratfun(terms);
}

/// Builds both sides of `family` at (n, ell) and checks the claimed modulus.
/// n = 1 instances are checked as exact identities.
inline CongruenceVerdict verify_theorem(Family family, std::int64_t n, std::int64_t ell, CyclotomicCache& cache,
                                        Truncation trunc = Truncation::full)
{
    detail::Stopwatch clock;
    detail::require_odd(n);
    const std::int64_t m = (n - 1) / 2;
    if ((family == Family::T2 || family == Family::CONJ413) && n == 1)
        throw OutOfRange(std::string(family_name(family)) + " needs n > 1");
    if (family == Family::CONJ413 && n % 4 != 3) throw OutOfRange("CONJ413 needs n = 3 (mod 4)");
    if (family == Family::T3 && (ell < 0 || ell > m)) throw OutOfRange("T3 needs 0 <= ell <= (n-1)/2");
    if (family != Family::T3) ell = 0;

    const RatFun lhs = theorem_lhs(family, n, ell, trunc);
    const RatFun rhs = rhs_closed_form(family, n, ell);
    CongruenceVerdict v = check_congruence(lhs, rhs, theorem_modulus(family, n, ell), cache);
    v.family = family_name(family);
    v.n = n;
    if (family == Family::T3) v.ell = ell;
    v.millis = clock.millis();
    return v;
}

namespace detail {

inline void check_samples(std::span<const Rational> samples, std::size_t needed)
{
    std::set<Rational> distinct(samples.begin(), samples.end());
    if (distinct.count(Rational{0})) throw OutOfRange("parameter samples must be nonzero");
    if (distinct.size() < needed)
        throw InsufficientSamples("need at least " + std::to_string(needed) + " distinct samples, got " +
                                  std::to_string(distinct.size()));
}

} // namespace detail

/// The first `count` primes as rationals: the default parameter samples.
inline std::vector<Rational> prime_samples(std::size_t count)
{
    std::vector<Rational> out;
    for (std::int64_t c = 2; out.size() < count; ++c) {
        bool prime = true;
        for (std::int64_t d = 2; d * d <= c; ++d)
            if (c % d == 0) {
                prime = false;
                break;
            }
        if (prime) out.emplace_back(c);
    }
    return out;
}

/// For each sampled a, checks
///   (aq;q^2)_{m-k} / (q^2/a;q^2)_{m-k}
///     = (-a)^{m-2k} (aq;q^2)_k / (q^2/a;q^2)_k q^{m^2+k}   (mod Phi_n(q))
/// with m = (n-1)/2. Needs n+2 distinct samples.
inline CongruenceVerdict verify_lemma21(std::int64_t n, std::int64_t k, std::span<const Rational> samples,
                                        CyclotomicCache& cache)
{
    detail::Stopwatch clock;
    detail::require_odd(n);
    if (n == 1) throw OutOfRange("lemma check needs n > 1");
    const std::int64_t m = (n - 1) / 2;
    if (k < 0 || k > m) throw OutOfRange("lemma index k must lie in [0, (n-1)/2]");
    detail::check_samples(samples, static_cast<std::size_t>(n + 2));

    CongruenceVerdict v;
    v.family = "L21";
    v.n = n;
    v.ell = k;
    v.modulus = ModulusSpec{{n, 1}};
    v.passed = true;
    const Rational one{1};
    std::ostringstream detail;
    detail << samples.size() << " samples";
    for (const auto& a : samples) {
        RatFun lhs(qpoch(a, 1, 2, m - k));
        detail::div_qpoch(lhs, Rational{one / a}, 2, 2, m - k);
        RatFun rhs(qpoch(a, 1, 2, k));
        rhs.mul_monomial(pow(Rational{-a}, m - 2 * k), m * m + k);
        detail::div_qpoch(rhs, Rational{one / a}, 2, 2, k);
        const auto sub = check_congruence(lhs, rhs, v.modulus, cache);
        if (!sub.passed) {
            v.passed = false;
            detail << "; a=" << a.get_str() << " failed: " << sub.detail;
            break;
        }
    }
    v.detail = detail.str();
    v.millis = clock.millis();
    return v;
}

/// Parameter a in the parametric family: either a rational sample or q^s.
using ParamA = std::variant<Rational, std::int64_t>;

/// k-th term of the a-deformed T3 sum:
///   (1+q^{4k-2l+1}) (aq^{2-4l};q^4)_k (q^{2-4l}/a;q^4)_k (q^{2-4l};q^4)_k q^{(6l+1)k}
///   / ((1+q^{1-2l}) (aq^4;q^4)_k (q^4/a;q^4)_k (q^4;q^4)_k)
inline RatFun parametric_summand(std::int64_t n, std::int64_t ell, std::int64_t k, const ParamA& a)
{
    detail::require_odd(n);
    const std::int64_t m = (n - 1) / 2;
    if (ell < 0 || ell > m) throw OutOfRange("parametric family needs 0 <= ell <= (n-1)/2");
    if (k < 0 || k > n - 1) throw OutOfRange("parametric summand index out of range");
    const Rational one{1};
    RatFun r(LaurentPoly{1});
    r.mul_binomial(Rational{-1}, 4 * k - 2 * ell + 1);
    if (const auto* c = std::get_if<Rational>(&a)) {
        if (*c == 0) throw ParameterPole("a = 0");
        detail::mul_qpoch(r, *c, 2 - 4 * ell, 4, k);
        detail::mul_qpoch(r, Rational{one / *c}, 2 - 4 * ell, 4, k);
    } else {
        const std::int64_t s = std::get<std::int64_t>(a);
        detail::mul_qpoch(r, one, 2 - 4 * ell + s, 4, k);
        detail::mul_qpoch(r, one, 2 - 4 * ell - s, 4, k);
    }
    detail::mul_qpoch(r, one, 2 - 4 * ell, 4, k);
    r.mul_monomial(one, (6 * ell + 1) * k);
    if (ell >= 1) {
        r.mul_monomial(one, 2 * ell - 1);
        r.div_binomial(Rational{-1}, 2 * ell - 1);
    } else {
        r.div_binomial(Rational{-1}, 1);
    }
    if (const auto* c = std::get_if<Rational>(&a)) {
        detail::div_qpoch(r, *c, 4, 4, k);
        detail::div_qpoch(r, Rational{one / *c}, 4, 4, k);
    } else {
        const std::int64_t s = std::get<std::int64_t>(a);
        for (std::int64_t j = 0; j < k; ++j) {
            if (4 + s + 4 * j == 0 || 4 - s + 4 * j == 0) throw ParameterPole("a = q^s hits a zero denominator");
            r.div_binomial(one, 4 + s + 4 * j);
            r.div_binomial(one, 4 - s + 4 * j);
        }
    }
    detail::div_qpoch(r, one, 4, 4, k);
    return r;
}

inline RatFun parametric_lhs(std::int64_t n, std::int64_t ell, const ParamA& a, std::int64_t upper)
{
    std::vector<RatFun> terms;
    for (std::int64_t k = 0; k <= upper; ++k) terms.push_back(parametric_summand(n, ell, k, a));
    return sum_ratfun(terms);
}

/// Checks the a-deformed congruence three ways: the specializations
/// a = q^{2n} and a = q^{-2n} must equal the closed form exactly, and every
/// rational sample must satisfy it modulo Phi_{2n} (n + 2l = 1 mod 4) or
/// Phi_n Phi_{2n} (n + 2l = 3 mod 4). Needs 2(n+1)+1 samples.
inline CongruenceVerdict verify_parametric(std::int64_t n, std::int64_t ell, std::span<const Rational> samples,
                                           CyclotomicCache& cache)
{
    detail::Stopwatch clock;
    detail::require_odd(n);
    if (n == 1) throw OutOfRange("parametric family needs n > 1");
    const std::int64_t m = (n - 1) / 2;
    if (ell < 0 || ell > m) throw OutOfRange("parametric family needs 0 <= ell <= (n-1)/2");
    detail::check_samples(samples, static_cast<std::size_t>(2 * (n + 1) + 1));

    CongruenceVerdict v;
    v.family = "PARAM";
    v.n = n;
    v.ell = ell;
    v.modulus = (n + 2 * ell) % 4 == 1 ? ModulusSpec{{2 * n, 1}} : ModulusSpec{{n, 1}, {2 * n, 1}};
    const RatFun rhs = rhs_closed_form(Family::T3, n, ell);
    std::ostringstream detail;

    const bool plus = ratfun_equal(parametric_lhs(n, ell, ParamA{2 * n}, n - 1), rhs);
    const bool minus = ratfun_equal(parametric_lhs(n, ell, ParamA{-2 * n}, n - 1), rhs);
    detail << "a=q^2n exact: " << (plus ? "yes" : "NO") << "; a=q^-2n exact: " << (minus ? "yes" : "NO");
    bool sampled = true;
    for (const auto& a : samples) {
        const auto sub = check_congruence(parametric_lhs(n, ell, ParamA{a}, n - 1), rhs, v.modulus, cache);
        if (!sub.passed) {
            sampled = false;
            detail << "; a=" << a.get_str() << " failed: " << sub.detail;
            break;
        }
    }
    if (sampled) detail << "; " << samples.size() << " samples pass";
    v.passed = plus && minus && sampled;
    v.detail = detail.str();
    v.millis = clock.millis();
    return v;
}

/// r(q) -> r(1/q), keeping the denominator factored.
inline RatFun reciprocal(const RatFun& r)
{
    RatFun out(poly_substitute(r.num, Substitution::reciprocal()));
    FactoredDen& d = out.den;
    d.sign = r.den.sign;
    d.unit_exponent = -r.den.unit_exponent;
    for (const auto& [m, mult] : r.den.atoms) d.mul_binomial(-m, mult);
    for (const auto& f : r.den.scaled) {
        // 1 - c q^{-e} = -c q^{-e} (1 - q^e / c)
        out.num *= Rational{-1 / f.c};
        out.num = out.num.shifted(f.e);
        d.mul_scaled(Rational{1 / f.c}, f.e);
    }
    return out;
}

inline bool check_self_reciprocal(const RatFun& r) { return ratfun_equal(reciprocal(r), r); }

} // namespace qcong
