#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cyclotomic.hpp"
#include "errors.hpp"
#include "laurent_poly.hpp"
#include "rational.hpp"

namespace qcong {

/// Denominator factor 1 - c q^e with e >= 1 and |c| != 1. Such a factor has
/// all its roots off the unit circle, so it shares no factor with any
/// cyclotomic polynomial.
struct ScaledFactor {
    Rational c;
    std::int64_t e;

    friend bool operator==(const ScaledFactor&, const ScaledFactor&) = default;
    friend bool operator<(const ScaledFactor& a, const ScaledFactor& b)
    {
        return a.e != b.e ? a.e < b.e : cmp(a.c, b.c) < 0;
    }
};

/// sign * q^unit_exponent * prod (1 - q^m)^mult * prod (1 - c q^e).
class FactoredDen {
public:
    std::map<std::int64_t, int> atoms;
    std::vector<ScaledFactor> scaled; ///< sorted multiset
    std::int64_t unit_exponent = 0;
    int sign = 1;

    /// *= (1 - q^e), e != 0. Negative e is folded into sign and unit.
    FactoredDen& mul_binomial(std::int64_t e, int times = 1)
    {
        if (e == 0) throw DivByZero("denominator factor 1 - q^0");
        if (e < 0) {
            // 1 - q^e = -q^e (1 - q^{-e})
            if (times % 2 != 0) sign = -sign;
            unit_exponent += e * times;
            e = -e;
        }
        atoms[e] += times;
        return *this;
    }

    FactoredDen& mul_scaled(const Rational& c, std::int64_t e)
    {
        if (e < 1) throw OutOfRange("scaled denominator factor needs e >= 1");
        if (abs(c) == 1) throw OutOfRange("scaled denominator factor needs |c| != 1");
        ScaledFactor f{c, e};
        scaled.insert(std::upper_bound(scaled.begin(), scaled.end(), f), std::move(f));
        return *this;
    }

    /// Multiplicity of Phi_d in the denominator, read off structurally.
    int multiplicity(std::int64_t d) const
    {
        int s = 0;
        for (const auto& [m, mult] : atoms) s += qcong::multiplicity(d, m) * mult;
        return s;
    }

    std::size_t atom_count() const
    {
        std::size_t n = 0;
        for (const auto& [m, mult] : atoms) n += static_cast<std::size_t>(mult);
        return n;
    }

    LaurentPoly expand() const
    {
        detail::DensePoly d(LaurentPoly::monomial(Rational{sign}, unit_exponent));
        for (const auto& [m, mult] : atoms)
            for (int i = 0; i < mult; ++i) d.mul_binomial(Rational{1}, m);
        for (const auto& f : scaled) d.mul_binomial(f.c, f.e);
        return std::move(d).to_poly();
    }

    std::int64_t degree_span() const
    {
        std::int64_t deg = 0;
        for (const auto& [m, mult] : atoms) deg += m * mult;
        for (const auto& f : scaled) deg += f.e;
        return deg;
    }
};

/// num / den with the denominator kept factored. No canonical form: two
/// RatFuns are compared by cross-multiplication.
struct RatFun {
    LaurentPoly num;
    FactoredDen den;

    RatFun() = default;
    RatFun(LaurentPoly n) : num(std::move(n)) {}
    RatFun(LaurentPoly n, FactoredDen d) : num(std::move(n)), den(std::move(d)) {}

    bool is_zero() const { return num.is_zero(); }

    /// *= (1 - c q^e)
    RatFun& mul_binomial(const Rational& c, std::int64_t e)
    {
        num.mul_binomial(c, e);
        return *this;
    }

    RatFun& mul_monomial(const Rational& c, std::int64_t e)
    {
        num = num.shifted(e);
        num *= c;
        return *this;
    }

    /// /= (1 - c q^e), dispatching to the factored form:
    /// c = 1 gives an atom, c = -1 uses 1/(1 + q^e) = (1 - q^e)/(1 - q^{2e}),
    /// otherwise a scaled factor (after pulling out q^e when e < 0).
    RatFun& div_binomial(const Rational& c, std::int64_t e)
    {
        if (c == 0) return *this;
        if (e == 0) {
            if (c == 1) throw ParameterPole("division by 1 - q^0");
            num *= Rational{1 / (1 - c)};
            return *this;
        }
        if (c == 1) {
            den.mul_binomial(e);
        } else if (c == -1) {
            num.mul_binomial(Rational{1}, e);
            den.mul_binomial(2 * e);
        } else if (e > 0) {
            den.mul_scaled(c, e);
        } else {
            // 1 - c q^e = -c q^e (1 - q^{-e}/c)
            num *= Rational{-1 / c};
            num = num.shifted(-e);
            den.mul_scaled(Rational{1 / c}, -e);
        }
        return *this;
    }

    RatFun operator-() const { return RatFun{-num, den}; }
};

/// Truncated power series sum_{i=0}^{order} c_i q^i. Results of binary
/// operations carry the smaller of the operand orders.
class PowerSeries {
public:
    PowerSeries() : PowerSeries(0) {}
    explicit PowerSeries(std::int64_t order) : coeffs_(checked_size(order)) {}
    PowerSeries(std::int64_t order, std::vector<Rational> coeffs) : coeffs_(std::move(coeffs))
    {
        coeffs_.resize(checked_size(order));
    }

    static PowerSeries one(std::int64_t order)
    {
        PowerSeries s(order);
        s.coeffs_[0] = 1;
        return s;
    }

    std::int64_t order() const { return static_cast<std::int64_t>(coeffs_.size()) - 1; }
    const Rational& operator[](std::int64_t i) const { return coeffs_.at(static_cast<std::size_t>(i)); }
    Rational& operator[](std::int64_t i) { return coeffs_.at(static_cast<std::size_t>(i)); }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    PowerSeries truncated(std::int64_t order) const
    {
        if (order > this->order()) throw OutOfRange("cannot extend a truncated series");
        return PowerSeries(order, std::vector<Rational>(coeffs_.begin(), coeffs_.begin() + order + 1));
    }

    /// *= (1 - c q^e), e >= 1
    PowerSeries& mul_binomial(const Rational& c, std::int64_t e)
    {
        check_step(e);
        const auto n = static_cast<std::int64_t>(coeffs_.size());
        for (std::int64_t i = n - 1; i >= e; --i) coeffs_[idx(i)] -= c * coeffs_[idx(i - e)];
        return *this;
    }

    /// /= (1 - c q^e), e >= 1
    PowerSeries& div_binomial(const Rational& c, std::int64_t e)
    {
        check_step(e);
        const auto n = static_cast<std::int64_t>(coeffs_.size());
        for (std::int64_t i = e; i < n; ++i) coeffs_[idx(i)] += c * coeffs_[idx(i - e)];
        return *this;
    }

    PowerSeries& operator*=(const Rational& c)
    {
        for (auto& x : coeffs_) x *= c;
        return *this;
    }

    PowerSeries& operator+=(const PowerSeries& o)
    {
        if (o.order() < order()) coeffs_.resize(o.coeffs_.size());
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }

    PowerSeries& operator-=(const PowerSeries& o)
    {
        if (o.order() < order()) coeffs_.resize(o.coeffs_.size());
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }

    friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b)
    {
        const std::int64_t n = std::min(a.order(), b.order());
        PowerSeries r(n);
        for (std::int64_t i = 0; i <= n; ++i) {
            if (a[i] == 0) continue;
            for (std::int64_t j = 0; i + j <= n; ++j)
                if (b[j] != 0) r[i + j] += a[i] * b[j];
        }
        return r;
    }

    friend PowerSeries operator+(PowerSeries a, const PowerSeries& b) { return a += b; }
    friend PowerSeries operator-(PowerSeries a, const PowerSeries& b) { return a -= b; }
    friend bool operator==(const PowerSeries&, const PowerSeries&) = default;

    /// Reciprocal; requires a nonzero constant term.
    PowerSeries inverse() const
    {
        if (coeffs_[0] == 0) throw DivByZero("series with zero constant term is not invertible");
        PowerSeries r(order());
        const Rational inv0 = 1 / coeffs_[0];
        r[0] = inv0;
        for (std::int64_t i = 1; i <= order(); ++i) {
            Rational acc = 0;
            for (std::int64_t j = 1; j <= i; ++j)
                if (coeffs_[idx(j)] != 0) acc += coeffs_[idx(j)] * r[i - j];
            r[i] = -acc * inv0;
        }
        return r;
    }

    std::string to_string() const
    {
        LaurentPoly p = LaurentPoly::from_dense(0, std::vector<Rational>(coeffs_));
        return p.to_string() + " + O(q^" + std::to_string(order() + 1) + ")";
    }

private:
    static std::size_t checked_size(std::int64_t order)
    {
        if (order < 0) throw OutOfRange("series order must be >= 0");
        return static_cast<std::size_t>(order) + 1;
    }
    static void check_step(std::int64_t e)
    {
        if (e < 1) throw NonPositiveExponent("series binomial factor needs exponent >= 1");
    }
    static std::size_t idx(std::int64_t i) { return static_cast<std::size_t>(i); }

    std::vector<Rational> coeffs_;
};

/// prod_{j=0}^{count-1} (1 - c q^{base_exp + j*step}), expanded.
inline LaurentPoly qpoch(const Rational& base_coeff, std::int64_t base_exp, std::int64_t step, std::int64_t count)
{
    if (count < 0) throw OutOfRange("qpoch count must be >= 0");
    if (step < 1) throw OutOfRange("qpoch step must be >= 1");
    detail::DensePoly d(LaurentPoly{1});
    for (std::int64_t j = 0; j < count; ++j) d.mul_binomial(base_coeff, base_exp + j * step);
    d.trim();
    return std::move(d).to_poly();
}

/// Exponents m of the atoms (1 - q^m) making up (q^base_exp; q^step)_count.
inline std::vector<std::int64_t> qpoch_atoms(std::int64_t base_exp, std::int64_t step, std::int64_t count)
{
    if (base_exp < 1) throw OutOfRange("atom form needs base exponent >= 1");
    if (count < 0 || step < 1) throw OutOfRange("bad qpoch shape");
    std::vector<std::int64_t> out;
    for (std::int64_t j = 0; j < count; ++j) out.push_back(base_exp + j * step);
    return out;
}

/// [n]_q = 1 + q + ... + q^{n-1}, or [n]_{q^2} when square is set.
inline LaurentPoly q_integer(std::int64_t n, bool square = false)
{
    if (n < 1) throw OutOfRange("q-integer needs n >= 1");
    const std::int64_t s = square ? 2 : 1;
    std::vector<Term> t;
    for (std::int64_t i = 0; i < n; ++i) t.push_back({i * s, Rational{1}});
    return LaurentPoly::from_terms(std::move(t));
}

/// The q-congruence families. MODPHI is the earlier mod Phi_n(q)^2
/// congruence that T1 refines; E05 and CONJ413 share T1's left side.
enum class Family { T1, T2, T3, E05, CONJ413, MODPHI };

inline std::string_view family_name(Family f)
{
    switch (f) {
    case Family::T1: return "T1";
    case Family::T2: return "T2";
    case Family::T3: return "T3";
    case Family::E05: return "E05";
    case Family::CONJ413: return "CONJ413";
    case Family::MODPHI: return "MODPHI";
    }
    return "?";
}

namespace detail {

inline void require_odd(std::int64_t n)
{
    if (n < 1 || n % 2 == 0) throw OutOfRange("n must be a positive odd integer, got " + std::to_string(n));
}

inline std::int64_t half(std::int64_t n) { return (n - 1) / 2; }

/// Divides r by (q^e0; q^step)_count raised to `power`.
inline void div_qpoch(RatFun& r, const Rational& c, std::int64_t e0, std::int64_t step, std::int64_t count, int power = 1)
{
    for (int p = 0; p < power; ++p)
        for (std::int64_t j = 0; j < count; ++j) r.div_binomial(c, e0 + j * step);
}

inline void mul_qpoch(RatFun& r, const Rational& c, std::int64_t e0, std::int64_t step, std::int64_t count, int power = 1)
{
    detail::DensePoly d(r.num);
    for (int p = 0; p < power; ++p)
        for (std::int64_t j = 0; j < count; ++j) d.mul_binomial(c, e0 + j * step);
    d.trim();
    r.num = std::move(d).to_poly();
}

} // namespace detail

/// Largest k allowed in the k-th summand of `family` at n (and ell for T3).
inline std::int64_t summand_upper(Family family, std::int64_t n, std::int64_t ell)
{
    const std::int64_t m = detail::half(n);
    switch (family) {
    case Family::T2: return m + 1;
    case Family::T3: return n - 1;
    default: (void)ell; return m;
    }
}

/// Exact k-th term of the left-hand sum of `family`.
inline RatFun summand(Family family, std::int64_t n, std::int64_t ell, std::int64_t k)
{
    detail::require_odd(n);
    const std::int64_t m = detail::half(n);
    if (family == Family::T3 && (ell < 0 || ell > m)) throw OutOfRange("T3 needs 0 <= ell <= (n-1)/2");
    if (family == Family::T2 && n == 1) throw OutOfRange("T2 needs n > 1");
    if (k < 0 || k > summand_upper(family, n, ell)) throw OutOfRange("summand index k out of range");

    RatFun r(LaurentPoly{1});
    const Rational one{1};
    switch (family) {
    case Family::T1:
    case Family::E05:
    case Family::CONJ413:
        // (1+q^{4k+1}) (q^2;q^4)_k^3 q^k / ((1+q) (q^4;q^4)_k^3)
        r.mul_binomial(Rational{-1}, 4 * k + 1);
        detail::mul_qpoch(r, one, 2, 4, k, 3);
        r.mul_monomial(one, k);
        r.div_binomial(Rational{-1}, 1);
        detail::div_qpoch(r, one, 4, 4, k, 3);
        break;
    case Family::T2:
        // (1+q^{4k-1}) (q^{-2};q^4)_k^3 q^{7k} / ((1+q) (q^4;q^4)_k^3)
        r.mul_binomial(Rational{-1}, 4 * k - 1);
        detail::mul_qpoch(r, one, -2, 4, k, 3);
        r.mul_monomial(one, 7 * k);
        r.div_binomial(Rational{-1}, 1);
        detail::div_qpoch(r, one, 4, 4, k, 3);
        break;
    case Family::T3:
        // (1+q^{4k-2l+1}) (q^{2-4l};q^4)_k^3 q^{(6l+1)k} / ((1+q^{1-2l}) (q^4;q^4)_k^3)
        r.mul_binomial(Rational{-1}, 4 * k - 2 * ell + 1);
        detail::mul_qpoch(r, one, 2 - 4 * ell, 4, k, 3);
        r.mul_monomial(one, (6 * ell + 1) * k);
        if (ell >= 1) {
            // 1 + q^{1-2l} = q^{1-2l} (1 + q^{2l-1})
            r.mul_monomial(one, 2 * ell - 1);
            r.div_binomial(Rational{-1}, 2 * ell - 1);
        } else {
            r.div_binomial(Rational{-1}, 1);
        }
        detail::div_qpoch(r, one, 4, 4, k, 3);
        break;
    case Family::MODPHI:
        // (q;q^2)_k^2 (q^2;q^4)_k q^{2k} / ((q^2;q^2)_k^2 (q^4;q^4)_k)
        detail::mul_qpoch(r, one, 1, 2, k, 2);
        detail::mul_qpoch(r, one, 2, 4, k, 1);
        r.mul_monomial(one, 2 * k);
        detail::div_qpoch(r, one, 2, 2, k, 2);
        detail::div_qpoch(r, one, 4, 4, k, 1);
        break;
    }
    return r;
}

/// Exact right-hand side of `family` at n (and ell for T3).
///
/// E05 uses the terminating q-Watson value (1+q^n)/(1+q) (q^2;q^4)_m^2 /
/// (q^4;q^4)_m^2 for n = 4m+1, and 0 for n = 3 mod 4.
inline RatFun rhs_closed_form(Family family, std::int64_t n, std::int64_t ell)
{
    detail::require_odd(n);
    const std::int64_t m = detail::half(n);
    const Rational one{1};
    switch (family) {
    case Family::T1: {
        RatFun r(q_integer(n, true));
        detail::mul_qpoch(r, one, 3, 4, m);
        r.mul_monomial(one, -m);
        detail::div_qpoch(r, one, 5, 4, m);
        return r;
    }
    case Family::T2: {
        if (n == 1) throw OutOfRange("T2 needs n > 1");
        RatFun r(q_integer(n, true));
        detail::mul_qpoch(r, one, 1, 4, m);
        r.mul_monomial(one, m - 1);
        detail::div_qpoch(r, one, 7, 4, m);
        return r;
    }
    case Family::T3: {
        if (ell < 0 || ell > m) throw OutOfRange("T3 needs 0 <= ell <= (n-1)/2");
        const std::int64_t len = m + ell;
        RatFun r(LaurentPoly::binomial(one, 2 * n));
        detail::mul_qpoch(r, one, 3 - 6 * ell, 4, len);
        r.mul_monomial(one, (2 * ell - 1) * len);
        r.div_binomial(one, 2 - 4 * ell);
        detail::div_qpoch(r, one, 5 - 2 * ell, 4, len);
        return r;
    }
    case Family::E05: {
        if (n % 4 == 3) return RatFun{};
        const std::int64_t mm = (n - 1) / 4;
        RatFun r(poly_substitute(q_integer(n), Substitution::negate()));
        detail::mul_qpoch(r, one, 2, 4, mm, 2);
        detail::div_qpoch(r, one, 4, 4, mm, 2);
        return r;
    }
    case Family::CONJ413:
        if (n == 1 || n % 4 != 3) throw OutOfRange("CONJ413 needs n = 3 (mod 4)");
        return RatFun{};
    case Family::MODPHI: {
        if (n % 4 == 3) return RatFun{};
        const std::int64_t mm = (n - 1) / 4;
        RatFun r(LaurentPoly{1});
        detail::mul_qpoch(r, one, 2, 4, mm, 2);
        r.mul_monomial(one, m);
        detail::div_qpoch(r, one, 4, 4, mm, 2);
        return r;
    }
    }
    throw OutOfRange("unknown family");
}

/// Coefficients of r through q^N.
inline PowerSeries series_of_ratfun(const RatFun& r, std::int64_t N)
{
    if (N < 0) throw OutOfRange("series order must be >= 0");
    if (r.is_zero()) return PowerSeries(N);
    // num / (sign q^u D) with D(0) = 1
    const LaurentPoly shifted = r.num.shifted(-r.den.unit_exponent);
    if (shifted.min_exp() < 0) throw NegativeValuation("rational function has a pole at q = 0");
    PowerSeries s(N);
    for (const auto& t : shifted.terms())
        if (t.exp <= N) s[t.exp] = r.den.sign < 0 ? Rational{-t.coeff} : t.coeff;
    for (const auto& [m, mult] : r.den.atoms)
        for (int i = 0; i < mult; ++i) s.div_binomial(Rational{1}, m);
    for (const auto& f : r.den.scaled) s.div_binomial(f.c, f.e);
    return s;
}

/// One family of factors prod_{j>=0} (1 - coeff q^{start + j*step}),
/// raised to `power` (negative powers divide).
struct ProductFactor {
    Rational coeff;
    std::int64_t start;
    std::int64_t step;
    int power = 1;
};

/// Truncated product over every factor with exponent <= N.
inline PowerSeries infinite_product(const std::vector<ProductFactor>& factors, std::int64_t N)
{
    PowerSeries s = PowerSeries::one(N);
    for (const auto& f : factors) {
        if (f.step < 1) throw OutOfRange("product step must be >= 1");
        if (f.start <= 0 && f.coeff != 0)
            throw NonPositiveExponent("product factor with exponent " + std::to_string(f.start));
        for (std::int64_t e = f.start; e <= N; e += f.step) {
            for (int p = 0; p < f.power; ++p) s.mul_binomial(f.coeff, e);
            for (int p = 0; p < -f.power; ++p) s.div_binomial(f.coeff, e);
        }
    }
    return s;
}

} // namespace qcong
