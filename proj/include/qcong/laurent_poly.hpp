#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace qcong {

struct Term {
    std::int64_t exp;
    Rational coeff;

    friend bool operator==(const Term&, const Term&) = default;
};

/// Finitely supported map from integer exponents of q to nonzero rationals.
///
/// Terms are kept sorted by exponent with no zero coefficients, so the empty
/// term list is the zero polynomial and equality is structural.
class LaurentPoly {
public:
    LaurentPoly() = default;
    LaurentPoly(const Rational& c) { if (c != 0) terms_.push_back({0, c}); }
    LaurentPoly(int c) : LaurentPoly(Rational{c}) {}

    static LaurentPoly monomial(const Rational& c, std::int64_t e)
    {
        LaurentPoly p;
        if (c != 0) p.terms_.push_back({e, c});
        return p;
    }

    static LaurentPoly q_power(std::int64_t e) { return monomial(Rational{1}, e); }

    /// 1 - c q^e
    static LaurentPoly binomial(const Rational& c, std::int64_t e)
    {
        return LaurentPoly{1}.mul_binomial(c, e);
    }

    static LaurentPoly from_terms(std::vector<Term> terms)
    {
        std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.exp < b.exp; });
        LaurentPoly p;
        for (auto& t : terms) {
            if (!p.terms_.empty() && p.terms_.back().exp == t.exp)
                p.terms_.back().coeff += t.coeff;
            else
                p.terms_.push_back(std::move(t));
            if (p.terms_.back().coeff == 0) p.terms_.pop_back();
        }
        return p;
    }

    /// Coefficients c[i] of q^{low+i}.
    static LaurentPoly from_dense(std::int64_t low, std::vector<Rational>&& c)
    {
        LaurentPoly p;
        std::size_t nz = 0;
        for (const auto& x : c) nz += (x != 0);
        p.terms_.reserve(nz);
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c[i] != 0) p.terms_.push_back({low + static_cast<std::int64_t>(i), std::move(c[i])});
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    std::span<const Term> terms() const { return terms_; }

    std::int64_t min_exp() const
    {
        if (terms_.empty()) throw OutOfRange("min_exp of the zero polynomial");
        return terms_.front().exp;
    }
    std::int64_t max_exp() const
    {
        if (terms_.empty()) throw OutOfRange("max_exp of the zero polynomial");
        return terms_.back().exp;
    }

    Rational coeff(std::int64_t e) const
    {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                                   [](const Term& t, std::int64_t x) { return t.exp < x; });
        return (it != terms_.end() && it->exp == e) ? it->coeff : Rational{0};
    }

    /// Dense coefficient vector from min_exp() to max_exp().
    std::vector<Rational> dense() const
    {
        if (is_zero()) return {};
        std::vector<Rational> out(static_cast<std::size_t>(max_exp() - min_exp() + 1));
        for (const auto& t : terms_) out[static_cast<std::size_t>(t.exp - min_exp())] = t.coeff;
        return out;
    }

    LaurentPoly shifted(std::int64_t e) const
    {
        LaurentPoly p = *this;
        for (auto& t : p.terms_) t.exp += e;
        return p;
    }

    LaurentPoly operator-() const
    {
        LaurentPoly p = *this;
        for (auto& t : p.terms_) t.coeff = -t.coeff;
        return p;
    }

    LaurentPoly& operator+=(const LaurentPoly& o) { return axpy(Rational{1}, o, 0); }
    LaurentPoly& operator-=(const LaurentPoly& o) { return axpy(Rational{-1}, o, 0); }

    LaurentPoly& operator*=(const Rational& c)
    {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& t : terms_) t.coeff *= c;
        return *this;
    }

    LaurentPoly& operator*=(const LaurentPoly& o);

    /// *this += c * q^shift * o
    LaurentPoly& axpy(const Rational& c, const LaurentPoly& o, std::int64_t shift)
    {
        if (c == 0 || o.is_zero()) return *this;
        if (&o == this) {
            LaurentPoly copy = o;
            return axpy(c, copy, shift);
        }
        std::vector<Term> out;
        out.reserve(terms_.size() + o.terms_.size());
        auto a = terms_.begin();
        auto b = o.terms_.begin();
        while (a != terms_.end() || b != o.terms_.end()) {
            if (b == o.terms_.end() || (a != terms_.end() && a->exp < b->exp + shift)) {
                out.push_back(std::move(*a++));
            } else if (a == terms_.end() || b->exp + shift < a->exp) {
                out.push_back({b->exp + shift, c * b->coeff});
                ++b;
            } else {
                Rational s = a->coeff + c * b->coeff;
                if (s != 0) out.push_back({a->exp, std::move(s)});
                ++a;
                ++b;
            }
        }
        terms_ = std::move(out);
        return *this;
    }

    /// *this *= (1 - c q^e)
    LaurentPoly& mul_binomial(const Rational& c, std::int64_t e)
    {
        if (c == 0) return *this;
        return axpy(Rational{-c}, *this, e);
    }

    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
    friend LaurentPoly operator*(LaurentPoly a, const Rational& c) { return a *= c; }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
    friend bool operator==(const LaurentPoly&, const LaurentPoly&) = default;

    std::string to_string(char var = 'q') const;

private:
    std::vector<Term> terms_;
};

namespace detail {

/// Dense scratch polynomial over an exponent window [low, low + c.size()).
/// Used on hot paths (sums over common denominators, exact division) where
/// the operands are effectively dense.
struct DensePoly {
    std::int64_t low = 0;
    std::vector<Rational> c;

    DensePoly() = default;
    explicit DensePoly(const LaurentPoly& p)
    {
        if (p.is_zero()) return;
        low = p.min_exp();
        c = p.dense();
    }

    bool empty() const { return c.empty(); }
    std::int64_t high() const { return low + static_cast<std::int64_t>(c.size()) - 1; }

    /// *= (1 - a q^e)
    void mul_binomial(const Rational& a, std::int64_t e)
    {
        if (c.empty() || a == 0) return;
        const std::size_t n = c.size();
        const std::size_t shift = static_cast<std::size_t>(e < 0 ? -e : e);
        c.resize(n + shift);
        if (e > 0) {
            for (std::size_t i = n + shift; i-- > shift;) c[i] -= a * c[i - shift];
        } else {
            // window grows downward: move existing block up by |e| first
            for (std::size_t i = n; i-- > 0;) c[i + shift].swap(c[i]);
            low -= static_cast<std::int64_t>(shift);
            for (std::size_t i = 0; i < n; ++i) c[i] -= a * c[i + shift];
        }
    }

    /// *= q^e
    void shift(std::int64_t e) { low += e; }

    void scale(const Rational& a)
    {
        for (auto& x : c) x *= a;
    }

    /// += other
    void add(const DensePoly& o)
    {
        if (o.c.empty()) return;
        if (c.empty()) {
            *this = o;
            return;
        }
        const std::int64_t lo = std::min(low, o.low);
        const std::int64_t hi = std::max(high(), o.high());
        if (lo < low) {
            std::vector<Rational> grown(static_cast<std::size_t>(hi - lo + 1));
            for (std::size_t i = 0; i < c.size(); ++i) grown[static_cast<std::size_t>(low - lo) + i].swap(c[i]);
            c = std::move(grown);
            low = lo;
        } else if (hi > high()) {
            c.resize(static_cast<std::size_t>(hi - low + 1));
        }
        for (std::size_t i = 0; i < o.c.size(); ++i) c[static_cast<std::size_t>(o.low - low) + i] += o.c[i];
    }

    void trim()
    {
        std::size_t b = 0;
        while (b < c.size() && c[b] == 0) ++b;
        if (b == c.size()) {
            c.clear();
            low = 0;
            return;
        }
        std::size_t e = c.size();
        while (c[e - 1] == 0) --e;
        c.erase(c.begin() + static_cast<std::ptrdiff_t>(e), c.end());
        c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(b));
        low += static_cast<std::int64_t>(b);
    }

    LaurentPoly to_poly() &&
    {
        return LaurentPoly::from_dense(low, std::move(c));
    }
};

/// Divides the ordinary polynomial `num` (coefficients ascending, num[0] may
/// be zero) by `den` (ascending, den.front() and den.back() nonzero) in place.
/// Returns the quotient if the remainder vanishes.
inline std::optional<std::vector<Rational>> exact_quotient(std::vector<Rational> num, const std::vector<Rational>& den)
{
    if (num.size() < den.size()) {
        for (const auto& x : num)
            if (x != 0) return std::nullopt;
        return std::vector<Rational>{};
    }
    const std::size_t dn = den.size() - 1;
    const std::size_t qn = num.size() - dn;
    std::vector<Rational> quot(qn);
    const bool monic = den.back() == 1;
    const Rational lead_inv = monic ? Rational{1} : Rational{1 / den.back()};
    for (std::size_t i = qn; i-- > 0;) {
        Rational& top = num[i + dn];
        if (top == 0) continue;
        Rational f = monic ? top : Rational{top * lead_inv};
        for (std::size_t j = 0; j < dn; ++j)
            if (den[j] != 0) num[i + j] -= f * den[j];
        quot[i] = std::move(f);
        top = 0;
    }
    for (std::size_t i = 0; i < dn; ++i)
        if (num[i] != 0) return std::nullopt;
    return quot;
}

} // namespace detail

inline LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b)
{
    if (a.is_zero() || b.is_zero()) return {};
    const LaurentPoly& small = a.size() <= b.size() ? a : b;
    const LaurentPoly& large = a.size() <= b.size() ? b : a;
    const std::int64_t lo = a.min_exp() + b.min_exp();
    const std::int64_t span = a.max_exp() + b.max_exp() - lo + 1;
    const auto work = static_cast<std::int64_t>(a.size() * b.size());
    if (span <= 4 * work + 1024) {
        std::vector<Rational> acc(static_cast<std::size_t>(span));
        for (const auto& s : small.terms())
            for (const auto& t : large.terms()) acc[static_cast<std::size_t>(s.exp + t.exp - lo)] += s.coeff * t.coeff;
        return LaurentPoly::from_dense(lo, std::move(acc));
    }
    std::map<std::int64_t, Rational> acc;
    for (const auto& s : small.terms())
        for (const auto& t : large.terms()) acc[s.exp + t.exp] += s.coeff * t.coeff;
    std::vector<Term> terms;
    terms.reserve(acc.size());
    for (auto& [e, c] : acc)
        if (c != 0) terms.push_back({e, std::move(c)});
    return LaurentPoly::from_terms(std::move(terms));
}

inline LaurentPoly& LaurentPoly::operator*=(const LaurentPoly& o)
{
    *this = *this * o;
    return *this;
}

inline std::string LaurentPoly::to_string(char var) const
{
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        Rational c = it->coeff;
        const bool neg = c < 0;
        if (neg) c = -c;
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        const bool unit = c == 1;
        if (!unit || it->exp == 0) os << c.get_str();
        if (it->exp != 0) {
            if (!unit) os << '*';
            os << var;
            if (it->exp != 1) os << '^' << it->exp;
        }
    }
    return os.str();
}

inline LaurentPoly poly_mul(const LaurentPoly& a, const LaurentPoly& b) { return a * b; }

/// Exact quotient n/d in the Laurent ring Q[q, 1/q].
///
/// Both operands are normalized to q^k * (polynomial with nonzero constant
/// term); the polynomial parts are then divided by classical long division.
inline std::optional<LaurentPoly> try_divexact(const LaurentPoly& n, const LaurentPoly& d)
{
    if (d.is_zero()) throw DivByZero("poly_divexact by the zero polynomial");
    if (n.is_zero()) return LaurentPoly{};
    auto quot = detail::exact_quotient(n.dense(), d.dense());
    if (!quot) return std::nullopt;
    return LaurentPoly::from_dense(n.min_exp() - d.min_exp(), std::move(*quot));
}

inline LaurentPoly poly_divexact(const LaurentPoly& n, const LaurentPoly& d)
{
    auto r = try_divexact(n, d);
    if (!r) throw NotDivisible("(" + n.to_string() + ") is not divisible by (" + d.to_string() + ")");
    return std::move(*r);
}

/// Substitutions q -> q^s, q -> -q, q -> 1/q.
struct Substitution {
    enum class Kind { power, negate, reciprocal };
    Kind kind;
    std::int64_t s = 1;

    static Substitution power(std::int64_t s)
    {
        if (s < 1) throw OutOfRange("power substitution needs s >= 1");
        return {Kind::power, s};
    }
    static Substitution negate() { return {Kind::negate, 1}; }
    static Substitution reciprocal() { return {Kind::reciprocal, 1}; }
};

inline LaurentPoly poly_substitute(const LaurentPoly& p, Substitution sub)
{
    std::vector<Term> out(p.terms().begin(), p.terms().end());
    for (auto& t : out) {
        switch (sub.kind) {
        case Substitution::Kind::power: t.exp *= sub.s; break;
        case Substitution::Kind::negate:
            if (t.exp % 2 != 0) t.coeff = -t.coeff;
            break;
        case Substitution::Kind::reciprocal: t.exp = -t.exp; break;
        }
    }
    return LaurentPoly::from_terms(std::move(out));
}

inline Rational poly_eval(const LaurentPoly& p, const Rational& x)
{
    if (p.is_zero()) return 0;
    if (x == 0) {
        if (p.min_exp() < 0) throw ZeroAtPole("evaluation at q = 0 with negative exponents present");
        return p.coeff(0);
    }
    Rational sum = 0;
    std::int64_t cur = p.min_exp();
    Rational power = pow(x, cur);
    for (const auto& t : p.terms()) {
        if (t.exp != cur) {
            power *= pow(x, t.exp - cur);
            cur = t.exp;
        }
        sum += t.coeff * power;
    }
    return sum;
}

} // namespace qcong
