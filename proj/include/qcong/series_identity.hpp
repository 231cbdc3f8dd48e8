#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "congruence.hpp"
#include "errors.hpp"
#include "qseries.hpp"
#include "rational.hpp"

namespace qcong {

/// Coefficients of q^low .. q^order of a formal Laurent series.
struct LaurentSeries {
    std::int64_t low = 0;
    std::int64_t order = 0;
    std::vector<Rational> coeffs;

    Rational at(std::int64_t e) const
    {
        if (e < low || e > order) return 0;
        return coeffs[static_cast<std::size_t>(e - low)];
    }
};

/// Non-cumulative factor 1 - c q^{slope*k + offset} of the k-th term.
struct LinearFactor {
    Rational c;
    std::int64_t slope;
    std::int64_t offset;
};

/// (c q^e0; q^step)_k
struct PochFactor {
    Rational c;
    std::int64_t e0;
    std::int64_t step;
};

/// sum_{k>=0} prod num_poch / prod den_poch * prod extra_num / prod extra_den
///            * (ratio_c q^ratio_e)^k
struct HypergeometricSum {
    std::vector<PochFactor> num, den;
    std::vector<LinearFactor> extra_num, extra_den;
    Rational ratio_c{1};
    std::int64_t ratio_e = 1;
};

/// prod finite (1 - c q^e)^power * prod infinite families.
struct ProductSide {
    struct Finite {
        Rational c;
        std::int64_t e;
        int power;
    };
    std::vector<Finite> finite;
    std::vector<ProductFactor> infinite;
};

namespace detail {

/// scalar * q^shift * body, with body a power series whose constant term is 1.
/// Factors are absorbed in normalized form:
///   e > 0:  1 - c q^e             -> body
///   e = 0:  1 - c                 -> scalar
///   e < 0:  -c q^e (1 - q^{-e}/c) -> scalar, shift and body
struct NormalizedFactor {
    Rational scalar{1};
    std::int64_t shift = 0;
    Rational body_c{0};
    std::int64_t body_e = 0;
};

inline NormalizedFactor normalize(const Rational& c, std::int64_t e)
{
    NormalizedFactor f;
    if (c == 0) return f;
    if (e > 0) {
        f.body_c = c;
        f.body_e = e;
    } else if (e == 0) {
        f.scalar = 1 - c;
    } else {
        f.scalar = -c;
        f.shift = e;
        f.body_c = 1 / c;
        f.body_e = -e;
    }
    return f;
}

struct TermState {
    Rational scalar{1};
    std::int64_t shift = 0;

    void absorb(const NormalizedFactor& f, bool denominator)
    {
        if (denominator) {
            if (f.scalar == 0) throw ParameterPole("denominator factor vanishes at q = 0");
            scalar /= f.scalar;
            shift -= f.shift;
        } else {
            scalar *= f.scalar;
            shift += f.shift;
        }
    }
};

inline void apply_body(PowerSeries& body, const NormalizedFactor& f, bool denominator)
{
    if (f.body_e == 0) return;
    if (denominator)
        body.div_binomial(f.body_c, f.body_e);
    else
        body.mul_binomial(f.body_c, f.body_e);
}

inline void accumulate(LaurentSeries& out, const Rational& scalar, std::int64_t shift, const PowerSeries& body)
{
    for (std::int64_t i = 0; i <= body.order(); ++i) {
        const std::int64_t e = shift + i;
        if (e > out.order) break;
        if (e < out.low) throw std::logic_error("series window too small");
        if (body[i] != 0) out.coeffs[static_cast<std::size_t>(e - out.low)] += scalar * body[i];
    }
}

} // namespace detail

/// Expands the sum through q^N. Terms are added until the k-th term's
/// valuation exceeds N and every later factor has a positive exponent.
inline LaurentSeries expand_sum(const HypergeometricSum& s, std::int64_t N, std::int64_t* terms_used = nullptr)
{
    using detail::normalize;
    if (s.ratio_c == 0) throw ParameterPole("zero term ratio");

    // exponents of the k-th cumulative factors grow linearly; past `settle`
    // they are all positive and the valuation rises by ratio_e per step
    std::int64_t settle = 0;
    for (const auto& f : s.num) settle = std::max(settle, f.e0 <= 0 ? (-f.e0) / f.step + 1 : 0);
    for (const auto& f : s.den) settle = std::max(settle, f.e0 <= 0 ? (-f.e0) / f.step + 1 : 0);
    for (const auto& f : s.extra_num)
        if (f.slope > 0) settle = std::max(settle, f.offset <= 0 ? (-f.offset) / f.slope + 1 : 0);
    if (s.ratio_e < 1) throw OutOfRange("sum needs a positive q-power ratio to converge formally");

    auto term_meta = [&](std::int64_t k, const detail::TermState& cum) {
        detail::TermState t = cum;
        t.shift += s.ratio_e * k;
        for (const auto& f : s.extra_num) t.absorb(normalize(f.c, f.slope * k + f.offset), false);
        for (const auto& f : s.extra_den) t.absorb(normalize(f.c, f.slope * k + f.offset), true);
        return t;
    };
    auto advance = [&](std::int64_t k, detail::TermState& cum, PowerSeries* body) {
        cum.scalar *= s.ratio_c;
        for (const auto& f : s.num) {
            auto nf = normalize(f.c, f.e0 + f.step * k);
            cum.absorb(nf, false);
            if (body) detail::apply_body(*body, nf, false);
        }
        for (const auto& f : s.den) {
            auto nf = normalize(f.c, f.e0 + f.step * k);
            cum.absorb(nf, true);
            if (body) detail::apply_body(*body, nf, true);
        }
    };

    // pass 1: valuations only
    std::int64_t low = std::numeric_limits<std::int64_t>::max();
    std::int64_t last = -1;
    {
        detail::TermState cum;
        for (std::int64_t k = 0;; ++k) {
            if (cum.scalar == 0) break; // every later term carries a vanishing factor
            const auto t = term_meta(k, cum);
            if (k >= settle && t.shift > N) break;
            if (t.scalar != 0 && t.shift <= N) {
                low = std::min(low, t.shift);
                last = k;
            }
            advance(k, cum, nullptr);
        }
    }
    LaurentSeries out;
    out.order = N;
    out.low = std::min<std::int64_t>(low == std::numeric_limits<std::int64_t>::max() ? 0 : low, 0);
    out.coeffs.assign(static_cast<std::size_t>(N - out.low + 1), Rational{0});
    if (terms_used) *terms_used = last + 1;
    if (last < 0) return out;

    // pass 2: bodies, kept to the widest order any term needs
    PowerSeries body = PowerSeries::one(N - out.low);
    detail::TermState cum;
    for (std::int64_t k = 0; k <= last; ++k) {
        const auto t = term_meta(k, cum);
        if (t.scalar != 0 && t.shift <= N) {
            PowerSeries term = body.truncated(N - t.shift);
            for (const auto& f : s.extra_num) detail::apply_body(term, normalize(f.c, f.slope * k + f.offset), false);
            for (const auto& f : s.extra_den) detail::apply_body(term, normalize(f.c, f.slope * k + f.offset), true);
            detail::accumulate(out, t.scalar, t.shift, term);
        }
        advance(k, cum, &body);
    }
    return out;
}

/// Expands the product side through q^N. Factors of the infinite families
/// with nonpositive exponents are peeled off as finite factors first.
inline LaurentSeries expand_product(const ProductSide& side, std::int64_t N)
{
    using detail::normalize;
    detail::TermState head;
    std::vector<std::pair<detail::NormalizedFactor, int>> finite;
    auto add_finite = [&](const Rational& c, std::int64_t e, int power) {
        auto nf = normalize(c, e);
        for (int i = 0; i < std::abs(power); ++i) head.absorb(nf, power < 0);
        finite.emplace_back(nf, power);
    };
    std::vector<ProductFactor> tail;
    for (const auto& f : side.finite) add_finite(f.c, f.e, f.power);
    for (auto f : side.infinite) {
        if (f.step < 1) throw OutOfRange("product step must be >= 1");
        while (f.start <= 0) {
            add_finite(f.coeff, f.start, f.power);
            f.start += f.step;
        }
        tail.push_back(f);
    }
    LaurentSeries out;
    out.order = N;
    out.low = std::min<std::int64_t>(head.shift, 0);
    out.coeffs.assign(static_cast<std::size_t>(N - out.low + 1), Rational{0});
    if (head.scalar == 0 || head.shift > N) return out;
    PowerSeries body = infinite_product(tail, N - head.shift);
    for (const auto& [nf, power] : finite)
        for (int i = 0; i < std::abs(power); ++i) detail::apply_body(body, nf, power < 0);
    detail::accumulate(out, head.scalar, head.shift, body);
    return out;
}

struct OriginIdentity {};
struct QDixonIdentity {
    std::int64_t ell;
    Rational b, c;
};
struct WatsonIdentity {
    Rational a;
};
using SeriesIdentity = std::variant<OriginIdentity, QDixonIdentity, WatsonIdentity>;

inline std::string identity_name(const SeriesIdentity& id)
{
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, OriginIdentity>) return "ORIGIN";
            else if constexpr (std::is_same_v<T, QDixonIdentity>) return "QDIXON";
            else return "WATSON";
        },
        id);
}

/// Both sides of the identity as (sum, product).
inline std::pair<HypergeometricSum, ProductSide> identity_sides(const SeriesIdentity& id)
{
    const Rational one{1}, minus{-1};
    HypergeometricSum s;
    ProductSide p;
    if (std::holds_alternative<OriginIdentity>(id)) {
        // sum (1+q^{4k+1}) (q^2;q^4)_k^3 q^k / ((1+q) (q^4;q^4)_k^3)
        //  = (q^2;q^4)^2 (q^3;q^4)^2 / ((1+q) (q;q^4)^2 (q^4;q^4)^2)
        s.num = {{one, 2, 4}, {one, 2, 4}, {one, 2, 4}};
        s.den = {{one, 4, 4}, {one, 4, 4}, {one, 4, 4}};
        s.extra_num = {{minus, 4, 1}};
        s.extra_den = {{minus, 0, 1}};
        s.ratio_e = 1;
        p.finite = {{minus, 1, -1}};
        p.infinite = {{one, 2, 4, 2}, {one, 3, 4, 2}, {one, 1, 4, -2}, {one, 4, 4, -2}};
    } else if (const auto* d = std::get_if<QDixonIdentity>(&id)) {
        const std::int64_t l = d->ell;
        if (d->b == 0 || d->c == 0) throw ParameterPole("q-Dixon parameters must be nonzero");
        const Rational ib = one / d->b, ic = one / d->c, ibc = one / (d->b * d->c);
        s.num = {{one, 2 - 4 * l, 4}, {d->b, 2 - 4 * l, 4}, {d->c, 2 - 4 * l, 4}};
        s.den = {{ib, 4, 4}, {ic, 4, 4}, {one, 4, 4}};
        s.extra_num = {{minus, 4, 1 - 2 * l}};
        s.extra_den = {{minus, 0, 1 - 2 * l}};
        s.ratio_c = ibc;
        s.ratio_e = 6 * l + 1;
        p.infinite = {{one, 6 - 4 * l, 4, 1}, {ib, 2 * l + 3, 4, 1}, {ic, 2 * l + 3, 4, 1},
                      {ibc, 4 * l + 2, 4, 1}, {ib, 4, 4, -1},          {ic, 4, 4, -1},
                      {one, 5 - 2 * l, 4, -1}, {ibc, 6 * l + 1, 4, -1}};
    } else {
        const Rational a = std::get<WatsonIdentity>(id).a;
        if (a == 0) throw ParameterPole("Watson parameter must be nonzero");
        const Rational ia = one / a;
        s.num = {{a, 1, 2}, {ia, 1, 2}, {minus, 1, 2}, {minus, 1, 2}, {one, 2, 4}};
        s.den = {{one, 2, 2}, {one, 2, 2}, {Rational{-a}, 2, 2}, {Rational{-ia}, 2, 2}, {one, 4, 4}};
        s.extra_num = {{minus, 4, 1}};
        s.extra_den = {{minus, 0, 1}};
        s.ratio_e = 1;
        p.finite = {{minus, 1, -1}};
        p.infinite = {{minus, 1, 2, 2},         {a, 3, 4, 2},          {ia, 3, 4, 2},
                      {Rational{-a}, 2, 2, -1}, {Rational{-ia}, 2, 2, -1}, {one, 2, 2, -2}};
    }
    return {s, p};
}

/// Expands both sides through q^N and compares every coefficient.
inline CongruenceVerdict verify_series_identity(const SeriesIdentity& id, std::int64_t N)
{
    detail::Stopwatch clock;
    if (N < 0) throw OutOfRange("series order must be >= 0");
    const auto [sum, product] = identity_sides(id);
    std::int64_t terms = 0;
    const LaurentSeries lhs = expand_sum(sum, N, &terms);
    const LaurentSeries rhs = expand_product(product, N);

    CongruenceVerdict v;
    v.family = identity_name(id);
    if (const auto* d = std::get_if<QDixonIdentity>(&id)) v.ell = d->ell;
    v.passed = true;
    const std::int64_t low = std::min(lhs.low, rhs.low);
    std::ostringstream detail;
    for (std::int64_t e = low; e <= N; ++e) {
        if (lhs.at(e) != rhs.at(e)) {
            v.passed = false;
            detail << "first mismatch at q^" << e << ": " << lhs.at(e).get_str() << " vs " << rhs.at(e).get_str();
            break;
        }
    }
    if (v.passed) detail << "coefficients q^" << low << "..q^" << N << " agree (" << terms << " terms)";
    v.detail = detail.str();
    v.millis = clock.millis();
    return v;
}

} // namespace qcong
