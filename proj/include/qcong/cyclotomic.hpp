#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <vector>

#include "errors.hpp"
#include "laurent_poly.hpp"

namespace qcong {

inline std::vector<std::int64_t> divisors(std::int64_t n)
{
    std::vector<std::int64_t> small, large;
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        small.push_back(d);
        if (d * d != n) large.push_back(n / d);
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

inline std::int64_t euler_phi(std::int64_t n)
{
    std::int64_t result = n;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        while (n % p == 0) n /= p;
        result -= result / p;
    }
    if (n > 1) result -= result / n;
    return result;
}

/// Memo table n -> Phi_n(q).
///
/// Lookups take a shared lock and insertions an exclusive one; entries are
/// never erased, so returned references stay valid for the cache's lifetime.
/// Drivers call prepare() for every index they need before fanning out.
class CyclotomicCache {
public:
    const LaurentPoly& get(std::int64_t n)
    {
        if (n < 1) throw InvalidIndex("cyclotomic index must be >= 1");
        {
            std::shared_lock lock(mutex_);
            auto it = table_.find(n);
            if (it != table_.end()) return it->second;
        }
        // q^n - 1 divided by Phi_d for every proper divisor d
        LaurentPoly acc = LaurentPoly::monomial(Rational{1}, n) - LaurentPoly{1};
        for (std::int64_t d : divisors(n)) {
            if (d == n) break;
            acc = poly_divexact(acc, get(d));
        }
        std::unique_lock lock(mutex_);
        return table_.try_emplace(n, std::move(acc)).first->second;
    }

    void prepare(const std::vector<std::int64_t>& indices)
    {
        for (auto n : indices) get(n);
    }

    std::vector<std::int64_t> cached_indices() const
    {
        std::shared_lock lock(mutex_);
        std::vector<std::int64_t> out;
        for (const auto& [n, _] : table_) out.push_back(n);
        return out;
    }

private:
    mutable std::shared_mutex mutex_;
    std::map<std::int64_t, LaurentPoly> table_;
};

inline const LaurentPoly& cyclotomic(std::int64_t n, CyclotomicCache& cache) { return cache.get(n); }

/// For odd n > 1, Phi_n(-q) = Phi_{2n}(q); returns 2n after checking the
/// identity by expansion.
inline std::int64_t phi_neg_index(std::int64_t n, CyclotomicCache& cache)
{
    if (n <= 1 || n % 2 == 0) throw InvalidIndex("phi_neg_index needs an odd index > 1");
    if (poly_substitute(cache.get(n), Substitution::negate()) != cache.get(2 * n))
        throw std::logic_error("Phi_n(-q) != Phi_2n(q)");
    return 2 * n;
}

/// Multiplicity of Phi_d in 1 - q^m.
inline int multiplicity(std::int64_t d, std::int64_t m)
{
    if (d < 1 || m < 1) throw InvalidIndex("multiplicity needs positive arguments");
    return m % d == 0 ? 1 : 0;
}

} // namespace qcong
