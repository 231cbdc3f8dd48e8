#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "congruence.hpp"
#include "cyclotomic.hpp"
#include "errors.hpp"
#include "modform.hpp"
#include "padic.hpp"
#include "qseries.hpp"
#include "series_identity.hpp"

namespace qcong {

struct IntRange {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    bool single() const { return lo == hi; }
};

/// "a..b" or "a".
inline IntRange parse_range(std::string_view text)
{
    auto number = [&](std::string_view s) {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
            throw ConfigError("bad integer '" + std::string(s) + "' in range '" + std::string(text) + "'");
        return v;
    };
    const auto dots = text.find("..");
    IntRange r;
    if (dots == std::string_view::npos) {
        r.lo = r.hi = number(text);
    } else {
        r.lo = number(text.substr(0, dots));
        r.hi = number(text.substr(dots + 2));
    }
    if (r.lo > r.hi) throw ConfigError("empty range '" + std::string(text) + "'");
    return r;
}

enum class OutputFormat { table, jsonl };
enum class T3Ranges { full, half, both };

struct RunConfig {
    std::vector<std::string> families;
    std::optional<IntRange> n_range;
    std::optional<IntRange> p_range;
    std::optional<std::vector<std::int64_t>> ell_list; ///< empty optional: every ell
    std::int64_t series_order = 100;
    std::int64_t sample_count = 0; ///< 0: the minimum each instance needs
    OutputFormat output = OutputFormat::table;
    unsigned jobs = 0; ///< 0: hardware concurrency
    T3Ranges t3_ranges = T3Ranges::both;
    // series parameters
    std::vector<Rational> b_values{Rational{2}, Rational{3}};
    std::vector<Rational> c_values{Rational{3}, Rational{5}};
    std::vector<Rational> a_values{Rational{2}, Rational{3}, Rational{5}};
};

struct Summary {
    std::size_t total = 0, passed = 0, failed = 0, skipped = 0;
};

inline nlohmann::json verdict_json(const CongruenceVerdict& v)
{
    using nlohmann::json;
    json j;
    j["family"] = v.family;
    j["n"] = v.n ? json(*v.n) : json(nullptr);
    j["ell"] = v.ell ? json(*v.ell) : json(nullptr);
    j["p"] = v.p ? json(*v.p) : json(nullptr);
    json mod = json::array();
    if (v.prime_power)
        mod.push_back({v.prime_power->first, v.prime_power->second});
    else
        for (const auto& [index, exp] : v.modulus.parts) mod.push_back({index, exp});
    j["modulus"] = mod;
    j["passed"] = v.passed;
    j["skipped"] = v.skipped;
    j["millis"] = std::round(v.millis * 1000) / 1000;
    j["detail"] = v.detail;
    return j;
}

inline std::string modulus_text(const CongruenceVerdict& v)
{
    if (v.prime_power) return std::to_string(v.prime_power->first) + "^" + std::to_string(v.prime_power->second);
    return v.modulus.to_string();
}

inline std::string verdict_row(const CongruenceVerdict& v)
{
    auto opt = [](const std::optional<std::int64_t>& x) { return x ? std::to_string(*x) : std::string("-"); };
    std::ostringstream os;
    os << std::left << std::setw(8) << v.family << std::right << std::setw(5) << opt(v.n) << std::setw(5)
       << opt(v.ell) << std::setw(5) << opt(v.p) << "  " << std::left << std::setw(22) << modulus_text(v)
       << std::setw(6) << (v.skipped ? "skip" : v.passed ? "pass" : "FAIL") << std::right << std::setw(10)
       << std::fixed << std::setprecision(1) << v.millis << "  " << v.detail;
    return os.str();
}

inline std::string table_header()
{
    std::ostringstream os;
    os << std::left << std::setw(8) << "family" << std::right << std::setw(5) << "n" << std::setw(5) << "ell"
       << std::setw(5) << "p" << "  " << std::left << std::setw(22) << "modulus" << std::setw(6) << "status"
       << std::right << std::setw(10) << "ms" << "  detail";
    return os.str();
}

/// One independent unit of work.
struct Task {
    std::function<CongruenceVerdict()> run;
};

namespace detail {

inline CongruenceVerdict skipped_verdict(std::string family, std::optional<std::int64_t> n, std::optional<std::int64_t> ell,
                                         std::optional<std::int64_t> p, std::string why)
{
    CongruenceVerdict v;
    v.family = std::move(family);
    v.n = n;
    v.ell = ell;
    v.p = p;
    v.skipped = true;
    v.detail = std::move(why);
    return v;
}

inline const std::map<std::string, Family>& q_families()
{
    static const std::map<std::string, Family> m{{"T1", Family::T1},   {"T2", Family::T2},
                                                  {"T3", Family::T3},   {"E05", Family::E05},
                                                  {"CONJ413", Family::CONJ413}, {"MODPHI", Family::MODPHI}};
    return m;
}

inline const std::map<std::string, ClassicalFamily>& classical_families()
{
    static const std::map<std::string, ClassicalFamily> m{
        {"B2", ClassicalFamily::B2},     {"H2", ClassicalFamily::H2},   {"LR", ClassicalFamily::LR},
        {"COR13", ClassicalFamily::COR13}, {"SIDE", ClassicalFamily::SIDE}, {"MP", ClassicalFamily::MP},
        {"HAMME0", ClassicalFamily::HAMME0}, {"RF34", ClassicalFamily::RF34}};
    return m;
}

inline bool is_series_family(const std::string& f) { return f == "ORIGIN" || f == "QDIXON" || f == "WATSON"; }

/// Odd n in range; an explicit single even or nonpositive n is a usage error.
inline std::vector<std::int64_t> odd_values(const IntRange& r, const std::string& family)
{
    if (r.single() && (r.lo < 1 || r.lo % 2 == 0))
        throw ConfigError(family + " needs a positive odd n, got " + std::to_string(r.lo));
    std::vector<std::int64_t> out;
    for (std::int64_t n = std::max<std::int64_t>(r.lo, 1); n <= r.hi; ++n)
        if (n % 2 == 1) out.push_back(n);
    if (out.empty()) throw ConfigError("no odd n in the requested range");
    return out;
}

inline std::vector<std::int64_t> odd_primes(const IntRange& r, const std::string& family)
{
    if (r.single() && (!is_prime(r.lo) || r.lo == 2))
        throw ConfigError(family + " needs an odd prime p, got " + std::to_string(r.lo));
    std::vector<std::int64_t> out;
    for (std::int64_t p = std::max<std::int64_t>(r.lo, 3); p <= r.hi; ++p)
        if (is_prime(p)) out.push_back(p);
    if (out.empty()) throw ConfigError("no odd prime in the requested range");
    return out;
}

inline std::vector<std::int64_t> ell_values(const RunConfig& cfg, std::int64_t n)
{
    const std::int64_t m = (n - 1) / 2;
    std::vector<std::int64_t> out;
    if (!cfg.ell_list) {
        for (std::int64_t l = 0; l <= m; ++l) out.push_back(l);
    } else {
        for (auto l : *cfg.ell_list)
            if (l >= 0 && l <= m) out.push_back(l);
    }
    return out;
}

inline std::vector<Rational> samples_for(const RunConfig& cfg, std::size_t needed)
{
    if (cfg.sample_count == 0) return prime_samples(needed);
    if (static_cast<std::size_t>(cfg.sample_count) < needed)
        throw ConfigError("--samples " + std::to_string(cfg.sample_count) + " is below the " +
                          std::to_string(needed) + " samples this instance needs");
    return prime_samples(static_cast<std::size_t>(cfg.sample_count));
}

} // namespace detail

/// Expands the config into tasks in report order. Throws ConfigError on
/// usage errors before any work starts.
inline std::vector<Task> build_tasks(const RunConfig& cfg, CyclotomicCache& cache,
                                     std::shared_ptr<const EtaCoefficients>& eta)
{
    using namespace detail;
    if (cfg.families.empty()) throw ConfigError("no family selected");
    if (cfg.series_order < 1) throw ConfigError("series order must be >= 1");
    if (cfg.sample_count < 0) throw ConfigError("sample count must be >= 0");
    const IntRange n_range = cfg.n_range.value_or(IntRange{1, 45});
    const IntRange p_range = cfg.p_range.value_or(IntRange{3, 97});
    std::vector<Task> tasks;
    CyclotomicCache* c = &cache;
    std::set<std::int64_t> indices;
    auto need = [&](std::int64_t n) {
        indices.insert(n);
        indices.insert(2 * n);
    };

    for (const auto& family : cfg.families) {
        if (auto it = q_families().find(family); it != q_families().end()) {
            const Family f = it->second;
            for (auto n : odd_values(n_range, family)) {
                need(n);
                if ((f == Family::T2 || f == Family::CONJ413) && n == 1) {
                    tasks.push_back({[=] { return skipped_verdict(family, n, std::nullopt, std::nullopt, "needs n > 1"); }});
                    continue;
                }
                if (f == Family::CONJ413 && n % 4 != 3) {
                    tasks.push_back(
                        {[=] { return skipped_verdict(family, n, std::nullopt, std::nullopt, "needs n = 3 (mod 4)"); }});
                    continue;
                }
                if (f != Family::T3) {
                    tasks.push_back({[=] { return verify_theorem(f, n, 0, *c); }});
                    continue;
                }
                for (auto l : ell_values(cfg, n)) {
                    const T3Ranges ranges = cfg.t3_ranges;
                    tasks.push_back({[=] {
                        if (ranges == T3Ranges::full) return verify_theorem(f, n, l, *c, Truncation::full);
                        if (ranges == T3Ranges::half) return verify_theorem(f, n, l, *c, Truncation::half);
                        CongruenceVerdict full = verify_theorem(f, n, l, *c, Truncation::full);
                        const CongruenceVerdict half = verify_theorem(f, n, l, *c, Truncation::half);
                        const bool agree = full.passed == half.passed;
                        full.detail = "full: " + full.detail + " | half: " + half.detail +
                                      (agree ? "" : " | truncations disagree");
                        full.passed = full.passed && half.passed && agree;
                        full.millis += half.millis;
                        return full;
                    }});
                }
            }
        } else if (family == "PARAM") {
            for (auto n : odd_values(n_range, family)) {
                need(n);
                if (n == 1) {
                    tasks.push_back({[=] { return skipped_verdict(family, n, std::nullopt, std::nullopt, "needs n > 1"); }});
                    continue;
                }
                const auto samples = samples_for(cfg, static_cast<std::size_t>(2 * (n + 1) + 1));
                for (auto l : ell_values(cfg, n))
                    tasks.push_back({[=] { return verify_parametric(n, l, samples, *c); }});
            }
        } else if (family == "L21") {
            for (auto n : odd_values(n_range, family)) {
                need(n);
                if (n == 1) {
                    tasks.push_back({[=] { return skipped_verdict(family, n, std::nullopt, std::nullopt, "needs n > 1"); }});
                    continue;
                }
                const auto samples = samples_for(cfg, static_cast<std::size_t>(n + 2));
                for (std::int64_t k = 0; k <= (n - 1) / 2; ++k)
                    tasks.push_back({[=] { return verify_lemma21(n, k, samples, *c); }});
            }
        } else if (auto ct = classical_families().find(family); ct != classical_families().end()) {
            const ClassicalFamily f = ct->second;
            for (auto p : odd_primes(p_range, family)) {
                const bool one = p % 4 == 1;
                if (((f == ClassicalFamily::MP || f == ClassicalFamily::HAMME0) && !one) ||
                    (f == ClassicalFamily::RF34 && one)) {
                    tasks.push_back({[=] {
                        return skipped_verdict(family, std::nullopt, std::nullopt, p,
                                               one ? "needs p = 3 (mod 4)" : "needs p = 1 (mod 4)");
                    }});
                    continue;
                }
                tasks.push_back({[=] { return verify_classical(f, p); }});
            }
        } else if (family == "MODFORM") {
            const auto primes = odd_primes(p_range, family);
            if (!eta) eta = std::make_shared<const EtaCoefficients>(eta_coefficients(std::max<std::int64_t>(primes.back(), 9)));
            if (eta->N < primes.back()) eta = std::make_shared<const EtaCoefficients>(eta_coefficients(primes.back()));
            const auto coeffs = eta;
            for (auto p : primes) tasks.push_back({[=] { return verify_modform(p, *coeffs); }});
        } else if (is_series_family(family)) {
            const std::int64_t N = cfg.series_order;
            auto add = [&](SeriesIdentity id, std::string params) {
                tasks.push_back({[=] {
                    CongruenceVerdict v = verify_series_identity(id, N);
                    v.detail = (params.empty() ? "" : params + ": ") + v.detail;
                    return v;
                }});
            };
            if (family == "ORIGIN") {
                add(OriginIdentity{}, "");
            } else if (family == "QDIXON") {
                const std::vector<std::int64_t> ells = cfg.ell_list.value_or(std::vector<std::int64_t>{0, 1, 2});
                for (auto l : ells)
                    for (const auto& b : cfg.b_values)
                        for (const auto& cc : cfg.c_values)
                            add(QDixonIdentity{l, b, cc}, "b=" + b.get_str() + " c=" + cc.get_str());
            } else {
                for (const auto& a : cfg.a_values) add(WatsonIdentity{a}, "a=" + a.get_str());
            }
        } else {
            throw ConfigError("unknown family '" + family + "'");
        }
    }
    // workers only read the cache
    cache.prepare({indices.begin(), indices.end()});
    return tasks;
}

/// Runs tasks on `jobs` workers; `emit` sees verdicts in task order.
inline void run_tasks(std::vector<Task>& tasks, unsigned jobs, const std::function<void(const CongruenceVerdict&)>& emit)
{
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1)));
    std::vector<std::optional<CongruenceVerdict>> results(tasks.size());
    std::mutex mu;
    std::condition_variable ready;
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            CongruenceVerdict v;
            try {
                v = tasks[i].run();
            } catch (const Error& e) {
                v.family = "error";
                v.passed = false;
                v.detail = e.what();
            }
            {
                std::lock_guard lock(mu);
                results[i] = std::move(v);
            }
            ready.notify_one();
        }
    };
    std::vector<std::jthread> workers;
    for (unsigned j = 0; j < jobs; ++j) workers.emplace_back(work);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        std::unique_lock lock(mu);
        ready.wait(lock, [&] { return results[i].has_value(); });
        CongruenceVerdict v = std::move(*results[i]);
        results[i].reset();
        lock.unlock();
        emit(v);
    }
}

/// Runs every selected verification, streaming records to `out` and the
/// summary line to `summary_out`. Returns 0 if nothing failed, 1 otherwise.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& summary_out, Summary* summary = nullptr)
{
    CyclotomicCache cache;
    std::shared_ptr<const EtaCoefficients> eta;
    auto tasks = build_tasks(cfg, cache, eta);
    Summary s;
    if (cfg.output == OutputFormat::table) out << table_header() << '\n';
    run_tasks(tasks, cfg.jobs, [&](const CongruenceVerdict& v) {
        ++s.total;
        if (v.skipped)
            ++s.skipped;
        else if (v.passed)
            ++s.passed;
        else
            ++s.failed;
        if (cfg.output == OutputFormat::jsonl)
            out << verdict_json(v).dump() << '\n';
        else
            out << verdict_row(v) << '\n';
        out.flush();
    });
    summary_out << "total " << s.total << " passed " << s.passed << " failed " << s.failed << " skipped " << s.skipped
                << '\n';
    if (summary) *summary = s;
    return s.failed == 0 ? 0 : 1;
}

} // namespace qcong
