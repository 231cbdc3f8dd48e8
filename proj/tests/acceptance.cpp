// Acceptance run: one line per criterion, PASS or FAIL, with the pinned time
// limits. `acceptance AC3` runs a single criterion; no argument runs all.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qcong/congruence.hpp"
#include "qcong/cyclotomic.hpp"
#include "qcong/modform.hpp"
#include "qcong/padic.hpp"
#include "qcong/series_identity.hpp"

using namespace qcong;

namespace {

struct Outcome {
    bool passed = true;
    std::string summary;
};

struct Criterion {
    std::string id;
    std::string title;
    std::optional<double> limit_seconds;
    std::function<Outcome()> run;
};

/// Tally over many instances; per-family lines go to stdout as they close.
class Tally {
public:
    explicit Tally(std::string id) : id_(std::move(id)) {}

    void add(const std::string& family, bool passed, const std::string& what = {})
    {
        auto& f = families_[family];
        ++f.total;
        if (passed)
            ++f.passed;
        else if (f.first_failure.empty())
            f.first_failure = what;
    }

    Outcome close(bool print_families = true) const
    {
        Outcome o;
        std::ostringstream s;
        std::size_t total = 0, passed = 0;
        for (const auto& [name, f] : families_) {
            total += f.total;
            passed += f.passed;
            if (print_families && families_.size() > 1)
                std::cout << "  " << id_ << " " << name << " " << (f.passed == f.total ? "PASS" : "FAIL") << " "
                          << f.passed << "/" << f.total
                          << (f.first_failure.empty() ? "" : "  first failure: " + f.first_failure) << '\n';
        }
        o.passed = passed == total && total > 0;
        s << passed << "/" << total << " checks";
        if (families_.size() == 1 && !families_.begin()->second.first_failure.empty())
            s << "; first failure: " << families_.begin()->second.first_failure;
        o.summary = s.str();
        return o;
    }

private:
    struct Counts {
        std::size_t total = 0, passed = 0;
        std::string first_failure;
    };
    std::string id_;
    std::map<std::string, Counts> families_;
};

std::vector<std::int64_t> odd_range(std::int64_t lo, std::int64_t hi)
{
    std::vector<std::int64_t> out;
    for (auto n = lo; n <= hi; ++n)
        if (n % 2 != 0) out.push_back(n);
    return out;
}

std::vector<std::int64_t> odd_primes_upto(std::int64_t hi)
{
    std::vector<std::int64_t> out;
    for (std::int64_t p = 3; p <= hi; ++p)
        if (is_prime(p)) out.push_back(p);
    return out;
}

std::string label(const CongruenceVerdict& v)
{
    std::ostringstream s;
    s << v.family;
    if (v.n) s << " n=" << *v.n;
    if (v.ell) s << " ell=" << *v.ell;
    if (v.p) s << " p=" << *v.p;
    s << ": " << v.detail;
    return s.str();
}

CyclotomicCache& cache()
{
    static CyclotomicCache c;
    return c;
}

Outcome theorem_sweep(const std::string& id, Family family, std::int64_t lo, std::int64_t hi, std::size_t expected)
{
    Tally t(id);
    for (auto n : odd_range(lo, hi)) {
        const auto v = verify_theorem(family, n, 0, cache());
        const auto want = theorem_modulus(family, n, 0);
        const bool modulus_ok = v.modulus.to_string() == want.to_string();
        t.add(std::string(family_name(family)), v.passed && modulus_ok, label(v));
    }
    Outcome o = t.close();
    const std::size_t count = odd_range(lo, hi).size();
    if (count != expected) {
        o.passed = false;
        o.summary += "; expected " + std::to_string(expected) + " instances, enumerated " + std::to_string(count);
    }
    return o;
}

Outcome ac1() { return theorem_sweep("AC1", Family::T1, 1, 45, 23); }
Outcome ac2() { return theorem_sweep("AC2", Family::T2, 3, 45, 22); }

Outcome ac3()
{
    Tally t("AC3");
    for (auto n : odd_range(1, 25))
        for (std::int64_t l = 0; l <= (n - 1) / 2; ++l) {
            const auto full = verify_theorem(Family::T3, n, l, cache(), Truncation::full);
            const auto half = verify_theorem(Family::T3, n, l, cache(), Truncation::half);
            t.add("T3 k<=n-1", full.passed, label(full));
            t.add("T3 k<=(n-1)/2+ell", half.passed, label(half));
            t.add("T3 truncations agree", full.passed == half.passed, label(full));
        }
    return t.close();
}

Outcome ac4()
{
    Tally t("AC4");
    for (std::int64_t n : {3, 5, 7, 9, 11, 13})
        for (std::int64_t l : {0, 1, 2}) {
            if (l > (n - 1) / 2) continue;
            const std::size_t samples = static_cast<std::size_t>(2 * (n + 1) + 1);
            const auto v = verify_parametric(n, l, prime_samples(samples), cache());
            const bool plus = v.detail.find("a=q^2n exact: yes") != std::string::npos;
            const bool minus = v.detail.find("a=q^-2n exact: yes") != std::string::npos;
            const bool sampled = v.detail.find("samples pass") != std::string::npos;
            t.add("PARAM (i) a=q^2n exact", plus, label(v));
            t.add("PARAM (ii) a=q^-2n exact", minus, label(v));
            t.add("PARAM (iii) sampled", sampled && v.passed, label(v));
        }
    return t.close();
}

Outcome ac5()
{
    Tally t("AC5");
    for (auto n : odd_range(3, 25))
        for (std::int64_t k = 0; k <= (n - 1) / 2; ++k) {
            const auto v = verify_lemma21(n, k, prime_samples(static_cast<std::size_t>(n + 2)), cache());
            t.add("L21", v.passed, label(v));
        }
    return t.close();
}

Outcome ac6()
{
    Tally t("AC6");
    for (auto n : odd_range(3, 45)) {
        const auto v = verify_theorem(Family::E05, n, 0, cache());
        const bool modulus_ok = v.modulus.to_string() == ModulusSpec{{n, 2}, {2 * n, 1}}.to_string();
        t.add(n % 4 == 1 ? "E05 n=1 mod 4" : "E05 n=3 mod 4 (zero)", v.passed && modulus_ok, label(v));
    }
    return t.close();
}

Outcome ac7()
{
    Tally t("AC7");
    for (std::int64_t n = 3; n <= 43; n += 4) {
        const auto v = verify_theorem(Family::CONJ413, n, 0, cache());
        t.add("CONJ413", v.passed, label(v));
    }
    return t.close();
}

Outcome ac8()
{
    Tally t("AC8");
    for (auto p : odd_primes_upto(97)) {
        const auto v = verify_classical(ClassicalFamily::B2, p);
        t.add("B2", v.passed && v.prime_power == std::make_pair(p, 3), label(v));
    }
    const auto pin = classical_sides(ClassicalFamily::B2, 3);
    t.add("B2 pin p=3", *pin.lhs_rational == Rational(3, 8) && *pin.rhs_rational == -3 &&
                            *pin.lhs_rational - *pin.rhs_rational == Rational(27, 8));
    return t.close();
}

Outcome ac9()
{
    Tally t("AC9");
    const std::vector<ClassicalFamily> families{ClassicalFamily::H2,   ClassicalFamily::LR, ClassicalFamily::COR13,
                                                ClassicalFamily::SIDE, ClassicalFamily::MP, ClassicalFamily::HAMME0,
                                                ClassicalFamily::RF34};
    for (auto f : families)
        for (auto p : odd_primes_upto(97)) {
            const bool one = p % 4 == 1;
            if ((f == ClassicalFamily::MP || f == ClassicalFamily::HAMME0) && !one) continue;
            if (f == ClassicalFamily::RF34 && one) continue;
            const auto v = verify_classical(f, p);
            t.add(std::string(classical_name(f)), v.passed, label(v));
        }
    const auto h2 = classical_sides(ClassicalFamily::H2, 5);
    t.add("pins", *h2.lhs_rational == Rational(603, 512) && embed(*h2.lhs_rational, 5, 2) == embed(Rational{-6}, 5, 2));
    const auto cor = classical_sides(ClassicalFamily::COR13, 3);
    t.add("pins", *cor.lhs_rational == Rational(447, 512) && *cor.rhs_rational == Rational(3, 7) && cor.precision == 2 &&
                      embed(*cor.lhs_rational, 3, 2) == embed(*cor.rhs_rational, 3, 2));
    return t.close();
}

Outcome ac10()
{
    Tally t("AC10");
    const auto eta = eta_coefficients(2000);
    for (std::int64_t p = 3; p <= 1997; p += 2)
        if (is_prime(p)) t.add("product vs formula", eta(p) == a_p_formula(p), "p=" + std::to_string(p));
    t.add("product vs formula", eta(2) == 0, "p=2");
    t.add("pins", eta(1) == 1 && eta(5) == -6 && eta(9) == 9 && eta(13) == 10);
    for (auto p : odd_primes_upto(97)) {
        if (p % 4 != 1) continue;
        const auto v = verify_modform(p, eta);
        t.add("MODFORM p=1 mod 4", v.passed, label(v));
    }
    return t.close();
}

Outcome ac11()
{
    Tally t("AC11");
    const auto origin = verify_series_identity(OriginIdentity{}, 200);
    t.add("ORIGIN", origin.passed, label(origin));
    for (std::int64_t l : {0, 1, 2})
        for (int b : {2, 3})
            for (int c : {3, 5}) {
                const auto v = verify_series_identity(QDixonIdentity{l, Rational{b}, Rational{c}}, 100);
                t.add("QDIXON", v.passed, "b=" + std::to_string(b) + " c=" + std::to_string(c) + " " + label(v));
            }
    for (int a : {2, 3, 5}) {
        const auto v = verify_series_identity(WatsonIdentity{Rational{a}}, 100);
        t.add("WATSON", v.passed, "a=" + std::to_string(a) + " " + label(v));
    }
    return t.close();
}

Outcome ac12()
{
    Tally t("AC12");
    auto both = [&](const std::string& name, Family f, std::int64_t n, std::int64_t l) {
        const std::string where = name + " n=" + std::to_string(n) + " ell=" + std::to_string(l);
        t.add(name + " lhs", check_self_reciprocal(theorem_lhs(f, n, l)), where);
        t.add(name + " rhs", check_self_reciprocal(rhs_closed_form(f, n, l)), where);
    };
    for (auto n : odd_range(1, 21)) both("T1", Family::T1, n, 0);
    for (auto n : odd_range(1, 11))
        for (std::int64_t l = 0; l <= (n - 1) / 2; ++l) both("T3", Family::T3, n, l);
    for (auto n : odd_range(3, 21)) both("MODPHI", Family::MODPHI, n, 0);
    for (auto n : odd_range(3, 21)) both("E05", Family::E05, n, 0);
    return t.close();
}

Outcome ac13()
{
    Tally t("AC13");
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> len(0, 6), ex(-5, 8), num(-9, 9), den(1, 5);
    auto random_poly = [&] {
        std::vector<Term> terms;
        for (int i = len(rng); i > 0; --i) terms.push_back({ex(rng), make_rational(num(rng), den(rng))});
        return LaurentPoly::from_terms(std::move(terms));
    };
    for (int trial = 0; trial < 200; ++trial) {
        const LaurentPoly a = random_poly(), b = random_poly(), c = random_poly();
        t.add("ring axioms", a * b == b * a && (a * b) * c == a * (b * c) && a * (b + c) == a * b + a * c);
    }
    for (std::int64_t n = 1; n <= 60; ++n) {
        LaurentPoly prod{1};
        for (auto d : divisors(n)) prod *= cyclotomic(d, cache());
        t.add("prod Phi_d = q^n - 1", prod == LaurentPoly::q_power(n) - LaurentPoly{1}, "n=" + std::to_string(n));
    }
    for (auto n : odd_range(3, 45)) {
        const LaurentPoly& p = cyclotomic(n, cache());
        t.add("Phi_n(q) Phi_n(-q) = Phi_n(q^2)",
              p * poly_substitute(p, Substitution::negate()) == poly_substitute(p, Substitution::power(2)),
              "n=" + std::to_string(n));
    }
    for (auto n : odd_range(3, 25)) {
        const std::int64_t m = (n - 1) / 2;
        for (std::int64_t l = 0; l <= m; ++l)
            for (std::int64_t k = m + l + 1; k <= n - 1; ++k) {
                RatFun ratio(qpoch(Rational{1}, 2 - 4 * l, 4, k));
                for (auto a : qpoch_atoms(4, 4, k)) ratio.div_binomial(Rational{1}, a);
                const auto v = check_congruence(ratio, RatFun{}, ModulusSpec{{n, 1}, {2 * n, 1}}, cache());
                t.add("truncation divisibility", v.passed,
                      "n=" + std::to_string(n) + " ell=" + std::to_string(l) + " k=" + std::to_string(k));
            }
    }
    for (auto p : odd_primes_upto(97)) {
        if (p % 4 != 1) continue;
        for (int k = 1; k <= 3; ++k) {
            const PadicInt g = gamma_p(Rational{1, 2}, static_cast<std::uint64_t>(p), k);
            t.add("Gamma_p(1/2)^2 = -1", g * g == -PadicInt(static_cast<std::uint64_t>(p), k, 1),
                  "p=" + std::to_string(p) + " k=" + std::to_string(k));
        }
    }
    return t.close();
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria{
        {"AC1", "T1 sweep n<=45", 300, ac1},
        {"AC2", "T2 sweep 3<=n<=45", 300, ac2},
        {"AC3", "T3 sweep n<=25, all ell, both truncations", 600, ac3},
        {"AC4", "parametric family n<=13, ell<=2", 600, ac4},
        {"AC5", "lemma on Phi_n, n<=25", std::nullopt, ac5},
        {"AC6", "E05 sweep 3<=n<=45", std::nullopt, ac6},
        {"AC7", "CONJ413, n=3 mod 4, n<=43", std::nullopt, ac7},
        {"AC8", "B2 mod p^3, p<=97", std::nullopt, ac8},
        {"AC9", "H2 LR COR13 SIDE MP HAMME0 RF34, p<=97", std::nullopt, ac9},
        {"AC10", "modular form coefficients", 120, ac10},
        {"AC11", "series identities", 300, ac11},
        {"AC12", "self-reciprocality", std::nullopt, ac12},
        {"AC13", "property suites", std::nullopt, ac13},
    };
    std::vector<std::string> selected(argv + 1, argv + argc);
    int failures = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.summary = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = !c.limit_seconds || secs <= *c.limit_seconds;
        const bool ok = o.passed && in_time;
        failures += !ok;
        std::ostringstream line;
        line << c.id << " " << (ok ? "PASS" : "FAIL") << "  " << c.title << "  " << o.summary << "  ";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.1fs", secs);
        line << buf;
        if (c.limit_seconds) line << " (limit " << *c.limit_seconds << "s" << (in_time ? "" : ", EXCEEDED") << ")";
        std::cout << line.str() << std::endl;
    }
    if (ran == 0) {
        std::cerr << "no criterion matches the arguments\n";
        return 2;
    }
    std::cout << "acceptance: " << (ran - failures) << "/" << ran << " criteria pass" << std::endl;
    return failures == 0 ? 0 : 1;
}
