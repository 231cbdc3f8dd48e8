// qcong: batch verifier for the q-congruence, supercongruence and series
// identity families.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcong/cyclotomic.hpp"
#include "qcong/driver.hpp"
#include "qcong/modform.hpp"

namespace {

std::vector<qcong::Rational> parse_rationals(const std::vector<std::string>& texts)
{
    std::vector<qcong::Rational> out;
    for (const auto& t : texts) {
        auto r = qcong::parse_rational(t);
        if (r == 0) throw qcong::ConfigError("series parameters must be nonzero");
        out.push_back(r);
    }
    return out;
}

std::vector<std::string> split_families(const std::vector<std::string>& raw)
{
    std::vector<std::string> out;
    for (const auto& s : raw) {
        std::string upper;
        for (char c : s) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        out.push_back(upper);
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact verifier for cyclotomic q-congruences and p-adic supercongruences"};
    app.require_subcommand(1);

    // verify
    auto* verify = app.add_subcommand("verify", "check congruence families over instance ranges");
    std::vector<std::string> families;
    std::string n_text, p_text, ell_text = "all", output = "table", out_path, t3_text = "both";
    std::int64_t samples = 0;
    unsigned jobs = 0;
    verify->add_option("--family,-f", families,
                       "T1 T2 T3 E05 CONJ413 MODPHI PARAM L21 B2 H2 LR COR13 SIDE MP HAMME0 RF34 MODFORM")
        ->required()
        ->delimiter(',');
    verify->add_option("--n", n_text, "odd n range, a..b or a (default 1..45)");
    verify->add_option("--p", p_text, "prime range, a..b or a (default 3..97)");
    verify->add_option("--ell", ell_text, "'all' or a comma list of ell values");
    verify->add_option("--samples", samples, "rational samples for PARAM/L21 (default: the minimum needed)");
    verify->add_option("--output", output, "table or jsonl")->check(CLI::IsMember({"table", "jsonl"}));
    verify->add_option("--jobs,-j", jobs, "worker threads (default: available cores)");
    verify->add_option("--out", out_path, "write the report to this file");
    verify->add_option("--t3-range", t3_text, "T3 truncation: full, half or both")
        ->check(CLI::IsMember({"full", "half", "both"}));

    // series
    auto* series = app.add_subcommand("series", "compare both sides of an infinite series identity");
    std::vector<std::string> ids;
    std::int64_t order = 100;
    std::vector<std::int64_t> series_ell{0, 1, 2};
    std::vector<std::string> b_text{"2", "3"}, c_text{"3", "5"}, a_text{"2", "3", "5"};
    std::string series_output = "table";
    series->add_option("--id", ids, "ORIGIN, QDIXON or WATSON")->required()->delimiter(',');
    series->add_option("--order", order, "compare coefficients through q^order");
    series->add_option("--ell", series_ell, "QDIXON ell values")->delimiter(',');
    series->add_option("--b", b_text, "QDIXON b values")->delimiter(',');
    series->add_option("--c", c_text, "QDIXON c values")->delimiter(',');
    series->add_option("--a", a_text, "WATSON a values")->delimiter(',');
    series->add_option("--output", series_output, "table or jsonl")->check(CLI::IsMember({"table", "jsonl"}));
    series->add_option("--jobs,-j", jobs, "worker threads");

    // cyclotomic
    auto* cyclo = app.add_subcommand("cyclotomic", "print the n-th cyclotomic polynomial");
    std::int64_t cyclo_n = 0;
    cyclo->add_option("n", cyclo_n, "index")->required();

    // expand-eta
    auto* eta = app.add_subcommand("expand-eta", "print coefficients of q prod (1-q^{4j})^6");
    std::int64_t eta_order = 0;
    eta->add_option("--order", eta_order, "last exponent")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cyclo) {
            qcong::CyclotomicCache cache;
            std::cout << qcong::cyclotomic(cyclo_n, cache).to_string() << '\n';
            return 0;
        }
        if (*eta) {
            const auto coeffs = qcong::eta_coefficients(eta_order);
            for (std::int64_t n = 1; n <= eta_order; n += 4) std::cout << n << ' ' << coeffs(n) << '\n';
            return 0;
        }

        qcong::RunConfig cfg;
        cfg.jobs = jobs;
        if (*verify) {
            cfg.families = split_families(families);
            if (!n_text.empty()) cfg.n_range = qcong::parse_range(n_text);
            if (!p_text.empty()) cfg.p_range = qcong::parse_range(p_text);
            if (ell_text != "all") {
                std::vector<std::int64_t> ells;
                for (const auto& piece : CLI::detail::split(ell_text, ',')) {
                    const auto r = qcong::parse_range(piece);
                    for (auto l = r.lo; l <= r.hi; ++l) ells.push_back(l);
                }
                cfg.ell_list = ells;
            }
            cfg.sample_count = samples;
            cfg.output = output == "jsonl" ? qcong::OutputFormat::jsonl : qcong::OutputFormat::table;
            cfg.t3_ranges = t3_text == "full"   ? qcong::T3Ranges::full
                            : t3_text == "half" ? qcong::T3Ranges::half
                                                : qcong::T3Ranges::both;
        } else {
            cfg.families = split_families(ids);
            for (const auto& f : cfg.families)
                if (f != "ORIGIN" && f != "QDIXON" && f != "WATSON")
                    throw qcong::ConfigError("unknown series identity '" + f + "'");
            cfg.series_order = order;
            cfg.ell_list = series_ell;
            cfg.b_values = parse_rationals(b_text);
            cfg.c_values = parse_rationals(c_text);
            cfg.a_values = parse_rationals(a_text);
            cfg.output = series_output == "jsonl" ? qcong::OutputFormat::jsonl : qcong::OutputFormat::table;
        }

        std::ofstream file;
        if (!out_path.empty()) {
            file.open(out_path);
            if (!file) throw qcong::ConfigError("cannot open " + out_path);
        }
        std::ostream& report = out_path.empty() ? std::cout : file;
        // keep stdout pure JSON lines; the summary goes to stderr then
        std::ostream& summary = cfg.output == qcong::OutputFormat::jsonl && out_path.empty() ? std::cerr : report;
        return qcong::run(cfg, report, summary);
    } catch (const qcong::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const qcong::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
