#include <CLI11.hpp>

#include "defexp/series.hpp"
#include "defexp/suites.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace defexp;

long hard_cap_from_env() {
    if (const char* cap = std::getenv("DEFEXP_PRECISION_CAP")) {
        long v = 0;
        try {
            v = std::stol(cap);
        } catch (const std::exception&) {
            throw domain_error("DEFEXP_PRECISION_CAP is not a positive integer");
        }
        if (v <= 0) throw domain_error("DEFEXP_PRECISION_CAP must be positive");
        return v;
    }
    return kDefaultHardCapBits;
}

struct CommonOpts {
    std::string q = "0.5";
    long digits = 50;
    std::string format = "table";
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--q", c.q, "deformation parameter, a decimal literal in (0,1)");
    sub->add_option("--digits", c.digits, "target decimal digits")->check(CLI::PositiveNumber);
    sub->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"table", "csv", "json"}));
}

void print_series_value(const SeriesValue& sv, const CommonOpts& c) {
    const OutputFormat f = format_from_name(c.format);
    if (f == OutputFormat::json) {
        std::cout << "{\n  \"value\": \"" << format_justified(sv.result, c.digits)
                  << "\",\n  \"abs_err\": \"" << sv.result.abs_err.decimal(3)
                  << "\",\n  \"terms_used\": " << sv.terms_used
                  << ",\n  \"cancellation_bits\": " << sv.cancellation_bits
                  << ",\n  \"working_bits\": " << sv.working_bits_used << "\n}\n";
    } else if (f == OutputFormat::csv) {
        std::cout << "value,abs_err,terms_used,cancellation_bits,working_bits\n"
                  << format_justified(sv.result, c.digits) << ","
                  << sv.result.abs_err.decimal(3) << "," << sv.terms_used << ","
                  << sv.cancellation_bits << "," << sv.working_bits_used << "\n";
    } else {
        std::cout << "value              = " << format_justified(sv.result, c.digits) << "\n"
                  << "abs_err            <= " << sv.result.abs_err.decimal(3) << "\n"
                  << "terms_used         = " << sv.terms_used << "\n"
                  << "cancellation_bits  = " << sv.cancellation_bits << "\n"
                  << "working_bits       = " << sv.working_bits_used << "\n";
    }
}

int cmd_eval(const CommonOpts& c, const std::string& x_str) {
    PrecisionContext ctx = make_context(c.digits, kDefaultGuardBits, hard_cap_from_env());
    Params params(c.q, ctx.working_bits);
    Real x(ctx.working_bits);
    try {
        x = Real::from_decimal(x_str, ctx.working_bits);
    } catch (const parse_error&) {
        throw domain_error("--x must be a decimal literal, got '" + x_str + "'");
    }
    SeriesValue sv = eval_f(x, params, ctx);
    print_series_value(sv, c);
    return 0;
}

int cmd_gq(const CommonOpts& c) {
    PrecisionContext ctx = make_context(c.digits, kDefaultGuardBits, hard_cap_from_env());
    Params params(c.q, ctx.working_bits);
    const Real tol = Real::two_pow(ctx.target_abs_exp);
    ErrorBoundedValue gs = g_series(params, tol, ctx);
    ErrorBoundedValue gl = g_lambert(params, tol, ctx);
    Real diff = abs(sub(gs.value, gl.value, ctx.working_bits));
    Real bound = add(gs.abs_err, gl.abs_err, kBoundPrec, MPFR_RNDU);
    const bool ok = ebv_consistent(gs, gl);

    const OutputFormat f = format_from_name(c.format);
    if (f == OutputFormat::json) {
        std::cout << "{\n  \"g_series\": \"" << format_justified(gs, c.digits)
                  << "\",\n  \"g_lambert\": \"" << format_justified(gl, c.digits)
                  << "\",\n  \"diff\": \"" << diff.decimal(3) << "\",\n  \"bound\": \""
                  << bound.decimal(3) << "\",\n  \"agree\": " << (ok ? "true" : "false")
                  << "\n}\n";
    } else if (f == OutputFormat::csv) {
        std::cout << "g_series,g_lambert,diff,bound,agree\n"
                  << format_justified(gs, c.digits) << "," << format_justified(gl, c.digits)
                  << "," << diff.decimal(3) << "," << bound.decimal(3) << ","
                  << (ok ? "true" : "false") << "\n";
    } else {
        std::cout << "g_series  = " << format_justified(gs, c.digits) << "\n"
                  << "g_lambert = " << format_justified(gl, c.digits) << "\n"
                  << "diff      = " << diff.decimal(3) << " (bound " << bound.decimal(3)
                  << ")\n";
    }
    return ok ? 0 : 1;
}

int cmd_zeros(const CommonOpts& c, long n_max, long tol_bits, const std::string& cache) {
    VerifyOptions opt;
    opt.q_decimal = c.q;
    opt.digits = c.digits;
    opt.n_max = n_max;
    opt.tol_bits = tol_bits;
    opt.hard_cap = hard_cap_from_env();
    if (!cache.empty()) opt.cache_path = cache;
    SuiteEngine eng(opt);
    const std::vector<ZeroRecord>& recs = eng.zeros(n_max);

    const OutputFormat f = format_from_name(c.format);
    if (f == OutputFormat::json) {
        std::cout << "[\n";
        for (size_t i = 0; i < recs.size(); ++i) {
            const ZeroRecord& r = recs[i];
            std::cout << "  {\"n\": " << r.n << ", \"x\": \"" << format_justified(r.x, c.digits)
                      << "\", \"residual\": \"" << r.residual.value.decimal(3)
                      << "\", \"bracket_source\": \""
                      << (r.source == BracketSource::theorem_interval ? "theorem-interval"
                                                                      : "scan")
                      << "\", \"newton_iters\": " << r.newton_iters << "}"
                      << (i + 1 < recs.size() ? ",\n" : "\n");
        }
        std::cout << "]\n";
    } else if (f == OutputFormat::csv) {
        std::cout << "n,x,residual,bracket_source,newton_iters\n";
        for (const ZeroRecord& r : recs) {
            std::cout << r.n << "," << format_justified(r.x, c.digits) << ","
                      << r.residual.value.decimal(3) << ","
                      << (r.source == BracketSource::theorem_interval ? "theorem-interval"
                                                                      : "scan")
                      << "," << r.newton_iters << "\n";
        }
    } else {
        for (const ZeroRecord& r : recs) {
            std::cout << "x_" << r.n << " = " << format_justified(r.x, c.digits)
                      << "   residual <= " << r.residual.value.decimal(3) << "   bracket "
                      << (r.source == BracketSource::theorem_interval ? "theorem-interval"
                                                                      : "scan")
                      << "   newton_iters " << r.newton_iters << "\n";
        }
    }
    return 0;
}

int cmd_verify(const CommonOpts& c, const std::string& suite, long n_max, long tol_bits,
               const std::string& cache) {
    VerifyOptions opt;
    opt.q_decimal = c.q;
    opt.digits = c.digits;
    opt.n_max = n_max;
    opt.tol_bits = tol_bits;
    opt.hard_cap = hard_cap_from_env();
    if (!cache.empty()) opt.cache_path = cache;
    SuiteEngine eng(opt);

    std::vector<VerificationReport> reports;
    if (suite == "all") {
        reports = eng.run_all();
    } else {
        reports.push_back(eng.run(suite));
    }

    const OutputFormat f = format_from_name(c.format);
    long fails = 0, inconclusive = 0;
    bool first = true;
    for (const VerificationReport& rep : reports) {
        if (f == OutputFormat::csv && !first) std::cout << "\n";   // block per suite
        first = false;
        switch (f) {
            case OutputFormat::table: print_table(std::cout, rep); break;
            case OutputFormat::csv: print_csv(std::cout, rep); break;
            case OutputFormat::json: print_json(std::cout, rep); break;
        }
        fails += rep.count(Verdict::fail);
        inconclusive += rep.count(Verdict::inconclusive);
    }
    if (f == OutputFormat::table && reports.size() > 1) {
        std::cout << "overall: " << fails << " fail, " << inconclusive << " inconclusive\n";
    }
    return fails == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deformed exponential function f(x) = sum x^n/n! q^{n(n-1)/2}: "
                 "evaluation, zeros, identity verification"};
    app.require_subcommand(1);

    CommonOpts ce, cz, cg, cv;
    std::string x_str = "0";
    std::string cache_z, cache_v;
    std::string suite;
    long n_max_z = 30, n_max_v = 30;
    long tol_bits_z = defexp::kDefaultTolBits, tol_bits_v = defexp::kDefaultTolBits;

    CLI::App* eval = app.add_subcommand("eval", "evaluate f(x) with an error bound");
    add_common(eval, ce);
    eval->add_option("--x", x_str, "evaluation point (decimal literal)")->required();

    CLI::App* zeros = app.add_subcommand("zeros", "enumerate negative real zeros");
    add_common(zeros, cz);
    zeros->add_option("--n-max", n_max_z, "number of zeros")->check(CLI::PositiveNumber);
    zeros->add_option("--tol-bits", tol_bits_z, "relative bits per zero");
    zeros->add_option("--cache", cache_z, "zero cache file (created or reused)");

    CLI::App* gq = app.add_subcommand("gq", "sum-of-divisors generating function, both routes");
    add_common(gq, cg);

    CLI::App* verify = app.add_subcommand("verify", "run verification suites");
    add_common(verify, cv);
    {
        std::vector<std::string> names = defexp::SuiteEngine::suite_names();
        names.push_back("all");
        verify->add_option("suite", suite, "suite to run")
            ->required()
            ->check(CLI::IsMember(names));
    }
    verify->add_option("--n-max", n_max_v, "zeros to enumerate")->check(CLI::PositiveNumber);
    verify->add_option("--tol-bits", tol_bits_v, "relative bits per zero");
    verify->add_option("--cache", cache_v, "zero cache file (created or reused)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (eval->parsed()) return cmd_eval(ce, x_str);
        if (zeros->parsed()) return cmd_zeros(cz, n_max_z, tol_bits_z, cache_z);
        if (gq->parsed()) return cmd_gq(cg);
        if (verify->parsed()) return cmd_verify(cv, suite, n_max_v, tol_bits_v, cache_v);
    } catch (const defexp::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const defexp::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        // computational failures: enumeration, refinement, integrity, cache, file parsing
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
