#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <defexp/analysis.hpp>
#include <defexp/series.hpp>
#include <defexp/suites.hpp>

#include <cmath>
#include <string>

using namespace defexp;

namespace {

const std::vector<ZeroRecord>& zeros30_q05() {
    static PrecisionContext ctx = make_context(50);
    static Params p("0.5", ctx.working_bits);
    static std::vector<ZeroRecord> recs = enumerate_zeros(30, p, ctx);
    return recs;
}

PrecisionContext ctx50() { return make_context(50); }

} // namespace

TEST_CASE("asymptotic table: theta decay, s_n convergence, regression window") {
    PrecisionContext ctx = ctx50();
    Params p("0.5", ctx.working_bits);
    AsymptoticTable t = asymptotic_table(zeros30_q05(), p, ctx);
    REQUIRE(t.rows.size() == 30);

    // theta_n -> 0 from above (gamma = 1 in the weaker asymptotic form)
    CHECK(t.rows[29].theta_n.sign() > 0);
    CHECK(abs(t.rows[29].theta_n) < abs(t.rows[9].theta_n));

    // d_n = |s_n - g| falls from n = 10 on, and d_30 < d_8
    for (size_t i = 9; i + 1 < t.rows.size(); ++i) {
        CHECK(t.rows[i + 1].d_n < t.rows[i].d_n);
    }
    CHECK(t.rows[29].d_n < t.rows[9].d_n);
    CHECK(t.rows[29].d_n < t.rows[7].d_n);

    // s_30 within the criterion tolerance of g, plus the first-run window
    Real rel = div(t.rows[29].d_n, t.g_ref.value, 128);
    CHECK(rel < Real::from_decimal("0.15", 32));
    const double d30 = t.rows[29].d_n.to_double();
    const double base = s30_baseline("0.5");
    REQUIRE(base > 0.0);
    CHECK(d30 > 0.9 * base);
    CHECK(d30 < 1.1 * base);

    CHECK_THROWS_AS(asymptotic_table({}, p, ctx), domain_error);
}

TEST_CASE("eventual decrease of |s_n - g| holds for the other q values too") {
    PrecisionContext ctx = ctx50();
    for (const char* qs : {"0.3", "0.7"}) {
        Params p(qs, ctx.working_bits);
        auto recs = enumerate_zeros(30, p, ctx);
        AsymptoticTable t = asymptotic_table(recs, p, ctx);
        for (size_t i = 9; i + 1 < t.rows.size(); ++i) {
            CHECK(t.rows[i + 1].d_n < t.rows[i].d_n);
        }
        CHECK(t.rows.back().d_n < t.rows[7].d_n);
    }
}

TEST_CASE("ratio defects shrink and the rescaled ratio stays above 1") {
    PrecisionContext ctx = ctx50();
    Params p("0.5", ctx.working_bits);
    std::vector<Real> d = ratio_table(zeros30_q05(), p, ctx);
    REQUIRE(d.size() == 29);

    CHECK(abs(d[27]) < abs(d[7]));    // n = 28 vs n = 8
    CHECK(abs(d[9]) < abs(d[4]));     // n = 10 vs n = 5
    CHECK(abs(d[19]) < abs(d[9]));    // n = 20 vs n = 10

    const auto& zeros = zeros30_q05();
    for (size_t i = 0; i + 1 < zeros.size(); ++i) {
        Real ax = mul(p.alpha(), zeros[i].x.value, 256);
        CHECK(zeros[i + 1].x.value < ax);
    }
}

TEST_CASE("amplitude rows: alternating extremum signs, band, growth law") {
    PrecisionContext ctx = ctx50();
    Params p("0.5", ctx.working_bits);
    std::vector<AmplitudeRow> rows = amplitude_table(zeros30_q05(), p, ctx);
    REQUIRE(rows.size() == 30);

    Real c_min, c_max;
    bool started = false;
    for (const AmplitudeRow& r : rows) {
        if (r.n > 25) break;
        REQUIRE(!r.skipped);
        CHECK(r.sign_ok);
        CHECK(r.extremum_sign == (r.n % 2 == 0 ? 1 : -1));
        CHECK(r.a_n.value.sign() > 0);
        if (r.n >= 5) {
            if (!started) {
                c_min = r.c_n;
                c_max = r.c_n;
                started = true;
            } else {
                if (r.c_n < c_min) c_min = r.c_n;
                if (r.c_n > c_max) c_max = r.c_n;
            }
        }
    }
    REQUIRE(started);
    CHECK(div(c_max, c_min, 128) < Real::from_long(20, 16));

    double b_lo = 0, b_hi = 0;
    amplitude_band_baseline(b_lo, b_hi);
    REQUIRE(b_lo > 0.0);
    CHECK(c_min.to_double() > 0.9 * b_lo);
    CHECK(c_min.to_double() < 1.1 * b_lo);
    CHECK(c_max.to_double() > 0.9 * b_hi);
    CHECK(c_max.to_double() < 1.1 * b_hi);

    // log-amplitude increments follow the closed-form prediction within 10%
    for (long n = 5; n <= 24; ++n) {
        Real la = log(rows[n - 1].a_n.value, 128);
        Real lb = log(rows[n].a_n.value, 128);
        const double measured = sub(lb, la, 128).to_double();
        const double lnalpha = std::log(2.0);
        const double predicted =
            (n + 1) * lnalpha + 1.0 - 1.5 * std::log((n + 1.0) / static_cast<double>(n));
        CHECK(std::abs(measured - predicted) <= 0.10 * predicted);
    }
}

TEST_CASE("sign lemma agreement, both sides of H/h, and the inconclusive gate") {
    PrecisionContext ctx = ctx50();
    Params p("0.5", ctx.working_bits);
    ErrorBoundedValue lam0 = lambda0(p, ctx);

    SignLemmaResult above = sign_lemma_check(20, add(lam0.value, Real::from_long(1, 8), 128),
                                             p, ctx);
    CHECK(above.conclusive);
    CHECK(above.agree);

    // lambda = 0: predicted sign (-1)^{n+1} since -H < 0
    SignLemmaResult at0 = sign_lemma_check(20, Real(64), p, ctx);
    CHECK(at0.conclusive);
    CHECK(at0.sign_predicted == -1 * (20 % 2 == 0 ? 1 : -1));
    CHECK(at0.agree);

    // lambda right at H/h violates the lemma hypothesis -> inconclusive
    // (same tolerance as the checker uses internally, so the difference
    // lambda h - H collapses to rounding noise inside the error band)
    const Real tol_in = Real::two_pow(ctx.target_abs_exp - 2);
    ErrorBoundedValue ratio = ebv_div(H_series(p, tol_in, ctx), h_series(p, tol_in, ctx),
                                      ctx.working_bits);
    SignLemmaResult border = sign_lemma_check(20, ratio.value, p, ctx);
    CHECK(!border.conclusive);

    // empirical smallest n with unbroken agreement through 25 (first-run value)
    const Real lam_half = mul_2si(lam0.value, -1);
    const Real lam_double = mul_2si(lam0.value, 1);
    long threshold = 1;
    for (long n = 25; n >= 1; --n) {
        SignLemmaResult a = sign_lemma_check(n, lam_half, p, ctx);
        SignLemmaResult b = sign_lemma_check(n, lam_double, p, ctx);
        if (!(a.conclusive && a.agree && b.conclusive && b.agree)) {
            threshold = n + 1;
            break;
        }
    }
    MESSAGE("sign-lemma agreement threshold n = ", threshold);
    CHECK(threshold == 8);   // regression: observed on the first verified run
    for (long n = 15; n <= 25; ++n) {
        SignLemmaResult a = sign_lemma_check(n, lam_half, p, ctx);
        SignLemmaResult b = sign_lemma_check(n, lam_double, p, ctx);
        CHECK((a.conclusive && a.agree));
        CHECK((b.conclusive && b.agree));
    }
}

TEST_CASE("product over zeros reproduces the series evaluator") {
    PrecisionContext ctx = ctx50();
    Params p("0.5", ctx.working_bits);
    auto recs = enumerate_zeros(48, p, ctx);
    const Real tail_tol = Real::two_pow(-30);

    // x = 0: empty product
    ErrorBoundedValue at0 = product_eval(Real(64), recs, p, ctx, tail_tol);
    CHECK(at0.value == Real::from_long(1, 8));

    // x = -1 against eval_f
    ErrorBoundedValue prod = product_eval(Real::from_long(-1, 128), recs, p, ctx, tail_tol);
    SeriesValue direct = eval_f(Real::from_long(-1, ctx.working_bits), p, ctx);
    CHECK(ebv_consistent(prod, direct.result));

    // x = x_1: the n = 1 factor vanishes within its enclosure
    ErrorBoundedValue at_x1 = product_eval(recs[0].x.value, recs, p, ctx, tail_tol);
    CHECK(ebv_contains(at_x1, Real(8)));

    // insufficient zeros for a tight tail -> explicit requirement
    std::vector<ZeroRecord> few(recs.begin(), recs.begin() + 5);
    try {
        product_eval(Real::from_long(-300, 128), few, p, ctx, Real::two_pow(-60));
        FAIL("expected a domain_error about insufficient zeros");
    } catch (const domain_error& e) {
        CHECK(std::string(e.what()).find("need about") != std::string::npos);
    }
}

TEST_CASE("symmetric sums: decisive with 60 zeros, inconclusive with 5") {
    PrecisionContext ctx = ctx50();
    Params p("0.5", ctx.working_bits);
    auto recs = enumerate_zeros(60, p, ctx);
    const Real decisive = Real::from_decimal("1e-6", 64);

    SymmetricSumResult r1 = symmetric_sum_check(recs, 1, p, decisive);
    CHECK(r1.conclusive);
    CHECK(r1.agree);
    CHECK(ebv_contains(r1.lhs, Real::from_long(-1, 8)));

    SymmetricSumResult r2 = symmetric_sum_check(recs, 2, p, decisive);
    CHECK(r2.conclusive);
    CHECK(r2.agree);
    CHECK(ebv_contains(r2.lhs, Real::from_decimal("0.25", 16)));

    std::vector<ZeroRecord> few(recs.begin(), recs.begin() + 5);
    SymmetricSumResult weak = symmetric_sum_check(few, 1, p, decisive);
    CHECK(!weak.conclusive);
    CHECK(weak.required_n > 5);

    CHECK_THROWS_AS(symmetric_sum_check(recs, 3, p, decisive), domain_error);
}

TEST_CASE("analysis values recomputed at higher precision stay inside their bounds") {
    PrecisionContext a = make_context(50, 64);
    PrecisionContext b = make_context(50, 128);
    Params pa("0.5", a.working_bits);
    Params pb("0.5", b.working_bits);
    auto za = enumerate_zeros(24, pa, a);
    auto zb = enumerate_zeros(24, pb, b);
    ErrorBoundedValue va = product_eval(Real::from_long(-5, 128), za, pa, a, Real::two_pow(-20));
    ErrorBoundedValue vb = product_eval(Real::from_long(-5, 128), zb, pb, b, Real::two_pow(-20));
    Real gap = abs(sub(va.value, vb.value, 400));
    CHECK(gap <= add(va.abs_err, vb.abs_err, kBoundPrec, MPFR_RNDU));
}
