#include "defexp/analysis.hpp"

#include "defexp/series.hpp"

#include <cmath>
#include <string>

namespace defexp {

namespace {

// Working precision for zero-derived tables: the zeros carry ~tol_bits+96
// bits; 64 more absorb the alpha powers.
mpfr_prec_t table_prec(const std::vector<ZeroRecord>& zeros, const PrecisionContext& ctx) {
    mpfr_prec_t p = ctx.working_bits;
    if (!zeros.empty()) p = std::max(p, zeros.front().x.value.prec());
    return p + 64;
}

Real theta_of(const ZeroRecord& r, const Params& params, mpfr_prec_t wp) {
    Real apow = pow_si(params.alpha(), r.n - 1, wp);
    return sub(neg(div(r.x.value, apow, wp)), Real::from_long(r.n, wp), wp);
}

std::optional<Real> defect_of(const ZeroRecord& r, const ZeroRecord& next, const Params& params,
                              mpfr_prec_t wp) {
    Real ax = mul(params.alpha(), r.x.value, wp);
    Real ratio = div(next.x.value, ax, wp);
    Real excess = sub(sub(ratio, Real::from_long(1, wp), wp),
                      ui_div(1, Real::from_long(r.n, wp), wp), wp);
    return mul(Real::from_long(r.n * r.n, wp), excess, wp);
}

} // namespace

AsymptoticTable asymptotic_table(const std::vector<ZeroRecord>& zeros, const Params& params,
                                 const PrecisionContext& ctx) {
    if (zeros.size() < 3) throw domain_error("asymptotic_table requires at least 3 zeros");
    const mpfr_prec_t wp = table_prec(zeros, ctx);
    const Params pw = params.at(wp);

    AsymptoticTable table;
    table.g_ref = g_series(params, Real::two_pow(ctx.target_abs_exp), ctx);
    table.rows.reserve(zeros.size());
    for (size_t i = 0; i < zeros.size(); ++i) {
        const ZeroRecord& r = zeros[i];
        AsymptoticRow row;
        row.n = r.n;
        row.x_n = r.x.value;
        row.theta_n = theta_of(r, pw, wp);
        row.s_n = mul(Real::from_long(r.n, wp), row.theta_n, wp);
        row.d_n = abs(sub(row.s_n, table.g_ref.value, wp));
        if (i + 1 < zeros.size()) {
            row.ratio_defect = defect_of(r, zeros[i + 1], pw, wp);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<Real> ratio_table(const std::vector<ZeroRecord>& zeros, const Params& params,
                              const PrecisionContext& ctx) {
    if (zeros.size() < 3) throw domain_error("ratio_table requires at least 3 zeros");
    const mpfr_prec_t wp = table_prec(zeros, ctx);
    const Params pw = params.at(wp);
    std::vector<Real> defects;
    defects.reserve(zeros.size() - 1);
    for (size_t i = 0; i + 1 < zeros.size(); ++i) {
        defects.push_back(*defect_of(zeros[i], zeros[i + 1], pw, wp));
    }
    return defects;
}

std::vector<AmplitudeRow> amplitude_table(const std::vector<ZeroRecord>& zeros,
                                          const Params& params, const PrecisionContext& ctx) {
    const mpfr_prec_t wp = table_prec(zeros, ctx);
    const Params pw = params.at(wp);
    std::vector<AmplitudeRow> rows;
    rows.reserve(zeros.size());
    for (const ZeroRecord& r : zeros) {
        AmplitudeRow row;
        row.n = r.n;
        Real arg = div(r.x.value, pw.q(), wp);
        try {
            SeriesValue sv = eval_f(arg, params, ctx);
            row.a_n = ebv_abs(sv.result);
            row.extremum_sign = sv.result.value.sign();
            const int want = (r.n % 2 == 0) ? 1 : -1;
            Real margin = mul_ui(sv.result.abs_err, 4, kBoundPrec, MPFR_RNDU);
            row.sign_ok = (row.extremum_sign == want) && abs(sv.result.value) > margin;
            // C_n = A_n n^{3/2} e^{-n} q^{n(n+1)/2}
            Real n_real = Real::from_long(r.n, wp);
            Real scale = mul(n_real, sqrt(n_real, wp), wp);
            scale = mul(scale, exp(Real::from_long(-r.n, wp), wp), wp);
            scale = mul(scale, pow_si(pw.q(), r.n * (r.n + 1) / 2, wp), wp);
            row.c_n = mul(row.a_n.value, scale, wp);
        } catch (const config_error&) {
            row.skipped = true;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

SignLemmaResult sign_lemma_check(long n, const Real& lambda, const Params& params,
                                 const PrecisionContext& ctx) {
    if (n < 1) throw domain_error("sign_lemma_check requires n >= 1");
    SignLemmaResult res;
    res.n = n;
    res.lambda = lambda;

    const Real tol = Real::two_pow(ctx.target_abs_exp - 2);
    ErrorBoundedValue h = h_series(params, tol, ctx);
    ErrorBoundedValue H = H_series(params, tol, ctx);
    ErrorBoundedValue d = ebv_sub(ebv_mul(ebv_exact(lambda), h, ctx.working_bits), H,
                                  ctx.working_bits);
    Real margin = mul_ui(d.abs_err, 4, kBoundPrec, MPFR_RNDU);
    if (!(abs(d.value) > margin)) {
        return res;   // lemma hypothesis lambda h - H != 0 not established
    }

    const mpfr_prec_t wp = std::max<mpfr_prec_t>(ctx.working_bits, 192);
    const Params pw = params.at(wp);
    Real center = add(Real::from_long(n, wp),
                      div_ui(lambda, static_cast<unsigned long>(n), wp), wp);
    Real xi = neg(mul(center, pow_si(pw.alpha(), n - 1, wp), wp));
    SeriesValue sv = eval_f(xi, params, ctx);
    Real fmargin = mul_ui(sv.result.abs_err, 4, kBoundPrec, MPFR_RNDU);
    if (!(abs(sv.result.value) > fmargin)) {
        return res;   // f value not decisive at this precision
    }

    res.conclusive = true;
    res.sign_observed = sv.result.value.sign();
    res.sign_predicted = (n % 2 == 0 ? 1 : -1) * d.value.sign();
    res.agree = res.sign_observed == res.sign_predicted;
    return res;
}

namespace {

// Upper bound on sum_{n>N} 1/|x_n|. Primary route: theta_n >= 0 on the
// computed range extends |x_n| >= n alpha^{n-1} to the tail; fallback is the
// interlacing bound |x_{N+j}| > |x_N| alpha^j.
Real inverse_zero_tail_up(const std::vector<ZeroRecord>& zeros, const Params& params,
                          mpfr_prec_t wp) {
    const long N = static_cast<long>(zeros.size());
    const Params::Enclosure ab = params.alpha_bounds(wp);
    bool theta_nonneg = true;
    for (const ZeroRecord& r : zeros) {
        if (theta_of(r, params.at(wp), wp).sign() < 0) {
            theta_nonneg = false;
            break;
        }
    }
    Real one = Real::from_long(1, kBoundPrec);
    Real inv_alpha_up = ui_div(1, ab.lo, kBoundPrec, MPFR_RNDU);
    Real geom_den = sub(one, inv_alpha_up, kBoundPrec, MPFR_RNDD);   // 1 - 1/alpha
    if (theta_nonneg) {
        // sum_{n>N} alpha^{1-n}/n <= alpha^{-N} / ((N+1)(1 - 1/alpha))
        Real apow_up = pow_si(ab.lo, -N, kBoundPrec, MPFR_RNDU);
        return div(div_ui(apow_up, static_cast<unsigned long>(N + 1), kBoundPrec, MPFR_RNDU),
                   geom_den, kBoundPrec, MPFR_RNDU);
    }
    const ZeroRecord& last = zeros.back();
    Real xN_low = sub(abs(last.x.value), last.x.abs_err, kBoundPrec, MPFR_RNDD);
    Real am1 = sub(ab.lo, Real::from_long(1, kBoundPrec), kBoundPrec, MPFR_RNDD);
    return ui_div(1, mul(xN_low, am1, kBoundPrec, MPFR_RNDD), kBoundPrec, MPFR_RNDU);
}

long tail_shrink_steps(const Real& tail_up, const Real& goal, const Params& params) {
    // tail decays at least like alpha^{-j}; steps to push it under goal
    double t = tail_up.to_double();
    double g = goal.to_double();
    double la = std::log(params.alpha().to_double());
    if (!(t > g) || la <= 0) return 0;
    return static_cast<long>(std::ceil(std::log(t / g) / la)) + 1;
}

} // namespace

ErrorBoundedValue product_eval(const Real& x, const std::vector<ZeroRecord>& zeros,
                               const Params& params, const PrecisionContext& ctx,
                               const Real& tail_tol) {
    if (tail_tol.sign() <= 0) throw domain_error("product_eval requires tail_tol > 0");
    if (zeros.empty()) throw domain_error("product_eval requires at least one zero");
    const mpfr_prec_t wp = table_prec(zeros, ctx);
    if (x.is_zero()) return ebv_exact(Real::from_long(1, wp));

    const long N = static_cast<long>(zeros.size());
    const Params::Enclosure ab = params.alpha_bounds(kBoundPrec);
    Real coarse = div_ui(mul(abs(x), pow_si(ab.lo, 1 - N, kBoundPrec, MPFR_RNDU),
                             kBoundPrec, MPFR_RNDU),
                         static_cast<unsigned long>(N), kBoundPrec, MPFR_RNDU);
    if (!(coarse < tail_tol)) {
        const long need = N + tail_shrink_steps(coarse, tail_tol, params);
        throw domain_error("product_eval: " + std::to_string(N) +
                           " zeros are not enough for the requested tail tolerance; need about " +
                           std::to_string(need));
    }

    ErrorBoundedValue prod = ebv_exact(Real::from_long(1, wp));
    const ErrorBoundedValue x_exact = ebv_exact(x);
    for (const ZeroRecord& r : zeros) {
        ErrorBoundedValue factor =
            ebv_sub(ebv_exact(Real::from_long(1, 8)), ebv_div(x_exact, r.x, wp), wp);
        prod = ebv_mul(prod, factor, wp);
    }

    // omitted factors: R = prod_{n>N} (1 - x/x_n), |log R| <= 2 |x| sum 1/|x_n|
    Real tail_sum = inverse_zero_tail_up(zeros, params, wp);
    Real t_up = mul(abs(x), tail_sum, kBoundPrec, MPFR_RNDU);
    // the log bound needs |x/x_n| <= 1/2 for n > N
    const ZeroRecord& last = zeros.back();
    Real xN_low = sub(abs(last.x.value), last.x.abs_err, kBoundPrec, MPFR_RNDD);
    Real y_up = div(abs(x), mul(xN_low, ab.lo, kBoundPrec, MPFR_RNDD), kBoundPrec, MPFR_RNDU);
    if (!(y_up <= Real::from_decimal("0.5", 8)) || !(t_up <= Real::from_decimal("0.25", 8))) {
        const long need = N + tail_shrink_steps(y_up, Real::from_decimal("0.25", 8), params);
        throw domain_error("product_eval: tail factors too large with " + std::to_string(N) +
                           " zeros; need about " + std::to_string(need));
    }
    // |R - 1| <= 2t e^{2t} <= 4t for t <= 1/4
    Real dev = mul_2si(t_up, 2);
    Real extra = add(mul(prod.abs_err, dev, kBoundPrec, MPFR_RNDU),
                     mul(abs(prod.value), dev, kBoundPrec, MPFR_RNDU), kBoundPrec, MPFR_RNDU);
    prod.abs_err = add(prod.abs_err, extra, kBoundPrec, MPFR_RNDU);
    return prod;
}

SymmetricSumResult symmetric_sum_check(const std::vector<ZeroRecord>& zeros, int order,
                                       const Params& params, const Real& decisive_tol) {
    if (order != 1 && order != 2) throw domain_error("symmetric_sum_check order must be 1 or 2");
    if (zeros.size() < static_cast<size_t>(order)) {
        throw domain_error("symmetric_sum_check needs at least `order` zeros");
    }
    if (decisive_tol.sign() <= 0) throw domain_error("decisive_tol must be > 0");
    const mpfr_prec_t wp = std::max<mpfr_prec_t>(zeros.front().x.value.prec(), 192);
    const long N = static_cast<long>(zeros.size());

    ErrorBoundedValue s = ebv_exact(Real(wp));        // sum 1/x_n
    ErrorBoundedValue s2 = ebv_exact(Real(wp));       // sum 1/x_n^2
    const ErrorBoundedValue one = ebv_exact(Real::from_long(1, 8));
    for (const ZeroRecord& r : zeros) {
        ErrorBoundedValue inv = ebv_div(one, r.x, wp);
        s = ebv_add(s, inv, wp);
        if (order == 2) s2 = ebv_add(s2, ebv_mul(inv, inv, wp), wp);
    }
    Real tail = inverse_zero_tail_up(zeros, params, wp);   // sum_{n>N} 1/|x_n| <= tail

    SymmetricSumResult res;
    res.order = order;
    if (order == 1) {
        // true sum = s + (negative tail in (-tail, 0))
        Real lo = sub(s.lower(), tail, wp, MPFR_RNDD);
        Real up = s.upper();
        res.lhs = ebv_from_bounds(lo, up, wp);
        res.rhs = Real::from_long(-1, 8);
    } else {
        // e2 = (S^2 - S2)/2 with S in [s_lo - tail, s_up], S2 in [s2_lo, s2_up + tail^2]
        Real s_lo = sub(s.lower(), tail, wp, MPFR_RNDD);
        Real s_up = s.upper();
        if (s_up.sign() >= 0) throw integrity_error("symmetric sum of 1/x_n must be negative");
        Real sq_lo = mul(s_up, s_up, wp, MPFR_RNDD);     // interval entirely negative
        Real sq_up = mul(s_lo, s_lo, wp, MPFR_RNDU);
        Real t2 = mul(tail, tail, kBoundPrec, MPFR_RNDU);
        Real s2_lo = s2.lower();
        Real s2_up = add(s2.upper(), t2, wp, MPFR_RNDU);
        Real lo = mul_2si(sub(sq_lo, s2_up, wp, MPFR_RNDD), -1);
        Real up = mul_2si(sub(sq_up, s2_lo, wp, MPFR_RNDU), -1);
        res.lhs = ebv_from_bounds(lo, up, wp);
        res.rhs = mul_2si(params.q(), -1);
    }

    Real width = mul_2si(res.lhs.abs_err, 1);
    res.conclusive = width <= decisive_tol;
    res.agree = ebv_contains(res.lhs, res.rhs);
    if (!res.conclusive) {
        res.required_n = N + tail_shrink_steps(width, decisive_tol, params);
    }
    return res;
}

} // namespace defexp
