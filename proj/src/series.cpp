#include "defexp/series.hpp"

#include <string>

namespace defexp {

namespace {

long ceil_log2_of(const Real& v) {
    return v.is_zero() ? 0 : v.ceil_log2();
}

} // namespace

SeriesValue eval_f(const Real& x, const Params& params, const PrecisionContext& ctx) {
    SeriesValue out;
    if (x.is_zero()) {
        out.result = ebv_exact(Real::from_long(1, ctx.working_bits));
        out.terms_used = 1;
        out.working_bits_used = ctx.working_bits;
        return out;
    }

    const Real ax = abs(x);
    const long peak_est = max_term_exponent(ax, params);
    const mpfr_prec_t wp = required_bits(peak_est, ctx);
    const Params::Enclosure qb = params.q_bounds(wp);
    const bool alternating = x.sign() < 0;

    // Directed pair accumulation: [sum_lo, sum_up] encloses the exact partial
    // sum of exact terms; magnitudes m_lo/m_up enclose |t_n|; q^n likewise.
    Real one = Real::from_long(1, wp);
    Real sum_lo = one, sum_up = one;
    Real mag_lo = one, mag_up = one;
    Real qn_lo = one, qn_up = one;   // q^n while t_n is current

    const Real half = Real::from_decimal("0.5", 8);
    const Real term_cut = Real::two_pow(ctx.target_abs_exp - 2);
    long peak = 0;   // ceil log2 of largest |t_n| seen (upper bound route)
    long n = 0;      // index of the current term t_n
    Real tail(kBoundPrec);

    for (;;) {
        // ratio for the step t_n -> t_{n+1}: x * q^n / (n+1)
        Real r_up = div_ui(mul(ax, qn_up, wp, MPFR_RNDU), static_cast<unsigned long>(n + 1),
                           wp, MPFR_RNDU);
        if (r_up < half && mag_up < term_cut) {
            // tail <= |t_{n+1}| / (1 - r) <= 2 |t_n| r
            tail = mul_2si(mul(mag_up, r_up, kBoundPrec, MPFR_RNDU), 1);
            break;
        }
        Real r_lo = div_ui(mul(ax, qn_lo, wp, MPFR_RNDD), static_cast<unsigned long>(n + 1),
                           wp, MPFR_RNDD);
        mag_up = mul(mag_up, r_up, wp, MPFR_RNDU);
        mag_lo = mul(mag_lo, r_lo, wp, MPFR_RNDD);
        qn_up = mul(qn_up, qb.up, wp, MPFR_RNDU);
        qn_lo = mul(qn_lo, qb.lo, wp, MPFR_RNDD);
        ++n;
        if (!mag_up.is_zero() && ceil_log2_of(mag_up) > peak) peak = ceil_log2_of(mag_up);
        const bool negative = alternating && (n % 2 == 1);
        if (negative) {
            sum_up = sub(sum_up, mag_lo, wp, MPFR_RNDU);
            sum_lo = sub(sum_lo, mag_up, wp, MPFR_RNDD);
        } else {
            sum_up = add(sum_up, mag_up, wp, MPFR_RNDU);
            sum_lo = add(sum_lo, mag_lo, wp, MPFR_RNDD);
        }
        if (n > 1'000'000) {
            throw config_error("eval_f: series did not reach its stopping rule");
        }
    }

    ErrorBoundedValue v = ebv_from_bounds(sum_lo, sum_up, wp);
    v.abs_err = add(v.abs_err, tail, kBoundPrec, MPFR_RNDU);

    out.terms_used = n + 1;
    out.peak_exponent = peak;
    if (alternating) {
        const bool zero_within_err = v.value.is_zero() || abs(v.value) <= v.abs_err;
        if (!zero_within_err) {
            out.cancellation_bits = std::max<long>(0, peak - v.value.floor_log2());
        }
    }
    out.result = std::move(v);
    out.working_bits_used = wp;
    return out;
}

SeriesValue eval_f_prime(const Real& x, const Params& params, const PrecisionContext& ctx) {
    // argument rounding stays below the guard-bit floor at wp + 32
    const mpfr_prec_t wp = std::max<mpfr_prec_t>(x.prec(), ctx.working_bits) + 32;
    Real qx = mul(params.at(wp).q(), x, wp);
    return eval_f(qx, params, ctx);
}

TermTable term_table(long k, const Real& lambda, const Params& params,
                     const PrecisionContext& ctx, long tail_margin) {
    if (k < 1) throw domain_error("term_table requires k >= 1");
    if (lambda.sign() < 0) throw domain_error("term_table requires lambda >= 0");
    const mpfr_prec_t wp = ctx.working_bits;
    const Params::Enclosure ab = params.alpha_bounds(wp);

    // c = k + lambda / k
    Real k_real = Real::from_long(k, wp);
    Real c_lo = add(k_real, div_ui(lambda, static_cast<unsigned long>(k), wp, MPFR_RNDD),
                    wp, MPFR_RNDD);
    Real c_up = add(k_real, div_ui(lambda, static_cast<unsigned long>(k), wp, MPFR_RNDU),
                    wp, MPFR_RNDU);

    const long n_top = 2 * k - 1 + tail_margin;
    std::vector<Real> u_lo, u_up;
    u_lo.reserve(n_top + 1);
    u_up.reserve(n_top + 1);
    u_lo.push_back(Real::from_long(1, wp));
    u_up.push_back(Real::from_long(1, wp));

    // u_{n+1} = u_n * c * alpha^{k-1-n} / (n+1); track alpha^{k-1-n} directly.
    Real ap_lo = pow_si(ab.lo, k - 1, wp, MPFR_RNDD);
    Real ap_up = pow_si(ab.up, k - 1, wp, MPFR_RNDU);
    for (long n = 0; n < n_top; ++n) {
        Real next_up = div_ui(mul(mul(u_up.back(), c_up, wp, MPFR_RNDU), ap_up, wp, MPFR_RNDU),
                              static_cast<unsigned long>(n + 1), wp, MPFR_RNDU);
        Real next_lo = div_ui(mul(mul(u_lo.back(), c_lo, wp, MPFR_RNDD), ap_lo, wp, MPFR_RNDD),
                              static_cast<unsigned long>(n + 1), wp, MPFR_RNDD);
        u_up.push_back(std::move(next_up));
        u_lo.push_back(std::move(next_lo));
        ap_up = div(ap_up, ab.lo, wp, MPFR_RNDU);
        ap_lo = div(ap_lo, ab.up, wp, MPFR_RNDD);
    }

    TermTable t;
    t.k = k;
    t.lambda = lambda;
    t.u.reserve(n_top + 1);
    for (long n = 0; n <= n_top; ++n) {
        t.u.push_back(div_ui(add(u_lo[n], u_up[n], wp), 2, wp));
    }
    t.v.reserve(k);
    for (long j = 0; j < k; ++j) {
        const long i = 2 * k - 1 - j;
        Real v_lo = sub(u_lo[i], u_up[j], wp, MPFR_RNDD);
        Real v_up = sub(u_up[i], u_lo[j], wp, MPFR_RNDU);
        t.v.push_back(ebv_from_bounds(v_lo, v_up, wp));
    }
    return t;
}

} // namespace defexp
