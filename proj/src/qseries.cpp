#include "defexp/qseries.hpp"

#include <cmath>
#include <string>

namespace defexp {

namespace {

constexpr long kMaxSeriesTerms = 10'000'000;

// Upper bound of sum_{k>K} k q^k = q^{K+1} ((K+1) - K q) / (1-q)^2, q in (0,1).
Real linear_tail_up(const Real& qpow_next_up, const Real& q_lo, const Real& q_up,
                    unsigned long K) {
    const mpfr_prec_t p = kBoundPrec;
    Real num = sub(Real::from_ulong(K + 1, p), mul_ui(q_lo, K, p, MPFR_RNDD), p, MPFR_RNDU);
    Real one_minus_q = sub(Real::from_long(1, p), q_up, p, MPFR_RNDD);
    Real den = mul(one_minus_q, one_minus_q, p, MPFR_RNDD);
    return div(mul(qpow_next_up, num, p, MPFR_RNDU), den, p, MPFR_RNDU);
}

} // namespace

unsigned long long sigma(unsigned long long k) {
    if (k == 0) throw domain_error("sigma(0) is undefined");
    unsigned long long s = 0;
    for (unsigned long long d = 1; d * d <= k; ++d) {
        if (k % d == 0) {
            s += d;
            const unsigned long long e = k / d;
            if (e != d) s += e;
        }
    }
    return s;
}

ErrorBoundedValue g_series(const Params& params, const Real& tol, const PrecisionContext& ctx) {
    static const char* kCap = "0.99";
    if (params.q() > Real::from_decimal(kCap, 64, MPFR_RNDU)) {
        throw domain_error("g(q) diverges as q -> 1; refusing q > " + std::string(kCap));
    }
    if (tol.sign() <= 0) throw domain_error("g_series requires tol > 0");
    const mpfr_prec_t wp = ctx.working_bits;
    const Params::Enclosure qb = params.q_bounds(wp);
    const Real half_tol = mul_2si(tol, -1);

    Real sum_lo(wp), sum_up(wp);
    Real qpow_lo = Real::from_long(1, wp), qpow_up = Real::from_long(1, wp);
    Real tail(kBoundPrec);
    for (unsigned long k = 1;; ++k) {
        qpow_lo = mul(qpow_lo, qb.lo, wp, MPFR_RNDD);
        qpow_up = mul(qpow_up, qb.up, wp, MPFR_RNDU);
        const unsigned long long s = sigma(k);
        sum_lo = add(sum_lo, mul_ui(qpow_lo, s, wp, MPFR_RNDD), wp, MPFR_RNDD);
        sum_up = add(sum_up, mul_ui(qpow_up, s, wp, MPFR_RNDU), wp, MPFR_RNDU);

        // sigma(j) <= j^2 for j > k, and
        // sum_{j>k} j^2 q^j = q^{k+1} (k^2(1-q)^2 + (2k+1) - (2k-1)q) / (1-q)^3
        Real qnext_up = mul(qpow_up, qb.up, kBoundPrec, MPFR_RNDU);
        Real a = mul(sub(Real::from_long(1, kBoundPrec), qb.lo, kBoundPrec, MPFR_RNDU),
                     sub(Real::from_long(1, kBoundPrec), qb.lo, kBoundPrec, MPFR_RNDU),
                     kBoundPrec, MPFR_RNDU);
        a = mul_ui(a, k * k, kBoundPrec, MPFR_RNDU);
        a = add(a, Real::from_ulong(2 * k + 1, kBoundPrec), kBoundPrec, MPFR_RNDU);
        a = sub(a, mul_ui(qb.lo, 2 * k - 1, kBoundPrec, MPFR_RNDD), kBoundPrec, MPFR_RNDU);
        Real omq = sub(Real::from_long(1, kBoundPrec), qb.up, kBoundPrec, MPFR_RNDD);
        Real den = mul(mul(omq, omq, kBoundPrec, MPFR_RNDD), omq, kBoundPrec, MPFR_RNDD);
        tail = div(mul(qnext_up, a, kBoundPrec, MPFR_RNDU), den, kBoundPrec, MPFR_RNDU);
        if (tail < half_tol) break;
        if (static_cast<long>(k) > kMaxSeriesTerms) {
            throw config_error("g_series: truncation bound never met");
        }
    }
    ErrorBoundedValue v = ebv_from_bounds(sum_lo, sum_up, wp);
    v.abs_err = add(v.abs_err, tail, kBoundPrec, MPFR_RNDU);
    return v;
}

ErrorBoundedValue g_lambert(const Params& params, const Real& tol, const PrecisionContext& ctx) {
    if (tol.sign() <= 0) throw domain_error("g_lambert requires tol > 0");
    const mpfr_prec_t wp = ctx.working_bits;
    const Params::Enclosure ab = params.alpha_bounds(wp);
    const Params::Enclosure qb = params.q_bounds(wp);   // 1/alpha
    const Real one = Real::from_long(1, wp);

    // stop once term < tol (1 - 1/alpha) / 4 and the closed-form tail is in
    Real term_cut = mul(mul_2si(tol, -2),
                        sub(Real::from_long(1, kBoundPrec), qb.up, kBoundPrec, MPFR_RNDD),
                        kBoundPrec, MPFR_RNDD);
    const Real two = Real::from_long(2, 8);

    Real sum_lo(wp), sum_up(wp);
    Real apow_lo = one, apow_up = one;   // alpha^k
    Real qpow_lo = Real::from_long(1, kBoundPrec), qpow_up = qpow_lo;  // alpha^{-k} bounds
    Real tail(kBoundPrec);
    for (unsigned long k = 1;; ++k) {
        apow_lo = mul(apow_lo, ab.lo, wp, MPFR_RNDD);
        apow_up = mul(apow_up, ab.up, wp, MPFR_RNDU);
        qpow_lo = mul(qpow_lo, qb.lo, kBoundPrec, MPFR_RNDD);
        qpow_up = mul(qpow_up, qb.up, kBoundPrec, MPFR_RNDU);
        Real t_up = ui_div(k, sub(apow_lo, one, wp, MPFR_RNDD), wp, MPFR_RNDU);
        Real t_lo = ui_div(k, sub(apow_up, one, wp, MPFR_RNDU), wp, MPFR_RNDD);
        sum_up = add(sum_up, t_up, wp, MPFR_RNDU);
        sum_lo = add(sum_lo, t_lo, wp, MPFR_RNDD);

        if (apow_lo >= two && t_up < term_cut) {
            // j/(alpha^j - 1) <= 2 j alpha^{-j} once alpha^j >= 2
            Real qnext_up = mul(qpow_up, qb.up, kBoundPrec, MPFR_RNDU);
            tail = mul_2si(linear_tail_up(qnext_up, qb.lo, qb.up, k), 1);
            if (tail < mul_2si(tol, -1)) break;
        }
        if (static_cast<long>(k) > kMaxSeriesTerms) {
            throw config_error("g_lambert: truncation bound never met");
        }
    }
    ErrorBoundedValue v = ebv_from_bounds(sum_lo, sum_up, wp);
    v.abs_err = add(v.abs_err, tail, kBoundPrec, MPFR_RNDU);
    return v;
}

namespace {

// Shared theta-like alternating sum: sum_j coeff(j) * s(j) * alpha^{-j(j-1)/2}
// where |coeff| is an exact integer and s the sign. Tail bound: twice the
// first omitted term once consecutive-term ratios drop below 1/2.
template <typename CoeffFn, typename SignFn>
ErrorBoundedValue theta_sum(const Params& params, const Real& tol, const PrecisionContext& ctx,
                            CoeffFn coeff, SignFn sgn, const char* what) {
    if (tol.sign() <= 0) throw domain_error(std::string(what) + " requires tol > 0");
    const mpfr_prec_t wp = ctx.working_bits;
    const Params::Enclosure qb = params.q_bounds(wp);   // 1/alpha enclosure
    const Real one = Real::from_long(1, wp);
    const Real half = Real::from_decimal("0.5", 8);
    const Real quarter_tol = mul_2si(tol, -2);

    Real sum_lo(wp), sum_up(wp);
    Real p_lo = one, p_up = one;     // alpha^{-j(j-1)/2} at current j
    Real w_lo = qb.lo, w_up = qb.up; // alpha^{-j} at current j
    Real tail(kBoundPrec);
    for (unsigned long j = 1;; ++j) {
        const unsigned long long c = coeff(j);
        Real t_lo = mul_ui(p_lo, c, wp, MPFR_RNDD);
        Real t_up = mul_ui(p_up, c, wp, MPFR_RNDU);
        if (sgn(j) > 0) {
            sum_up = add(sum_up, t_up, wp, MPFR_RNDU);
            sum_lo = add(sum_lo, t_lo, wp, MPFR_RNDD);
        } else {
            sum_up = sub(sum_up, t_lo, wp, MPFR_RNDU);
            sum_lo = sub(sum_lo, t_up, wp, MPFR_RNDD);
        }
        // next term magnitude bound and ratio a_{j+1}/a_j = c_{j+1}/c_j alpha^{-j}
        Real pnext_up = mul(p_up, w_up, kBoundPrec, MPFR_RNDU);
        Real next_up = mul_ui(pnext_up, coeff(j + 1), kBoundPrec, MPFR_RNDU);
        if (c > 0 && t_lo.sign() > 0) {
            Real ratio_up = div(next_up, t_lo, kBoundPrec, MPFR_RNDU);
            if (ratio_up < half && next_up < quarter_tol) {
                tail = mul_2si(next_up, 1);
                break;
            }
        }
        p_lo = mul(p_lo, w_lo, wp, MPFR_RNDD);
        p_up = mul(p_up, w_up, wp, MPFR_RNDU);
        w_lo = mul(w_lo, qb.lo, wp, MPFR_RNDD);
        w_up = mul(w_up, qb.up, wp, MPFR_RNDU);
        if (static_cast<long>(j) > kMaxSeriesTerms) {
            throw config_error(std::string(what) + ": truncation bound never met");
        }
    }
    ErrorBoundedValue v = ebv_from_bounds(sum_lo, sum_up, wp);
    v.abs_err = add(v.abs_err, tail, kBoundPrec, MPFR_RNDU);
    return v;
}

unsigned long long h_coeff(unsigned long j) { return 2 * j - 1; }
unsigned long long H_coeff(unsigned long j) {
    return static_cast<unsigned long long>(j) * (j - 1) * (2 * j - 1) / 6;
}

} // namespace

ErrorBoundedValue h_series(const Params& params, const Real& tol, const PrecisionContext& ctx) {
    return theta_sum(params, tol, ctx, h_coeff,
                     [](unsigned long j) { return j % 2 == 1 ? 1 : -1; }, "h_series");
}

ErrorBoundedValue H_series(const Params& params, const Real& tol, const PrecisionContext& ctx) {
    return theta_sum(params, tol, ctx, H_coeff,
                     [](unsigned long j) { return j % 2 == 0 ? 1 : -1; }, "H_series");
}

namespace {

ErrorBoundedValue alpha_power_product(const Params& params, int power_sign, int exponent,
                                      const Real& tol, const PrecisionContext& ctx,
                                      const char* what) {
    if (tol.sign() <= 0) throw domain_error(std::string(what) + " requires tol > 0");
    const mpfr_prec_t wp = ctx.working_bits;
    const Params::Enclosure qb = params.q_bounds(wp);   // 1/alpha enclosure
    const Real one = Real::from_long(1, wp);
    const Real half = Real::from_decimal("0.5", 8);
    const Real cut = min(mul_2si(tol, -3), half);

    Real prod_lo = one, prod_up = one;
    Real b_lo = qb.lo, b_up = qb.up;   // alpha^{-k}
    unsigned long k = 1;
    for (;; ++k) {
        if (b_up < cut) break;
        Real f_lo(wp), f_up(wp);
        if (power_sign > 0) {
            f_lo = add(one, b_lo, wp, MPFR_RNDD);
            f_up = add(one, b_up, wp, MPFR_RNDU);
        } else {
            f_lo = sub(one, b_up, wp, MPFR_RNDD);
            f_up = sub(one, b_lo, wp, MPFR_RNDU);
            if (f_lo.sign() <= 0) throw domain_error(std::string(what) + ": factor not positive");
        }
        for (int e = 0; e < exponent; ++e) {
            prod_lo = mul(prod_lo, f_lo, wp, MPFR_RNDD);
            prod_up = mul(prod_up, f_up, wp, MPFR_RNDU);
        }
        b_lo = mul(b_lo, qb.lo, wp, MPFR_RNDD);
        b_up = mul(b_up, qb.up, wp, MPFR_RNDU);
        if (static_cast<long>(k) > kMaxSeriesTerms) {
            throw config_error(std::string(what) + ": truncation bound never met");
        }
    }
    // remaining factors: |log prod_{j>=k} (1 +- alpha^{-j})^e| <= 2 e sum alpha^{-j}
    Real geo_up = div(b_up, sub(Real::from_long(1, kBoundPrec), qb.up, kBoundPrec, MPFR_RNDD),
                      kBoundPrec, MPFR_RNDU);
    Real eps = mul_ui(geo_up, 2 * static_cast<unsigned long>(exponent), kBoundPrec, MPFR_RNDU);
    // e^{-eps} >= 1 - eps and e^{eps} <= 1 + 2 eps for eps <= 1
    if (eps > Real::from_long(1, 8)) {
        throw config_error(std::string(what) + ": tail bound too weak");
    }
    Real lo = mul(prod_lo, sub(Real::from_long(1, kBoundPrec), eps, kBoundPrec, MPFR_RNDD),
                  wp, MPFR_RNDD);
    Real up = mul(prod_up, add(Real::from_long(1, kBoundPrec), mul_2si(eps, 1),
                               kBoundPrec, MPFR_RNDU),
                  wp, MPFR_RNDU);
    return ebv_from_bounds(lo, up, wp);
}

} // namespace

ErrorBoundedValue h_product(const Params& params, const Real& tol, const PrecisionContext& ctx) {
    return alpha_power_product(params, -1, 3, tol, ctx, "h_product");
}

ErrorBoundedValue euler_product(const Params& params, ProductSign sign, const Real& tol,
                                const PrecisionContext& ctx) {
    return alpha_power_product(params, sign == ProductSign::plus ? 1 : -1, 1, tol, ctx,
                               "euler_product");
}

ErrorBoundedValue lambda0(const Params& params, const PrecisionContext& ctx) {
    const Real tol = Real::two_pow(ctx.target_abs_exp - 2);
    ErrorBoundedValue h = h_series(params, tol, ctx);
    ErrorBoundedValue H = H_series(params, tol, ctx);
    ErrorBoundedValue r = ebv_div(H, h, ctx.working_bits);
    return ebv_add(ebv_exact(Real::from_long(1, 8)), r, ctx.working_bits);
}

PartialRatioTable partial_ratios(const Params& params, long m_max, const PrecisionContext& ctx) {
    if (m_max < 2) throw domain_error("partial_ratios requires m_max >= 2");
    // the chain gaps shrink like alpha^{-m(2m-1)}; raise precision to keep
    // every comparison decisive through j = m_max
    const double la = log2(params.alpha(), 64).to_double();
    const long extra = static_cast<long>(std::ceil(
        0.5 * static_cast<double>(m_max + 2) * static_cast<double>(m_max + 1) * la));
    long wanted = ctx.working_bits + extra + 64;
    if (wanted > ctx.hard_cap) {
        throw config_error("partial_ratios: required precision exceeds the hard cap");
    }
    const mpfr_prec_t wp = static_cast<mpfr_prec_t>(wanted);
    const Params::Enclosure qb = params.q_bounds(wp);
    const Real one = Real::from_long(1, wp);

    std::vector<Real> h_lo(m_max + 1, Real(wp)), h_up(m_max + 1, Real(wp));
    std::vector<Real> H_lo(m_max + 1, Real(wp)), H_up(m_max + 1, Real(wp));
    Real p_lo = one, p_up = one;
    Real w_lo = qb.lo, w_up = qb.up;
    Real sh_lo(wp), sh_up(wp), sH_lo(wp), sH_up(wp);
    for (long j = 1; j <= m_max; ++j) {
        const unsigned long long hc = h_coeff(j);
        const unsigned long long Hc = H_coeff(j);
        Real th_lo = mul_ui(p_lo, hc, wp, MPFR_RNDD);
        Real th_up = mul_ui(p_up, hc, wp, MPFR_RNDU);
        Real tH_lo = mul_ui(p_lo, Hc, wp, MPFR_RNDD);
        Real tH_up = mul_ui(p_up, Hc, wp, MPFR_RNDU);
        if (j % 2 == 1) {   // +h term, -H term
            sh_lo = add(sh_lo, th_lo, wp, MPFR_RNDD);
            sh_up = add(sh_up, th_up, wp, MPFR_RNDU);
            sH_lo = sub(sH_lo, tH_up, wp, MPFR_RNDD);
            sH_up = sub(sH_up, tH_lo, wp, MPFR_RNDU);
        } else {
            sh_lo = sub(sh_lo, th_up, wp, MPFR_RNDD);
            sh_up = sub(sh_up, th_lo, wp, MPFR_RNDU);
            sH_lo = add(sH_lo, tH_lo, wp, MPFR_RNDD);
            sH_up = add(sH_up, tH_up, wp, MPFR_RNDU);
        }
        h_lo[j] = sh_lo;
        h_up[j] = sh_up;
        H_lo[j] = sH_lo;
        H_up[j] = sH_up;
        p_lo = mul(p_lo, w_lo, wp, MPFR_RNDD);
        p_up = mul(p_up, w_up, wp, MPFR_RNDU);
        w_lo = mul(w_lo, qb.lo, wp, MPFR_RNDD);
        w_up = mul(w_up, qb.up, wp, MPFR_RNDU);
    }

    PartialRatioTable table;
    std::vector<bool> has_ratio(m_max + 1, false);
    std::vector<Real> r_lo(m_max + 1, Real(kBoundPrec)), r_up(m_max + 1, Real(kBoundPrec));
    table.rows.reserve(m_max);
    for (long m = 1; m <= m_max; ++m) {
        PartialRatioRow row;
        row.m = m;
        row.h_m = div_ui(add(h_lo[m], h_up[m], wp), 2, wp);
        row.H_m = div_ui(add(H_lo[m], H_up[m], wp), 2, wp);
        if (h_lo[m].sign() > 0) {
            has_ratio[m] = true;
            r_lo[m] = div(H_lo[m], H_lo[m].sign() >= 0 ? h_up[m] : h_lo[m], wp, MPFR_RNDD);
            r_up[m] = div(H_up[m], H_up[m].sign() >= 0 ? h_lo[m] : h_up[m], wp, MPFR_RNDU);
            row.ratio = div_ui(add(r_lo[m], r_up[m], wp), 2, wp);
            ErrorBoundedValue enc = ebv_from_bounds(r_lo[m], r_up[m], wp);
            row.ratio_err = enc.abs_err;
        }
        table.rows.push_back(std::move(row));
    }

    // chain at m uses ratios at 2m-2, 2m-1, 2m, 2m+1
    const long chain_top = (m_max - 1) / 2;
    table.checked_to = chain_top >= 2 ? chain_top : 0;
    long last_bad = 0;
    bool any_checked = false;
    for (long m = 2; m <= chain_top; ++m) {
        const long i0 = 2 * m - 2, i1 = 2 * m - 1, i2 = 2 * m, i3 = 2 * m + 1;
        bool ok = has_ratio[i0] && has_ratio[i1] && has_ratio[i2] && has_ratio[i3] &&
                  r_up[i1] < r_lo[i3] && r_up[i3] < r_lo[i2] && r_up[i2] < r_lo[i0];
        any_checked = true;
        if (!ok) last_bad = m;
    }
    table.interleave_from = any_checked ? (last_bad == 0 ? 1 : last_bad) : -1;
    return table;
}

} // namespace defexp
