#include "defexp/arith.hpp"

#include <cmath>

namespace defexp {

PrecisionContext make_context(long decimal_digits, long guard_bits, long hard_cap) {
    if (decimal_digits < 1) throw config_error("decimal_digits must be >= 1");
    if (guard_bits < 0) throw config_error("guard_bits must be >= 0");
    const long base = static_cast<long>(std::ceil(static_cast<double>(decimal_digits) *
                                                  3.3219280948873623479));
    PrecisionContext ctx;
    ctx.target_abs_exp = -base;
    ctx.working_bits = base + guard_bits;
    ctx.guard_bits = guard_bits;
    ctx.hard_cap = hard_cap;
    if (ctx.working_bits > hard_cap) {
        throw config_error("requested precision exceeds the working-bits hard cap");
    }
    return ctx;
}

Params::Params(std::string q_decimal, mpfr_prec_t prec)
    : q_decimal_(std::move(q_decimal)), q_(prec), alpha_(prec) {
    try {
        q_ = Real::from_decimal(q_decimal_, prec);
    } catch (const parse_error&) {
        throw domain_error("q must be a decimal literal, got '" + q_decimal_ + "'");
    }
    if (!(q_.sign() > 0) || !(q_ < Real::from_long(1, 8))) {
        throw domain_error("q must lie strictly inside (0,1), got '" + q_decimal_ + "'");
    }
    alpha_ = ui_div(1, q_, prec);
}

Params::Enclosure Params::q_bounds(mpfr_prec_t prec) const {
    return {Real::from_decimal(q_decimal_, prec, MPFR_RNDD),
            Real::from_decimal(q_decimal_, prec, MPFR_RNDU)};
}

Params::Enclosure Params::alpha_bounds(mpfr_prec_t prec) const {
    Enclosure qb = q_bounds(prec);
    return {ui_div(1, qb.up, prec, MPFR_RNDD), ui_div(1, qb.lo, prec, MPFR_RNDU)};
}

Real ErrorBoundedValue::upper() const {
    return add(value, abs_err, std::max(value.prec(), kBoundPrec), MPFR_RNDU);
}

Real ErrorBoundedValue::lower() const {
    return sub(value, abs_err, std::max(value.prec(), kBoundPrec), MPFR_RNDD);
}

ErrorBoundedValue ebv_exact(Real v) {
    return {std::move(v), Real(kBoundPrec)};
}

ErrorBoundedValue ebv_from_bounds(const Real& lo, const Real& up, mpfr_prec_t prec) {
    Real mid = div_ui(add(lo, up, prec), 2, prec);
    // half-width measured against the rounded midpoint, outward both ways
    Real e1 = sub(up, mid, kBoundPrec, MPFR_RNDU);
    Real e2 = sub(mid, lo, kBoundPrec, MPFR_RNDU);
    return {std::move(mid), max(e1, e2)};
}

ErrorBoundedValue ebv_add(const ErrorBoundedValue& a, const ErrorBoundedValue& b,
                          mpfr_prec_t prec) {
    Real v = add(a.value, b.value, prec);
    Real e = add(a.abs_err, b.abs_err, kBoundPrec, MPFR_RNDU);
    if (!v.is_zero()) e = add(e, Real::two_pow(v.floor_log2() + 1 - prec), kBoundPrec, MPFR_RNDU);
    return {std::move(v), std::move(e)};
}

ErrorBoundedValue ebv_sub(const ErrorBoundedValue& a, const ErrorBoundedValue& b,
                          mpfr_prec_t prec) {
    ErrorBoundedValue nb{neg(b.value), b.abs_err};
    return ebv_add(a, nb, prec);
}

ErrorBoundedValue ebv_mul(const ErrorBoundedValue& a, const ErrorBoundedValue& b,
                          mpfr_prec_t prec) {
    Real v = mul(a.value, b.value, prec);
    // |a||eb| + |b||ea| + ea*eb, all rounded up
    Real e = add(mul(abs(a.value), b.abs_err, kBoundPrec, MPFR_RNDU),
                 mul(abs(b.value), a.abs_err, kBoundPrec, MPFR_RNDU), kBoundPrec, MPFR_RNDU);
    e = add(e, mul(a.abs_err, b.abs_err, kBoundPrec, MPFR_RNDU), kBoundPrec, MPFR_RNDU);
    if (!v.is_zero()) e = add(e, Real::two_pow(v.floor_log2() + 1 - prec), kBoundPrec, MPFR_RNDU);
    return {std::move(v), std::move(e)};
}

ErrorBoundedValue ebv_div(const ErrorBoundedValue& a, const ErrorBoundedValue& b,
                          mpfr_prec_t prec) {
    Real babs = abs(b.value);
    if (!(babs > add(b.abs_err, b.abs_err, kBoundPrec, MPFR_RNDU))) {
        throw domain_error("ebv_div: denominator not separated from zero");
    }
    Real v = div(a.value, b.value, prec);
    // (ea + |a/b| eb) / (|b| - eb)
    Real quot_mag = div(abs(a.value), babs, kBoundPrec, MPFR_RNDU);
    Real num = add(a.abs_err, mul(quot_mag, b.abs_err, kBoundPrec, MPFR_RNDU),
                   kBoundPrec, MPFR_RNDU);
    Real den = sub(babs, b.abs_err, kBoundPrec, MPFR_RNDD);
    Real e = div(num, den, kBoundPrec, MPFR_RNDU);
    if (!v.is_zero()) e = add(e, Real::two_pow(v.floor_log2() + 1 - prec), kBoundPrec, MPFR_RNDU);
    return {std::move(v), std::move(e)};
}

ErrorBoundedValue ebv_abs(const ErrorBoundedValue& a) {
    return {abs(a.value), a.abs_err};
}

bool ebv_consistent(const ErrorBoundedValue& a, const ErrorBoundedValue& b) {
    mpfr_prec_t p = std::max({a.value.prec(), b.value.prec(), kBoundPrec});
    Real gap = abs(sub(a.value, b.value, p, MPFR_RNDA));
    Real budget = add(a.abs_err, b.abs_err, kBoundPrec, MPFR_RNDD);
    return gap <= budget;
}

bool ebv_inside(const ErrorBoundedValue& v, const Real& lo, const Real& up) {
    return v.lower() >= lo && v.upper() <= up;
}

bool ebv_contains(const ErrorBoundedValue& v, const Real& x) {
    return v.lower() <= x && x <= v.upper();
}

long max_term_exponent(const Real& x_mag, const Params& params) {
    if (!(x_mag.sign() > 0)) throw domain_error("max_term_exponent requires x_mag > 0");
    const double lx = log2(x_mag, 64).to_double();
    const double la = log2(params.alpha(), 64).to_double();

    // log2 term(n) = n*lx - log2(n!) - n(n-1)/2 * la, concave in n: once the
    // estimate has fallen for three consecutive steps it never recovers.
    double best = 0.0;   // n = 0 term is exactly 1
    double lfact = 0.0;
    double prev = 0.0;
    int decreases = 0;
    for (long n = 1;; ++n) {
        lfact += std::log2(static_cast<double>(n));
        const double nn = static_cast<double>(n);
        const double t = nn * lx - lfact - 0.5 * nn * (nn - 1.0) * la;
        if (t > best) best = t;
        if (t < prev) {
            if (++decreases >= 3) break;
        } else {
            decreases = 0;
        }
        prev = t;
        if (n > 50'000'000) throw config_error("max_term_exponent: scan did not terminate");
    }
    if (best == 0.0) return 0;   // the n = 0 term (exactly 1) dominates
    // slack covers the double-precision slop of the scan
    long est = static_cast<long>(std::ceil(best)) + 4;
    return est < 0 ? 0 : est;
}

mpfr_prec_t required_bits(long peak_exponent, const PrecisionContext& ctx) {
    long bits = std::max<long>(ctx.working_bits,
                               peak_exponent - ctx.target_abs_exp + ctx.guard_bits);
    if (bits > ctx.hard_cap) {
        throw config_error("dynamic precision " + std::to_string(bits) +
                           " bits exceeds the hard cap " + std::to_string(ctx.hard_cap) +
                           " (set DEFEXP_PRECISION_CAP to raise it)");
    }
    return static_cast<mpfr_prec_t>(bits);
}

} // namespace defexp
