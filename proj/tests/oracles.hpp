#pragma once

// Brute-force reference computations for the tests. Everything here takes the
// slow, direct route (per-term powers and factorials, plain sign scans) so
// that the library's incremental fast paths are checked against genuinely
// independent arithmetic.

#include <defexp/real.hpp>

#include <gmp.h>
#include <mpfr.h>

#include <stdexcept>
#include <vector>

namespace oracle {

using defexp::Real;

// x^n q^{n(n-1)/2} / n!, each factor computed from scratch.
inline Real f_term(const Real& x, const Real& q, unsigned long n, mpfr_prec_t prec) {
    Real t(prec);
    mpfr_pow_ui(t.mp(), x.mp(), n, MPFR_RNDN);
    Real qp(prec);
    mpfr_pow_ui(qp.mp(), q.mp(), n * (n - 1) / 2, MPFR_RNDN);
    mpfr_mul(t.mp(), t.mp(), qp.mp(), MPFR_RNDN);
    mpz_t fac;
    mpz_init(fac);
    mpz_fac_ui(fac, n);
    Real f(prec);
    mpfr_set_z(f.mp(), fac, MPFR_RNDN);
    mpz_clear(fac);
    mpfr_div(t.mp(), t.mp(), f.mp(), MPFR_RNDN);
    return t;
}

inline Real f_sum(const Real& x, const Real& q, unsigned long nterms, mpfr_prec_t prec) {
    Real s(prec);
    for (unsigned long n = 0; n <= nterms; ++n) {
        Real t = f_term(x, q, n, prec);
        mpfr_add(s.mp(), s.mp(), t.mp(), MPFR_RNDN);
    }
    return s;
}

inline std::vector<Real> f_partial_sums(const Real& x, const Real& q, unsigned long nterms,
                                        mpfr_prec_t prec) {
    std::vector<Real> sums;
    Real s(prec);
    for (unsigned long n = 0; n <= nterms; ++n) {
        Real t = f_term(x, q, n, prec);
        mpfr_add(s.mp(), s.mp(), t.mp(), MPFR_RNDN);
        sums.push_back(s);
    }
    return sums;
}

// max over n <= n_scan of log2 |term(x_mag)|.
inline double max_term_log2(const Real& x_mag, const Real& q, unsigned long n_scan,
                            mpfr_prec_t prec) {
    double best = 0.0;   // n = 0 term is exactly 1
    for (unsigned long n = 1; n <= n_scan; ++n) {
        Real t = f_term(x_mag, q, n, prec);
        Real l(64);
        mpfr_log2(l.mp(), t.mp(), MPFR_RNDN);
        const double v = mpfr_get_d(l.mp(), MPFR_RNDN);
        if (v > best) best = v;
    }
    return best;
}

// u_n = (k + lambda/k)^n / n! * alpha^{n(2k-n-1)/2}, direct.
inline Real u_term(long k, const Real& lambda, const Real& alpha, unsigned long n,
                   mpfr_prec_t prec) {
    Real c(prec);
    mpfr_div_ui(c.mp(), lambda.mp(), static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_add_ui(c.mp(), c.mp(), static_cast<unsigned long>(k), MPFR_RNDN);
    Real t(prec);
    mpfr_pow_ui(t.mp(), c.mp(), n, MPFR_RNDN);
    const long e = static_cast<long>(n) * (2 * k - static_cast<long>(n) - 1) / 2;
    Real ap(prec);
    mpfr_pow_si(ap.mp(), alpha.mp(), e, MPFR_RNDN);
    mpfr_mul(t.mp(), t.mp(), ap.mp(), MPFR_RNDN);
    mpz_t fac;
    mpz_init(fac);
    mpz_fac_ui(fac, n);
    Real f(prec);
    mpfr_set_z(f.mp(), fac, MPFR_RNDN);
    mpz_clear(fac);
    mpfr_div(t.mp(), t.mp(), f.mp(), MPFR_RNDN);
    return t;
}

// sum of divisors by exhaustive enumeration of every candidate divisor.
inline unsigned long long sigma_brute(unsigned long long k) {
    unsigned long long s = 0;
    for (unsigned long long d = 1; d <= k; ++d) {
        if (k % d == 0) s += d;
    }
    return s;
}

// First zero of f for parameters where x_1 lies in (-2, -1): 1000-point sign
// scan, then bisection. Throws if the scan sees no sign change.
inline Real first_zero_scan(const Real& q, mpfr_prec_t prec, unsigned long npoints = 1000,
                            unsigned long nterms = 300) {
    Real lo(prec), hi(prec);
    bool found = false;
    Real prev_t = Real::from_long(-1, prec);
    Real prev_f = f_sum(prev_t, q, nterms, prec);
    for (unsigned long i = 1; i <= npoints && !found; ++i) {
        Real t(prec);
        mpfr_set_si(t.mp(), static_cast<long>(i), MPFR_RNDN);
        mpfr_div_ui(t.mp(), t.mp(), npoints, MPFR_RNDN);
        mpfr_add_si(t.mp(), t.mp(), 1, MPFR_RNDN);
        mpfr_neg(t.mp(), t.mp(), MPFR_RNDN);   // -(1 + i/npoints)
        Real ft = f_sum(t, q, nterms, prec);
        if (mpfr_sgn(ft.mp()) * mpfr_sgn(prev_f.mp()) < 0) {
            lo = t;        // more negative endpoint
            hi = prev_t;
            found = true;
        }
        prev_t = t;
        prev_f = ft;
    }
    if (!found) throw std::runtime_error("first_zero_scan: no sign change in (-2, -1)");
    Real flo = f_sum(lo, q, nterms, prec);
    for (int it = 0; it < 400; ++it) {
        Real mid(prec);
        mpfr_add(mid.mp(), lo.mp(), hi.mp(), MPFR_RNDN);
        mpfr_div_ui(mid.mp(), mid.mp(), 2, MPFR_RNDN);
        Real fm = f_sum(mid, q, nterms, prec);
        if (mpfr_sgn(fm.mp()) == mpfr_sgn(flo.mp())) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Real mid(prec);
    mpfr_add(mid.mp(), lo.mp(), hi.mp(), MPFR_RNDN);
    mpfr_div_ui(mid.mp(), mid.mp(), 2, MPFR_RNDN);
    return mid;
}

} // namespace oracle
