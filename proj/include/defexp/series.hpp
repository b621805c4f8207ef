#pragma once

#include "defexp/arith.hpp"

#include <vector>

namespace defexp {

struct SeriesValue {
    ErrorBoundedValue result;
    long terms_used = 0;
    long peak_exponent = 0;      // upper bound on log2 of the largest term
    long cancellation_bits = 0;  // peak_exponent - log2|result|, clamped at 0
    mpfr_prec_t working_bits_used = 0;
};

// f(x) = sum_{n>=0} x^n / n! * q^{n(n-1)/2}, evaluated by direct summation
// with running term updates. Working precision is raised automatically to
// max_term_exponent(|x|) - target_abs_exp + guard_bits so that alternating
// cancellation cannot eat the answer. Throws config_error past the hard cap.
SeriesValue eval_f(const Real& x, const Params& params, const PrecisionContext& ctx);

// f'(x) = f(q x): the defining functional equation is the derivative route.
SeriesValue eval_f_prime(const Real& x, const Params& params, const PrecisionContext& ctx);

// Alternating-series diagnostics at x = -(k + lambda/k) alpha^{k-1}:
//   u_n = (k + lambda/k)^n / n! * alpha^{n(2k-n-1)/2}
//   v_j = u_{2k-j-1} - u_j          (j = 0 .. k-1)
struct TermTable {
    long k = 0;
    Real lambda;
    std::vector<Real> u;               // n = 0 .. 2k-1+tail_margin
    std::vector<ErrorBoundedValue> v;  // j = 0 .. k-1, signs decidable via abs_err
};

TermTable term_table(long k, const Real& lambda, const Params& params,
                     const PrecisionContext& ctx, long tail_margin = 4);

} // namespace defexp
