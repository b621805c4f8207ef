#pragma once

#include "defexp/errors.hpp"
#include "defexp/real.hpp"

#include <string>

namespace defexp {

inline constexpr long kDefaultGuardBits = 64;
inline constexpr long kDefaultHardCapBits = 1'000'000;
// Precision used for error-bound bookkeeping (always rounded outward).
inline constexpr mpfr_prec_t kBoundPrec = 96;

struct PrecisionContext {
    long target_abs_exp = -170;          // goal: absolute error <= 2^target_abs_exp
    mpfr_prec_t working_bits = 234;
    long guard_bits = kDefaultGuardBits;
    long hard_cap = kDefaultHardCapBits;
};

// decimal_digits >= 1; working_bits = ceil(digits*log2(10)) + guard_bits.
PrecisionContext make_context(long decimal_digits, long guard_bits = kDefaultGuardBits,
                              long hard_cap = kDefaultHardCapBits);

// The deformation parameter q in (0,1) and alpha = 1/q. q converts once from
// its decimal literal at the requested precision; everything else derives
// from that single conversion. The literal doubles as the cache fingerprint.
class Params {
public:
    Params(std::string q_decimal, mpfr_prec_t prec);

    const std::string& q_decimal() const { return q_decimal_; }
    const Real& q() const { return q_; }
    const Real& alpha() const { return alpha_; }
    mpfr_prec_t prec() const { return q_.prec(); }

    // Same parameter at another working precision (fresh conversion of the
    // literal, so no double rounding).
    Params at(mpfr_prec_t prec) const { return Params(q_decimal_, prec); }

    struct Enclosure {
        Real lo, up;
    };
    Enclosure q_bounds(mpfr_prec_t prec) const;      // lo <= q <= up
    Enclosure alpha_bounds(mpfr_prec_t prec) const;  // lo <= 1/q <= up

private:
    std::string q_decimal_;
    Real q_;
    Real alpha_;
};

// A value plus a rigorous absolute error bound: the true quantity lies in
// [value - abs_err, value + abs_err].
struct ErrorBoundedValue {
    Real value;
    Real abs_err;

    Real upper() const;   // value + abs_err, rounded up
    Real lower() const;   // value - abs_err, rounded down
};

ErrorBoundedValue ebv_exact(Real v);
// Enclosure [lo, up] -> midpoint plus outward half-width.
ErrorBoundedValue ebv_from_bounds(const Real& lo, const Real& up, mpfr_prec_t prec);
ErrorBoundedValue ebv_add(const ErrorBoundedValue& a, const ErrorBoundedValue& b,
                          mpfr_prec_t prec);
ErrorBoundedValue ebv_sub(const ErrorBoundedValue& a, const ErrorBoundedValue& b,
                          mpfr_prec_t prec);
ErrorBoundedValue ebv_mul(const ErrorBoundedValue& a, const ErrorBoundedValue& b,
                          mpfr_prec_t prec);
// Requires |b.value| > 2*b.abs_err (denominator separated from zero).
ErrorBoundedValue ebv_div(const ErrorBoundedValue& a, const ErrorBoundedValue& b,
                          mpfr_prec_t prec);
ErrorBoundedValue ebv_abs(const ErrorBoundedValue& a);

// Conservative test of |a.value - b.value| <= a.abs_err + b.abs_err.
bool ebv_consistent(const ErrorBoundedValue& a, const ErrorBoundedValue& b);
// Conservative test of lo <= v.value +- v.abs_err <= up ... i.e. the whole
// enclosure of v lies inside [lo, up].
bool ebv_inside(const ErrorBoundedValue& v, const Real& lo, const Real& up);
// Conservative test that x lies inside v's enclosure.
bool ebv_contains(const ErrorBoundedValue& v, const Real& x);

// Integer upper estimate of log2 of the largest term |x|^n q^{n(n-1)/2}/n!
// over n >= 0. Requires x_mag > 0. Over-approximates the true maximum.
long max_term_exponent(const Real& x_mag, const Params& params);

// Dynamic-precision rule: any evaluation with terms peaking at 2^peak needs
// working_bits >= peak - target_abs_exp + guard_bits to survive cancellation.
mpfr_prec_t required_bits(long peak_exponent, const PrecisionContext& ctx);

} // namespace defexp
