#pragma once

#include <mpfr.h>

#include <iosfwd>
#include <string>
#include <string_view>

namespace defexp {

// Arbitrary-precision binary float. Thin RAII value wrapper over mpfr_t:
// every value carries its own precision, and rounded operations take an
// explicit target precision and rounding mode. The infix operators round
// to nearest at the wider operand's precision.
class Real {
public:
    Real();                              // 0 at 64 bits
    explicit Real(mpfr_prec_t prec);     // 0 at the given precision
    Real(const Real& other);
    Real(Real&& other) noexcept;
    Real& operator=(const Real& other);
    Real& operator=(Real&& other) noexcept;
    ~Real();

    // Parsing. Throws parse_error when the text is not a complete number.
    static Real from_decimal(std::string_view text, mpfr_prec_t prec,
                             mpfr_rnd_t rnd = MPFR_RNDN);
    // Accepts the exact "0x...p..." form emitted by hex().
    static Real from_hex(std::string_view text, mpfr_prec_t prec);
    static Real from_long(long v, mpfr_prec_t prec = 64);
    static Real from_ulong(unsigned long v, mpfr_prec_t prec = 64);
    static Real from_double(double v, mpfr_prec_t prec = 64);
    static Real two_pow(long e, mpfr_prec_t prec = 8);    // exact 2^e

    mpfr_prec_t prec() const;
    int sign() const;                    // -1, 0, +1
    bool is_zero() const;
    bool is_finite() const;
    bool is_neg() const { return sign() < 0; }
    long floor_log2() const;             // floor(log2 |x|); requires x != 0
    long ceil_log2() const;              // ceil(log2 |x|); requires x != 0
    double to_double() const;

    std::string decimal(size_t digits) const;   // "-1.2345e-3" style
    std::string hex() const;                    // exact; round-trips via from_hex

    mpfr_srcptr mp() const { return v_; }
    mpfr_ptr mp() { return v_; }

private:
    mpfr_t v_;
};

// Rounded arithmetic into an explicit target precision.
Real add(const Real& a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real sub(const Real& a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real mul(const Real& a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real div(const Real& a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real mul_ui(const Real& a, unsigned long b, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real div_ui(const Real& a, unsigned long b, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real ui_div(unsigned long a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real sqrt(const Real& a, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real exp(const Real& a, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real log(const Real& a, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real log2(const Real& a, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
Real pow_si(const Real& a, long e, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);

// Exact operations (result keeps the operand's precision).
Real neg(const Real& a);
Real abs(const Real& a);
Real mul_2si(const Real& a, long e);

const Real& min(const Real& a, const Real& b);
const Real& max(const Real& a, const Real& b);

// Infix operators: wider operand precision, round to nearest.
Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator-(const Real& a);

bool operator<(const Real& a, const Real& b);
bool operator<=(const Real& a, const Real& b);
bool operator>(const Real& a, const Real& b);
bool operator>=(const Real& a, const Real& b);
bool operator==(const Real& a, const Real& b);
bool operator!=(const Real& a, const Real& b);

// Same value and same precision (cache round-trip notion of equality).
bool identical(const Real& a, const Real& b);

std::ostream& operator<<(std::ostream& os, const Real& v);

} // namespace defexp
