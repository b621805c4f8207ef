#include "defexp/real.hpp"

#include "defexp/errors.hpp"

#include <cstdlib>
#include <ostream>
#include <utility>

namespace defexp {

Real::Real() {
    mpfr_init2(v_, 64);
    mpfr_set_zero(v_, 1);
}

Real::Real(mpfr_prec_t prec) {
    if (prec < MPFR_PREC_MIN) prec = MPFR_PREC_MIN;
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
}

Real::Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
    // Steal the limbs; leave the source valid for its destructor.
    v_[0] = other.v_[0];
    mpfr_init2(other.v_, MPFR_PREC_MIN);
    mpfr_set_zero(other.v_, 1);
}

Real& Real::operator=(const Real& other) {
    if (this != &other) {
        mpfr_set_prec(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
}

Real& Real::operator=(Real&& other) noexcept {
    if (this != &other) {
        mpfr_swap(v_, other.v_);
    }
    return *this;
}

Real::~Real() {
    mpfr_clear(v_);
}

Real Real::from_decimal(std::string_view text, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Real r(prec);
    std::string s(text);
    if (s.empty() || mpfr_set_str(r.v_, s.c_str(), 10, rnd) != 0) {
        throw parse_error("not a decimal number: '" + s + "'");
    }
    return r;
}

Real Real::from_hex(std::string_view text, mpfr_prec_t prec) {
    Real r(prec);
    std::string s(text);
    // base 0 auto-detects the 0x prefix and binary p-exponent
    if (s.empty() || mpfr_set_str(r.v_, s.c_str(), 0, MPFR_RNDN) != 0) {
        throw parse_error("not a hex float: '" + s + "'");
    }
    return r;
}

Real Real::from_long(long v, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_si(r.v_, v, MPFR_RNDN);
    return r;
}

Real Real::from_ulong(unsigned long v, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_ui(r.v_, v, MPFR_RNDN);
    return r;
}

Real Real::from_double(double v, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_d(r.v_, v, MPFR_RNDN);
    return r;
}

Real Real::two_pow(long e, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
    return r;
}

mpfr_prec_t Real::prec() const { return mpfr_get_prec(v_); }

int Real::sign() const {
    if (mpfr_zero_p(v_)) return 0;
    return mpfr_sgn(v_) > 0 ? 1 : -1;
}

bool Real::is_zero() const { return mpfr_zero_p(v_) != 0; }

bool Real::is_finite() const { return mpfr_number_p(v_) != 0; }

long Real::floor_log2() const {
    // mpfr stores 2^{e-1} <= |x| < 2^e, so floor(log2|x|) = e-1 except
    // that exact powers of two sit on the lower edge.
    return static_cast<long>(mpfr_get_exp(v_)) - 1;
}

long Real::ceil_log2() const {
    long f = floor_log2();
    Real p = two_pow(f, MPFR_PREC_MIN);
    return mpfr_cmpabs(v_, p.v_) == 0 ? f : f + 1;
}

double Real::to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

std::string Real::decimal(size_t digits) const {
    if (mpfr_zero_p(v_)) return "0";
    if (!mpfr_number_p(v_)) return mpfr_nan_p(v_) ? "nan" : (mpfr_sgn(v_) > 0 ? "inf" : "-inf");
    if (digits < 2) digits = 2;
    mpfr_exp_t e;
    char* s = mpfr_get_str(nullptr, &e, 10, digits, v_, MPFR_RNDN);
    std::string m(s);
    mpfr_free_str(s);
    std::string sign_part;
    if (!m.empty() && m[0] == '-') {
        sign_part = "-";
        m.erase(0, 1);
    }
    // strip trailing zeros but keep at least one digit after the point
    size_t last = m.find_last_not_of('0');
    if (last != std::string::npos && last + 1 < m.size()) m.erase(last + 1);
    std::string out = sign_part + m.substr(0, 1);
    if (m.size() > 1) out += "." + m.substr(1);
    out += "e" + std::to_string(static_cast<long>(e) - 1);
    return out;
}

std::string Real::hex() const {
    char* s = nullptr;
    mpfr_asprintf(&s, "%Ra", v_);
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

namespace {

mpfr_prec_t wider(const Real& a, const Real& b) {
    return std::max(a.prec(), b.prec());
}

template <typename F>
Real binop(F f, const Real& a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Real r(prec);
    f(r.mp(), a.mp(), b.mp(), rnd);
    return r;
}

} // namespace

Real add(const Real& a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    return binop(mpfr_add, a, b, prec, rnd);
}
Real sub(const Real& a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    return binop(mpfr_sub, a, b, prec, rnd);
}
Real mul(const Real& a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    return binop(mpfr_mul, a, b, prec, rnd);
}
Real div(const Real& a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    return binop(mpfr_div, a, b, prec, rnd);
}

Real mul_ui(const Real& a, unsigned long b, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Real r(prec);
    mpfr_mul_ui(r.mp(), a.mp(), b, rnd);
    return r;
}

Real div_ui(const Real& a, unsigned long b, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Real r(prec);
    mpfr_div_ui(r.mp(), a.mp(), b, rnd);
    return r;
}

Real ui_div(unsigned long a, const Real& b, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Real r(prec);
    mpfr_ui_div(r.mp(), a, b.mp(), rnd);
    return r;
}

Real sqrt(const Real& a, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Real r(prec);
    mpfr_sqrt(r.mp(), a.mp(), rnd);
    return r;
}

Real exp(const Real& a, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Real r(prec);
    mpfr_exp(r.mp(), a.mp(), rnd);
    return r;
}

Real log(const Real& a, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Real r(prec);
    mpfr_log(r.mp(), a.mp(), rnd);
    return r;
}

Real log2(const Real& a, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Real r(prec);
    mpfr_log2(r.mp(), a.mp(), rnd);
    return r;
}

Real pow_si(const Real& a, long e, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    Real r(prec);
    mpfr_pow_si(r.mp(), a.mp(), e, rnd);
    return r;
}

Real neg(const Real& a) {
    Real r(a.prec());
    mpfr_neg(r.mp(), a.mp(), MPFR_RNDN);
    return r;
}

Real abs(const Real& a) {
    Real r(a.prec());
    mpfr_abs(r.mp(), a.mp(), MPFR_RNDN);
    return r;
}

Real mul_2si(const Real& a, long e) {
    Real r(a.prec());
    mpfr_mul_2si(r.mp(), a.mp(), e, MPFR_RNDN);
    return r;
}

const Real& min(const Real& a, const Real& b) { return b < a ? b : a; }
const Real& max(const Real& a, const Real& b) { return a < b ? b : a; }

Real operator+(const Real& a, const Real& b) { return add(a, b, wider(a, b)); }
Real operator-(const Real& a, const Real& b) { return sub(a, b, wider(a, b)); }
Real operator*(const Real& a, const Real& b) { return mul(a, b, wider(a, b)); }
Real operator/(const Real& a, const Real& b) { return div(a, b, wider(a, b)); }
Real operator-(const Real& a) { return neg(a); }

bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.mp(), b.mp()) < 0; }
bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.mp(), b.mp()) <= 0; }
bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.mp(), b.mp()) > 0; }
bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.mp(), b.mp()) >= 0; }
bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.mp(), b.mp()) != 0; }
bool operator!=(const Real& a, const Real& b) { return !(a == b); }

bool identical(const Real& a, const Real& b) {
    return a.prec() == b.prec() && mpfr_equal_p(a.mp(), b.mp()) != 0;
}

std::ostream& operator<<(std::ostream& os, const Real& v) {
    return os << v.decimal(20);
}

} // namespace defexp
