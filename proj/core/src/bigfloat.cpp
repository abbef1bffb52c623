#include "qplab/bigfloat.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "qplab/errors.hpp"

namespace qplab {

namespace {
unsigned clamp_prec(unsigned p) { return std::max(p, BigFloat::kMinPrecision); }
unsigned join(const BigFloat& a, const BigFloat& b) {
  return std::max(a.precision(), b.precision());
}
}  // namespace

BigFloat::BigFloat(unsigned prec) { mpfr_init2(v_, clamp_prec(prec)); }

BigFloat::BigFloat(double x, unsigned prec) {
  mpfr_init2(v_, clamp_prec(prec));
  mpfr_set_d(v_, x, MPFR_RNDN);
}

BigFloat::BigFloat(long long x, unsigned prec) {
  mpfr_init2(v_, clamp_prec(prec));
  mpfr_set_si(v_, x, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& o) noexcept {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_swap(v_, o.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& o) {
  if (this != &o) {
    mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& o) noexcept {
  if (this != &o) mpfr_swap(v_, o.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

BigFloat BigFloat::from_string(const std::string& s, unsigned prec) {
  BigFloat r(prec);
  if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0)
    throw ConfigError("BigFloat: cannot parse '" + s + "'");
  return r;
}

BigFloat BigFloat::pi(unsigned prec) {
  BigFloat r(prec);
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::golden_mean(unsigned prec) {
  BigFloat r(prec);
  mpfr_sqrt_ui(r.v_, 5, MPFR_RNDN);
  mpfr_sub_ui(r.v_, r.v_, 1, MPFR_RNDN);
  mpfr_div_ui(r.v_, r.v_, 2, MPFR_RNDN);
  return r;
}

long long BigFloat::to_ll() const {
  if (!mpfr_fits_slong_p(v_, MPFR_RNDN))
    throw PrecisionExhausted("BigFloat: value does not fit in 64-bit integer");
  return mpfr_get_si(v_, MPFR_RNDN);
}

std::string BigFloat::to_string() const {
  // digits10 + 2 guard digits round-trips binary precision
  size_t digits = static_cast<size_t>(precision() * 0.30103) + 3;
  std::vector<char> buf(digits + 32);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", static_cast<int>(digits), v_);
  return std::string(buf.data());
}

BigFloat BigFloat::operator-() const {
  BigFloat r(precision());
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

#define QPLAB_BINOP(op, fn)                              \
  BigFloat BigFloat::operator op(const BigFloat& o) const { \
    BigFloat r(join(*this, o));                          \
    fn(r.v_, v_, o.v_, MPFR_RNDN);                       \
    return r;                                            \
  }
QPLAB_BINOP(+, mpfr_add)
QPLAB_BINOP(-, mpfr_sub)
QPLAB_BINOP(*, mpfr_mul)
QPLAB_BINOP(/, mpfr_div)
#undef QPLAB_BINOP

BigFloat BigFloat::operator*(long long k) const {
  BigFloat r(precision());
  mpfr_mul_si(r.v_, v_, k, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::operator+(double x) const {
  BigFloat r(precision());
  mpfr_add_d(r.v_, v_, x, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::operator-(double x) const {
  BigFloat r(precision());
  mpfr_sub_d(r.v_, v_, x, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::operator*(double x) const {
  BigFloat r(precision());
  mpfr_mul_d(r.v_, v_, x, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::operator/(double x) const {
  BigFloat r(precision());
  mpfr_div_d(r.v_, v_, x, MPFR_RNDN);
  return r;
}

BigFloat& BigFloat::operator+=(const BigFloat& o) {
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& o) {
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

#define QPLAB_UNFN(name, fn)                  \
  BigFloat BigFloat::name(const BigFloat& x) { \
    BigFloat r(x.precision());                \
    fn(r.v_, x.v_, MPFR_RNDN);                \
    return r;                                 \
  }
QPLAB_UNFN(abs, mpfr_abs)
QPLAB_UNFN(sqrt, mpfr_sqrt)
QPLAB_UNFN(log, mpfr_log)
QPLAB_UNFN(exp, mpfr_exp)
QPLAB_UNFN(sin, mpfr_sin)
QPLAB_UNFN(cos, mpfr_cos)
#undef QPLAB_UNFN

BigFloat BigFloat::floor(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_rint_floor(r.v_, x.v_, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::min(const BigFloat& a, const BigFloat& b) {
  return a <= b ? a : b;
}

BigFloat BigFloat::max(const BigFloat& a, const BigFloat& b) {
  return a >= b ? a : b;
}

BigFloat BigFloat::frac(const BigFloat& x) {
  BigFloat r = x - floor(x);
  // rounding can produce exactly 1.0 for x just below an integer
  if (r.cmp(1.0) >= 0) {
    mpfr_sub_ui(r.v_, r.v_, 1, MPFR_RNDN);
  }
  if (r.sign() < 0) {
    mpfr_add_ui(r.v_, r.v_, 1, MPFR_RNDN);
  }
  return r;
}

}  // namespace qplab
