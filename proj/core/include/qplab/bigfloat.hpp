#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

namespace qplab {

/// Thin RAII wrapper around mpfr_t with explicit per-value precision in bits.
/// Binary operations carry the larger of the two operand precisions.
class BigFloat {
 public:
  static constexpr unsigned kDefaultPrecision = 512;
  static constexpr unsigned kMinPrecision = 64;

  explicit BigFloat(unsigned prec = kDefaultPrecision);
  BigFloat(double x, unsigned prec);
  BigFloat(long long x, unsigned prec);
  BigFloat(const BigFloat& o);
  BigFloat(BigFloat&& o) noexcept;
  BigFloat& operator=(const BigFloat& o);
  BigFloat& operator=(BigFloat&& o) noexcept;
  ~BigFloat();

  static BigFloat from_string(const std::string& s, unsigned prec);
  static BigFloat pi(unsigned prec);
  /// (sqrt(5)-1)/2, the golden-mean frequency.
  static BigFloat golden_mean(unsigned prec);

  unsigned precision() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long long to_ll() const;  // rounds to nearest
  /// Decimal string that round-trips at this precision.
  std::string to_string() const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  BigFloat operator-() const;
  BigFloat operator+(const BigFloat& o) const;
  BigFloat operator-(const BigFloat& o) const;
  BigFloat operator*(const BigFloat& o) const;
  BigFloat operator/(const BigFloat& o) const;
  BigFloat operator*(long long k) const;
  BigFloat operator+(double x) const;
  BigFloat operator-(double x) const;
  BigFloat operator*(double x) const;
  BigFloat operator/(double x) const;
  BigFloat& operator+=(const BigFloat& o);
  BigFloat& operator-=(const BigFloat& o);

  bool operator<(const BigFloat& o) const { return mpfr_cmp(v_, o.v_) < 0; }
  bool operator>(const BigFloat& o) const { return mpfr_cmp(v_, o.v_) > 0; }
  bool operator<=(const BigFloat& o) const { return mpfr_cmp(v_, o.v_) <= 0; }
  bool operator>=(const BigFloat& o) const { return mpfr_cmp(v_, o.v_) >= 0; }
  bool operator==(const BigFloat& o) const { return mpfr_cmp(v_, o.v_) == 0; }
  int cmp(double x) const { return mpfr_cmp_d(v_, x); }

  static BigFloat abs(const BigFloat& x);
  static BigFloat floor(const BigFloat& x);
  static BigFloat sqrt(const BigFloat& x);
  static BigFloat log(const BigFloat& x);
  static BigFloat exp(const BigFloat& x);
  static BigFloat sin(const BigFloat& x);
  static BigFloat cos(const BigFloat& x);
  static BigFloat min(const BigFloat& a, const BigFloat& b);
  static BigFloat max(const BigFloat& a, const BigFloat& b);

  /// Fractional part in [0,1).
  static BigFloat frac(const BigFloat& x);

  const mpfr_t& raw() const { return v_; }
  mpfr_t& raw() { return v_; }

 private:
  mpfr_t v_;
};

}  // namespace qplab
