#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qplab/bigfloat.hpp"

using qplab::BigFloat;

TEST_CASE("construction and conversion round-trips") {
  BigFloat a(0.375, 128);
  CHECK(a.to_double() == 0.375);
  BigFloat b(-7LL, 128);
  CHECK(b.to_ll() == -7);
  CHECK(BigFloat(0.0, 64).is_zero());
  CHECK(BigFloat(2.0, 64).sign() == 1);
  CHECK(BigFloat(-2.0, 64).sign() == -1);
}

TEST_CASE("string round-trip preserves the value") {
  BigFloat x = BigFloat::golden_mean(256);
  BigFloat y = BigFloat::from_string(x.to_string(), 256);
  CHECK(BigFloat::abs(x - y).to_double() == 0.0);
}

TEST_CASE("pi matches the double constant") {
  CHECK(BigFloat::pi(128).to_double() == doctest::Approx(M_PI).epsilon(1e-15));
}

TEST_CASE("golden mean solves x^2 + x - 1 = 0") {
  BigFloat g = BigFloat::golden_mean(512);
  BigFloat r = g * g + g - BigFloat(1.0, 512);
  CHECK(BigFloat::abs(r).to_double() < 1e-150);
}

TEST_CASE("binary operations carry the larger precision") {
  BigFloat lo(1.0, 64), hi(1.0, 256);
  CHECK((lo + hi).precision() == 256);
  CHECK((hi * lo).precision() == 256);
}

TEST_CASE("arithmetic agrees with double arithmetic on exact inputs") {
  BigFloat a(1.5, 128), b(-0.25, 128);
  CHECK((a + b).to_double() == 1.25);
  CHECK((a - b).to_double() == 1.75);
  CHECK((a * b).to_double() == -0.375);
  CHECK((a / b).to_double() == -6.0);
  CHECK((a * 3LL).to_double() == 4.5);
  CHECK((-a).to_double() == -1.5);
}

TEST_CASE("elementary functions match libm at double accuracy") {
  BigFloat x(0.7, 256);
  CHECK(BigFloat::sqrt(x).to_double() == doctest::Approx(std::sqrt(0.7)).epsilon(1e-15));
  CHECK(BigFloat::log(x).to_double() == doctest::Approx(std::log(0.7)).epsilon(1e-15));
  CHECK(BigFloat::exp(x).to_double() == doctest::Approx(std::exp(0.7)).epsilon(1e-15));
  CHECK(BigFloat::sin(x).to_double() == doctest::Approx(std::sin(0.7)).epsilon(1e-15));
  CHECK(BigFloat::cos(x).to_double() == doctest::Approx(std::cos(0.7)).epsilon(1e-15));
}

TEST_CASE("frac lands in [0,1) and is invariant under integer shifts") {
  for (double v : {0.3, -0.3, 2.7, -15.2, 0.0, 5.0}) {
    BigFloat f = BigFloat::frac(BigFloat(v, 256));
    CHECK(f.to_double() >= 0.0);
    CHECK(f.to_double() < 1.0);
    BigFloat g = BigFloat::frac(BigFloat(v + 13.0, 256));
    CHECK(BigFloat::abs(f - g).to_double() < 1e-14);
  }
}

TEST_CASE("floor and comparisons") {
  CHECK(BigFloat::floor(BigFloat(2.7, 128)).to_double() == 2.0);
  CHECK(BigFloat::floor(BigFloat(-2.7, 128)).to_double() == -3.0);
  BigFloat a(1.0, 128), b(2.0, 128);
  CHECK(a < b);
  CHECK(b > a);
  CHECK(a <= a);
  CHECK(a == a);
  CHECK(BigFloat::min(a, b) == a);
  CHECK(BigFloat::max(a, b) == b);
  CHECK(a.cmp(1.5) < 0);
}
