#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qplab/arithmetic.hpp"
#include "qplab/errors.hpp"

using namespace qplab;

TEST_CASE("torus reduction and norm") {
  BigFloat x(3.7, 256);
  CHECK(torus_reduce(x).to_double() == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(torus_norm(x).to_double() == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(torus_norm(BigFloat(-0.1, 256)).to_double() == doctest::Approx(0.1));
  CHECK(torus_norm(BigFloat(0.5, 256)).to_double() == 0.5);
  CHECK(torus_norm(BigFloat(4.0, 256)).to_double() == 0.0);
}

TEST_CASE("golden mean continued fraction: all ones, Fibonacci convergents") {
  auto cf = continued_fraction(BigFloat::golden_mean(512), 30);
  REQUIRE(cf.partial_quotients.size() >= 25);
  CHECK_FALSE(cf.rational);
  for (size_t i = 0; i < 25; ++i) CHECK(cf.partial_quotients[i] == 1);
  // independent oracle: Fibonacci recurrence
  long long fa = 1, fb = 1;  // p/q = F_k / F_{k+1}
  for (size_t k = 0; k < 20; ++k) {
    CHECK(cf.convergents[k].first == fa);
    CHECK(cf.convergents[k].second == fb);
    long long fc = fa + fb;
    fa = fb;
    fb = fc;
  }
}

TEST_CASE("rational input terminates and is flagged") {
  auto cf = continued_fraction(BigFloat(0.375, 256), 50);
  CHECK(cf.rational);
  // 3/8 = [0;2,1,2]
  CHECK(cf.convergents.back().first == 3);
  CHECK(cf.convergents.back().second == 8);
}

TEST_CASE("denominators strictly increase and convergents approximate alpha") {
  auto cf = continued_fraction(BigFloat::pi(512) - 3.0, 20);
  double alpha = cf.alpha.to_double();
  for (size_t k = 1; k < cf.convergents.size(); ++k)
    CHECK(cf.convergents[k].second > cf.convergents[k - 1].second);
  for (auto [p, q] : cf.convergents)
    CHECK(std::abs(alpha - double(p) / double(q)) < 1.0 / double(q) / double(q));
}

TEST_CASE("diophantine check: golden mean is Diophantine, Liouville-like is not") {
  auto cf = continued_fraction(BigFloat::golden_mean(512), 40);
  auto res = diophantine_check(cf, 1.5, 0.2, 5000);
  CHECK(res.satisfied);
  // oracle: at a Fibonacci denominator q, ||q alpha|| ~ alpha^q-scaled bound
  CHECK(res.worst_norm > 0.0);

  // alpha with a huge partial quotient violates the same (kappa, tau)
  BigFloat bad = BigFloat(1.0, 512) / (BigFloat(2.0, 512) +
              BigFloat(1.0, 512) / BigFloat(100000.0, 512));
  auto cf2 = continued_fraction(bad, 10);
  auto res2 = diophantine_check(cf2, 1.5, 0.2, 5000);
  CHECK_FALSE(res2.satisfied);
}

TEST_CASE("delta estimate recovers a planted resonance") {
  // plant: 2 theta + n0 alpha = e^{-b n0} exactly, so the scan must report
  // at least b at n0 (and nothing larger for a generic alpha tail)
  const double b = 0.4;
  const long long n0 = 40;
  BigFloat alpha = BigFloat::golden_mean(512);
  BigFloat theta =
      (BigFloat::exp(BigFloat(-b * double(n0), 512)) - alpha * n0) / 2.0;
  auto est = delta_alpha_theta(alpha, theta, 128);
  // the golden tail contributes only small exponents past the cutoff, so the
  // measured value is exactly the planted one
  CHECK(est.b_hat == doctest::Approx(b).epsilon(1e-9));
  CHECK(!est.records.empty());
}

TEST_CASE("exact resonance is a degenerate input") {
  BigFloat alpha = BigFloat::golden_mean(512);
  BigFloat theta = -(alpha * 24LL) / 2.0;  // 2 theta + 24 alpha = 0
  CHECK_THROWS_AS(delta_alpha_theta(alpha, theta, 64),
                  DegenerateExactResonance);
}

TEST_CASE("phase construction certifies and round-trips the exponent") {
  BigFloat alpha = BigFloat::golden_mean(1024);
  for (double b : {0.2, 0.5}) {
    auto cert = construct_phase(alpha, b, 256, 1024);
    CHECK(cert.target_b == b);
    CHECK(cert.floor_exponent <= 0.05 * b + 1e-15);
    CHECK(!cert.witnesses.empty());
    CHECK(verify_certificate(cert));
    auto est = delta_alpha_theta(alpha, cert.theta, 256);
    CHECK(est.b_hat == doctest::Approx(b).epsilon(0.15));
  }
}

TEST_CASE("witness enclosures bracket the prescribed scale") {
  BigFloat alpha = BigFloat::golden_mean(1024);
  auto cert = construct_phase(alpha, 0.3, 512, 1024);
  for (const auto& w : cert.witnesses) {
    CHECK(w.lo <= w.hi);
    double lo = w.lo.to_double(), n = double(w.n);
    // witness value sits in [e^{-(b+eps)n}, e^{-(b-eps)n}]
    CHECK(-std::log(lo) / n <= 0.3 + cert.floor_exponent + 1e-9);
    double hi = w.hi.to_double();
    CHECK(-std::log(hi) / n >= 0.3 - cert.floor_exponent - 1e-9);
  }
}

TEST_CASE("tampered certificate fails verification") {
  BigFloat alpha = BigFloat::golden_mean(1024);
  auto cert = construct_phase(alpha, 0.3, 256, 1024);
  auto bad = cert;
  bad.theta = cert.theta + BigFloat(1e-4, 1024);
  CHECK_FALSE(verify_certificate(bad));
}

TEST_CASE("certificate serialization round-trips") {
  BigFloat alpha = BigFloat::golden_mean(1024);
  auto cert = construct_phase(alpha, 0.25, 256, 1024);
  auto back = ResonanceCertificate::from_json(cert.to_json());
  CHECK(BigFloat::abs(back.theta - cert.theta).to_double() == 0.0);
  CHECK(back.target_b == cert.target_b);
  CHECK(back.witnesses.size() == cert.witnesses.size());
  CHECK(back.n_max == cert.n_max);
  CHECK(verify_certificate(back));
}

TEST_CASE("insufficient explicit precision is rejected") {
  BigFloat alpha = BigFloat::golden_mean(128);
  CHECK_THROWS_AS(construct_phase(alpha, 0.5, 2048, 128), PrecisionExhausted);
}
