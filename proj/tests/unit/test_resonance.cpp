#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "qplab/errors.hpp"
#include "qplab/resonance.hpp"

using namespace qplab;

TEST_CASE("resonance site matches a brute-force double scan") {
  BigFloat alpha = BigFloat::golden_mean(256);
  BigFloat theta(0.137, 256);
  auto site = find_resonance(theta, alpha, 300);
  double a = alpha.to_double(), t = theta.to_double();
  double best = 1e300;
  long long best_x = 0;
  for (long long x = -300; x <= 300; ++x) {
    double v = std::abs(std::sin(M_PI * (2 * t + double(x) * a)));
    if (v < best - 1e-12) {
      best = v;
      best_x = x;
    }
  }
  CHECK(site.L0 == best_x);
  CHECK(site.min_sin == doctest::Approx(best).epsilon(1e-9));
  CHECK(site.search_radius == 300);
}

TEST_CASE("resonance site minimizes over the whole scan radius") {
  BigFloat alpha = BigFloat::golden_mean(512);
  BigFloat theta(0.291, 512);
  auto site = find_resonance(theta, alpha, 200);
  for (long long x = -200; x <= 200; ++x) {
    double v = std::abs(
        BigFloat::sin(BigFloat::pi(512) * (theta * 2LL + alpha * x))
            .to_double());
    CHECK(site.min_sin <= v + 1e-12);
  }
}

TEST_CASE("constructed resonant phase pins the site at a witness scale") {
  BigFloat alpha = BigFloat::golden_mean(1024);
  auto cert = construct_phase(alpha, 0.3, 256, 1024);
  auto site = find_resonance(cert.theta, alpha, cert.n_max);
  // the deepest witness is the resonance site (up to sign convention)
  long long deepest = cert.witnesses.back().n;
  CHECK(std::llabs(site.L0) == deepest);
  CHECK(site.min_sin < 2e-2);
}

TEST_CASE("two-case decay bound: opposite side") {
  // resonance on the right of m_s, ell on the left: full-rate decay
  double v = key_bound(-10, 0, 40, 2.0, 0.2, 0.01);
  CHECK(v == doctest::Approx(std::exp(-(std::log(2.0) - 0.01) * 10.0)));
}

TEST_CASE("two-case decay bound: same side with certified sine floor") {
  double eta = 0.2, eps = 0.01;
  double sine = std::exp(-eta * 10.0) * 1.5;  // above the floor
  double v = key_bound(10, 0, 40, 2.0, eta, eps, sine);
  CHECK(v == doctest::Approx(std::exp(-(std::log(2.0) - eta - eps) * 10.0)));
}

TEST_CASE("same-side bound refuses uncertified hypotheses") {
  CHECK_THROWS_AS(key_bound(10, 0, 40, 2.0, 0.2, 0.01), HypothesisNotCertified);
  double low = std::exp(-0.2 * 10.0) * 0.5;  // below the floor
  CHECK_THROWS_AS(key_bound(10, 0, 40, 2.0, 0.2, 0.01, low),
                  HypothesisNotCertified);
  CHECK_THROWS_AS(key_bound(10, 0, 40, 2.0, 0.9, 0.01, 1.0), EtaOutOfRange);
  CHECK_THROWS_AS(key_bound(10, 0, 40, 2.0, -0.1, 0.01, 1.0), EtaOutOfRange);
  CHECK_THROWS_AS(key_bound(0, 0, 40, 2.0, 0.2, 0.01, 1.0), ConfigError);
  CHECK_THROWS_AS(key_bound(10, 0, 40, 1.0, 0.2, 0.01, 1.0), ConfigError);
}

TEST_CASE("decay verifier passes a nonresonant localized instance") {
  auto g = PotentialSpec::almost_mathieu(2.0, BigFloat::golden_mean(256),
                                         BigFloat(0.0, 256));
  auto sys = eigendecompose(build_truncation(g, 150));
  auto site = find_resonance(BigFloat(0.0, 256), BigFloat::golden_mean(256), 150);
  auto rows = verify_decay(sys, site, 2.0, 0.05, 10.0);
  REQUIRE(!rows.empty());
  long long fails = 0;
  for (const auto& r : rows) fails += !r.pass;
  // the bound is an envelope: allow a tiny failure rate from boundary noise
  CHECK(double(fails) / double(rows.size()) < 0.01);
}

TEST_CASE("decay report csv is written") {
  std::vector<DecayRow> rows{
      {0, 5, 1e-4, 2e-4, DecayCase::opposite_side, 0.69, true}};
  const char* path = "test_resonance_tmp.csv";
  save_decay_report_csv(rows, path);
  FILE* f = std::fopen(path, "r");
  REQUIRE(f);
  char line[256];
  REQUIRE(std::fgets(line, sizeof line, f));
  CHECK(std::string(line) == "s,ell,observed,predicted,case,margin,pass\n");
  std::fclose(f);
  std::remove(path);
}

TEST_CASE("palindrome defect vanishes for exact palindromes") {
  // even reflection about k/2 with k = 10: u(n) = u(10 - n)
  Eigen::VectorXd u(21);
  for (long long n = -5; n <= 15; ++n)
    u(n + 5) = std::exp(-0.3 * std::abs(double(n - 5)));
  auto d = palindrome_defect(u, -5, 10);
  CHECK(d.defect < 1e-14);
  CHECK(d.iota == -1);
  CHECK(d.phi_norm > 0.0);

  // odd antisymmetric: u(n) = -u(10 - n)
  for (long long n = -5; n <= 15; ++n)
    u(n + 5) = double(n - 5) * std::exp(-0.3 * std::abs(double(n - 5)));
  auto d2 = palindrome_defect(u, -5, 10);
  CHECK(d2.defect < 1e-14);
  CHECK(d2.iota == +1);
}

TEST_CASE("palindrome defect for odd reflection length") {
  // k = 7: midpoint 3.5, compared site m = 4; palindrome u(n) = u(7-n)
  Eigen::VectorXd u(12);
  for (long long n = 0; n <= 11; ++n)
    u(n) = std::cos(0.41 * double(n) * double(7 - n));
  for (long long n = 0; n <= 7; ++n) u(n) = u(7 - n);
  auto d = palindrome_defect(u, 0, 7);
  CHECK(d.defect < 1e-14);
}

TEST_CASE("palindrome defect demands the window to cover both sides") {
  Eigen::VectorXd u = Eigen::VectorXd::Ones(5);
  CHECK_THROWS_AS(palindrome_defect(u, 0, 20), OutOfWindow);
}
