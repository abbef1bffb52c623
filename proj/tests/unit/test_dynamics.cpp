#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "qplab/dynamics.hpp"
#include "qplab/errors.hpp"

using namespace qplab;

namespace {

EigenSystem small_amo(long long L) {
  auto g = PotentialSpec::almost_mathieu(2.0, BigFloat::golden_mean(256),
                                         BigFloat(0.13, 256));
  return eigendecompose(build_truncation(g, L));
}

}  // namespace

TEST_CASE("t = 0 gives the identity") {
  auto sys = small_amo(25);
  for (long long n = -25; n <= 25; n += 7)
    for (long long m = -25; m <= 25; m += 9) {
      auto a = amplitude(sys, n, m, 0.0);
      CHECK(a.real() == doctest::Approx(n == m ? 1.0 : 0.0).epsilon(1e-10));
      CHECK(std::abs(a.imag()) < 1e-10);
    }
}

TEST_CASE("unitarity at sampled times") {
  auto sys = small_amo(30);
  for (double t : {0.0, 0.3, 2.0, 55.0, 1.0e4})
    CHECK(unitarity_defect(sys, -4, t) < 1e-10);
}

TEST_CASE("time reversal conjugates and sources commute") {
  auto sys = small_amo(20);
  auto a = amplitude(sys, 7, -3, 1.7);
  auto b = amplitude(sys, 7, -3, -1.7);
  CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-12));
  CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-12));
  auto c = amplitude(sys, -3, 7, 1.7);
  CHECK(std::abs(a - c) < 1e-12);
}

TEST_CASE("amplitude_row matches the scalar amplitude") {
  auto sys = small_amo(15);
  auto row = amplitude_row(sys, 2, 3.1);
  for (long long n = -15; n <= 15; ++n)
    CHECK(std::abs(row(sys.row(n)) - amplitude(sys, n, 2, 3.1)) < 1e-12);
}

TEST_CASE("1x1 system evolves by a pure phase") {
  auto g = PotentialSpec::table({0.8}, 0);
  auto sys = eigendecompose(build_truncation(g, 0));
  auto a = amplitude(sys, 0, 0, 2.5);
  CHECK(std::abs(a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.real() == doctest::Approx(std::cos(2.5 * 0.8)).epsilon(1e-12));
  CHECK(a.imag() == doctest::Approx(-std::sin(2.5 * 0.8)).epsilon(1e-12));
}

TEST_CASE("out-of-window requests fail") {
  auto sys = small_amo(10);
  CHECK_THROWS_AS(amplitude(sys, 11, 0, 1.0), OutOfWindow);
  CHECK_THROWS_AS(amplitude_row(sys, -11, 1.0), OutOfWindow);
}

TEST_CASE("eigenbasis bound dominates the sampled sup") {
  auto sys = small_amo(25);
  std::vector<double> grid{0.0, 0.5, 3.0, 20.0, 400.0};
  for (long long n : {-20LL, -3LL, 8LL})
    for (long long m : {-6LL, 0LL, 15LL}) {
      auto s = sup_amplitude(sys, n, m, grid);
      CHECK(s.sampled_sup <= s.eigenbasis_bound + 1e-12);
      if (n == m) {
        CHECK(s.eigenbasis_bound <= 1.0 + 1e-12);
        CHECK(s.sampled_sup == doctest::Approx(1.0));  // t=0 in the grid
      }
    }
}

TEST_CASE("moment basics: t=0 mass at the source") {
  auto sys = small_amo(20);
  CHECK(moment(sys, 2.0, 0.0, 0) == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(moment(sys, 2.0, 0.0, 5) == doctest::Approx(25.0).epsilon(1e-8));
}

TEST_CASE("free evolution is ballistic at small times") {
  auto g = PotentialSpec::table(std::vector<double>(241, 0.0), -120);
  auto sys = eigendecompose(build_truncation(g, 120));
  double t = 0.1;
  CHECK(moment(sys, 2.0, t, 0) / (t * t) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("localized evolution keeps the second moment bounded") {
  auto sys = small_amo(60);
  double m0 = moment(sys, 2.0, 1.0e3, 0);
  double m1 = moment(sys, 2.0, 1.0e4, 0);
  CHECK(m0 < 50.0);
  CHECK(m1 < 50.0);
}

TEST_CASE("sudl profile fits the dynamical envelope") {
  auto sys = small_amo(60);
  auto grid = geometric_time_grid(0.1, 1.0e3, 40);
  auto fits = sudl_profile(sys, {0, 10}, 5, 25, grid);
  REQUIRE(fits.size() == 2);
  for (const auto& f : fits) {
    CHECK_FALSE(f.decoupled);
    CHECK(f.rate > 0.3);  // localized at roughly ln lambda
    CHECK(f.points >= 10);
  }
  CHECK(fits[0].stat == 0.0);  // m = 0 convention
}

TEST_CASE("decoupled diagonal system flags an infinite rate") {
  // no hopping: built directly, not via a truncation
  EigenSystem sys;
  sys.offset = -3;
  sys.eigenvalues.resize(7);
  for (int i = 0; i < 7; ++i) sys.eigenvalues(i) = 0.31 * i;
  sys.eigenvectors = Eigen::MatrixXd::Identity(7, 7);
  sys.residual_max = 0.0;
  sys.trust_radius = 3;
  for (int i = 0; i < 7; ++i) {
    sys.centers.push_back(sys.offset + i);
    sys.trusted_flags.push_back(1);
    sys.degenerate_flags.push_back(0);
  }
  auto fits = sudl_profile(sys, {1}, 1, 3, {0.0, 1.0, 2.0});
  REQUIRE(fits.size() == 1);
  CHECK(fits[0].decoupled);
  CHECK(std::isinf(fits[0].rate));
  CHECK(fits[0].prefactor == doctest::Approx(1.0));
  // and the amplitude is a pure phase on the diagonal
  auto a = amplitude(sys, 1, 1, 2.0);
  CHECK(std::abs(a) == doctest::Approx(1.0));
  CHECK(std::abs(amplitude(sys, 2, 1, 2.0)) < 1e-15);
}

TEST_CASE("near-degenerate pair report") {
  EigenSystem sys;
  sys.eigenvalues.resize(4);
  sys.eigenvalues << 0.0, 1e-13, 0.5, 0.5 + 2e-12;
  auto flagged = near_degenerate_pairs(sys, 1e-12);
  CHECK(flagged == std::vector<int>{0});
}

TEST_CASE("time grids are deterministic and well-formed") {
  auto sys = small_amo(10);
  auto u = uniform_time_grid(sys, 5.0);
  REQUIRE(u.size() >= 2);
  CHECK(u[0] == 0.0);
  double dt = u[1] - u[0];
  CHECK(dt <= 0.1 / sys.eigenvalues.cwiseAbs().maxCoeff() + 1e-15);
  CHECK(u.back() <= 5.0 + dt);
  CHECK_THROWS_AS(uniform_time_grid(sys, 1.0e9, 100), ConfigError);

  auto ggrid = geometric_time_grid(0.1, 100.0, 4);
  REQUIRE(ggrid.size() == 5);
  CHECK(ggrid[0] == 0.0);
  CHECK(ggrid[1] == doctest::Approx(0.1));
  CHECK(ggrid.back() == doctest::Approx(100.0));
  CHECK_THROWS_AS(geometric_time_grid(0.0, 1.0, 4), ConfigError);
}
