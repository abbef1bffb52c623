#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qplab/cocycle.hpp"
#include "qplab/errors.hpp"

using namespace qplab;

namespace {

PotentialSpec random_table(unsigned seed, long long half_width, double bound) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-bound, bound);
  std::vector<double> v(static_cast<size_t>(2 * half_width + 1));
  for (auto& x : v) x = u(rng);
  return PotentialSpec::table(std::move(v), -half_width);
}

// relative distance between two renormalized products
double rel_diff(const CocycleProduct& a, const CocycleProduct& b) {
  double shift = std::exp(b.log_scale - a.log_scale);
  return (a.matrix - b.matrix * shift).norm() / a.matrix.norm();
}

}  // namespace

TEST_CASE("one-step matrix layout and unimodularity") {
  Mat2 m = one_step(1.5, 0.25);
  CHECK(m(0, 0) == 1.25);
  CHECK(m(0, 1) == -1.0);
  CHECK(m(1, 0) == 1.0);
  CHECK(m(1, 1) == 0.0);
  CHECK(m.determinant() == 1.0);
}

TEST_CASE("operator norm matches Eigen's SVD") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    Mat2 m;
    m << u(rng), u(rng), u(rng), u(rng);
    double svd = Eigen::JacobiSVD<Mat2>(m).singularValues()(0);
    CHECK(op_norm_2x2(m) == doctest::Approx(svd).epsilon(1e-12));
  }
}

TEST_CASE("identity at coincident indices") {
  auto g = random_table(1, 50, 2.0);
  auto p = product(g, 0.3, 5, 5);
  CHECK(p.matrix == Mat2::Identity());
  CHECK(p.log_scale == 0.0);
}

TEST_CASE("cocycle composition law") {
  auto g = random_table(2, 600, 2.0);
  for (auto [k, m, n] : {std::array<long long, 3>{-500, -100, 400},
                         {0, 50, 500},
                         {-30, 0, 30}}) {
    auto direct = product(g, 0.8, k, n);
    auto composed = compose(product(g, 0.8, m, n), product(g, 0.8, k, m));
    CHECK(rel_diff(direct, composed) < 1e-10);
    CHECK(direct.log_norm() ==
          doctest::Approx(composed.log_norm()).epsilon(1e-12));
  }
}

TEST_CASE("inverse convention: forward then backward is the identity") {
  // short span: reconstructing the identity loses eps * e^{2s} to
  // cancellation, so s has to stay small
  auto g = random_table(3, 300, 1.5);
  auto fwd = product(g, -0.4, -4, 6);
  auto bwd = product(g, -0.4, 6, -4);
  auto round = compose(bwd, fwd);
  CHECK((round.matrix * std::exp(round.log_scale) - Mat2::Identity()).norm() <
        1e-6);
}

TEST_CASE("determinant stays 1 on short segments") {
  // the determinant of the true product cancels to eps * e^{2s}, so only
  // short segments can see unimodularity in doubles
  auto g = random_table(4, 100, 2.5);
  for (long long span : {1LL, 2LL, 3LL, 4LL}) {
    auto p = product(g, 1.1, -span / 2, -span / 2 + span);
    CHECK(p.det() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("mismatched spans refuse to compose") {
  auto g = random_table(5, 50, 1.0);
  CHECK_THROWS_AS(compose(product(g, 0.0, 10, 20), product(g, 0.0, 0, 9)),
                  ConfigError);
}

TEST_CASE("propagation agrees with the matrix product") {
  auto g = random_table(6, 2000, 2.0);
  Vec2 u0(0.7, -0.2);
  for (long long k : {1500LL, -1500LL}) {
    auto v = propagate(g, 0.6, u0, 0, k);
    auto p = product(g, 0.6, 0, k);
    Vec2 w = p.matrix * u0;
    double wn = w.norm();
    CHECK(v.log_norm() ==
          doctest::Approx(p.log_scale + std::log(wn)).epsilon(1e-10));
    Vec2 a = v.v / v.v.norm(), b = w / wn;
    CHECK((a - b).norm() < 1e-10);
  }
}

TEST_CASE("propagation in scalar form solves the three-term recurrence") {
  auto g = random_table(7, 60, 2.0);
  const double E = 0.9;
  // direct recurrence u(n+1) = (E - g(n)) u(n) - u(n-1)
  std::vector<double> u(101);
  u[50] = 1.0;  // u(0)
  u[49] = 0.5;  // u(-1)
  for (int n = 0; n < 50; ++n)
    u[51 + n] = (E - g.eval(n)) * u[50 + n] - u[49 + n];
  for (int n = 0; n > -49; --n)
    u[48 + n] = (E - g.eval(n - 1)) * u[49 + n] - u[50 + n];
  for (long long k : {30LL, -30LL}) {
    auto v = propagate(g, E, Vec2(1.0, 0.5), 0, k);
    Vec2 expect(u[static_cast<size_t>(50 + k)], u[static_cast<size_t>(49 + k)]);
    CHECK((v.v * std::exp(v.log_scale) - expect).norm() < 1e-10);
  }
}

TEST_CASE("renormalization keeps long products finite") {
  auto g = random_table(8, 6000, 3.0);
  auto p = product(g, 0.2, -5000, 5000);
  CHECK(std::isfinite(p.log_norm()));
  CHECK(p.matrix.allFinite());
  CHECK(p.log_norm() > 0.0);  // unimodular products have norm >= 1
}

TEST_CASE("one-step log-norm bound dominates every factor") {
  auto g = random_table(9, 100, 2.0);
  double B = one_step_log_norm_bound(g, -100, 100, -1.0, 2.0);
  for (long long n = -100; n <= 100; ++n)
    for (double E : {-1.0, -0.3, 0.9, 2.0})
      CHECK(std::log(op_norm_2x2(one_step(E, g.eval(n)))) <= B + 1e-12);
}

TEST_CASE("two-sided growth bound brackets the product log-norm") {
  auto g = random_table(10, 1200, 2.0);
  double B = one_step_log_norm_bound(g, -1200, 1200, 0.7, 0.7);
  for (long long span : {10LL, 100LL, 1000LL}) {
    auto p = product(g, 0.7, -span / 2, span / 2);
    CHECK(p.log_norm() <= B * double(span) + 1e-9);
    CHECK(p.log_norm() >= -1e-12);
  }
}

TEST_CASE("free cocycle growth matches the closed-form multiplier") {
  // g = 0, E = 3: one-step matrix has eigenvalue (3+sqrt(5))/2
  auto g = PotentialSpec::table(std::vector<double>(200001, 0.0), -100000);
  double expected = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  auto est = lyapunov_estimate(g, 3.0, 10000, {0});
  CHECK(est.value == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("base point lattice is deterministic and centered") {
  auto pts = default_base_points(100, 5);
  CHECK(pts == std::vector<long long>{0, 100, -100, 200, -200});
}

TEST_CASE("lyapunov estimate takes the max over base points") {
  auto g = random_table(11, 500, 2.0);
  auto est = lyapunov_estimate(g, 0.5, 100, {0, 100, -200});
  REQUIRE(est.per_base.size() == 3);
  double mx = est.per_base[0].second;
  for (auto& [k, v] : est.per_base) mx = std::max(mx, v);
  CHECK(est.value == mx);
}
