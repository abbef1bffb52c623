#pragma once

#include <Eigen/Dense>

#include <vector>

#include "qplab/potential.hpp"

namespace qplab {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

/// One-step transfer matrix [[E - g(n), -1], [1, 0]]; exactly unimodular.
Mat2 one_step(double E, double g_n);

/// Operator 2-norm of a 2x2 matrix from the singular-value closed form.
double op_norm_2x2(const Mat2& m);

/// Renormalized multi-step transfer matrix: true product = e^{log_scale} * matrix.
struct CocycleProduct {
  Mat2 matrix;
  double log_scale;
  long long from, to;  // product spans sites [min(from,to), max(from,to))

  double log_norm() const { return log_scale + std::log(op_norm_2x2(matrix)); }
  /// det of the true product, corrected for the extracted scale.
  double det() const;
};

/// A_{n,k}(E): ordered product over [k, n) for k < n, identity at k = n,
/// inverse-product convention for k > n.
CocycleProduct product(const PotentialSpec& g, double E, long long k,
                       long long n);

/// Composition A_{n,m} * A_{m,k} with log scales adding.
CocycleProduct compose(const CocycleProduct& later, const CocycleProduct& earlier);

struct PropagatedVector {
  Vec2 v;
  double log_scale;  // true vector = e^{log_scale} * v
  double log_norm() const { return log_scale + std::log(v.norm()); }
};

/// Propagates the solution 2-vector (phi(m), phi(m-1)) by k sites (either sign).
PropagatedVector propagate(const PotentialSpec& g, double E, const Vec2& u0,
                           long long m, long long k);

/// B of the one-step log-norm bound: max over sites in [lo, hi] and
/// E in {Emin, Emax} of ln||one_step(E, g(n))||.
double one_step_log_norm_bound(const PotentialSpec& g, long long lo,
                               long long hi, double Emin, double Emax);

struct LyapunovEstimate {
  double value;  // max over base points of ln||A_{k+n,k}(E)|| / n
  long long n;
  std::vector<std::pair<long long, double>> per_base;
};

/// Deterministic lattice of base points {0, +-n, +-2n, ...}, `count` entries.
std::vector<long long> default_base_points(long long n, int count = 64);

LyapunovEstimate lyapunov_estimate(const PotentialSpec& g, double E,
                                   long long n,
                                   const std::vector<long long>& base_points);

}  // namespace qplab
