#include "qplab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qplab/errors.hpp"

namespace qplab {

namespace {

// products grow like e^{n ln lambda}; extraction keeps doubles in range
const double kRenormThreshold = std::ldexp(1.0, 512);

double inf_norm(const Mat2& m) {
  return std::max(std::abs(m(0, 0)) + std::abs(m(0, 1)),
                  std::abs(m(1, 0)) + std::abs(m(1, 1)));
}

void renormalize(Mat2& m, double& log_scale) {
  double nrm = inf_norm(m);
  if (nrm > kRenormThreshold) {
    m /= nrm;
    log_scale += std::log(nrm);
  }
  if (!std::isfinite(nrm))
    throw Overflow("cocycle: matrix norm overflowed between renormalizations");
}

}  // namespace

Mat2 one_step(double E, double g_n) {
  Mat2 m;
  m << E - g_n, -1.0, 1.0, 0.0;
  return m;
}

double op_norm_2x2(const Mat2& m) {
  // scale out the largest entry first: squaring near-threshold entries
  // would overflow
  double mx = m.cwiseAbs().maxCoeff();
  if (mx == 0.0 || !std::isfinite(mx)) return mx;
  Mat2 u = m / mx;
  // closed-form largest singular value
  double s = u.squaredNorm();
  double d = u.determinant();
  double disc = s * s - 4.0 * d * d;
  if (disc < 0) disc = 0;
  return mx * std::sqrt((s + std::sqrt(disc)) * 0.5);
}

double CocycleProduct::det() const {
  double m = inf_norm(matrix);
  if (m == 0) return 0;
  Mat2 scaled = matrix / m;
  double d = scaled.determinant();
  double lg = 2.0 * (log_scale + std::log(m)) + std::log(std::abs(d));
  return (d < 0 ? -1.0 : 1.0) * std::exp(lg);
}

CocycleProduct product(const PotentialSpec& g, double E, long long k,
                       long long n) {
  if (k > n) {
    // inverse-product convention: A_{n,k} = A_{k,n}^{-1}
    CocycleProduct fwd = product(g, E, n, k);
    // true fwd = e^s M with det(true) = 1, so inverse = e^s adj(M)
    Mat2 adj;
    adj << fwd.matrix(1, 1), -fwd.matrix(0, 1), -fwd.matrix(1, 0),
        fwd.matrix(0, 0);
    return {adj, fwd.log_scale, k, n};
  }
  CocycleProduct p{Mat2::Identity(), 0.0, k, n};
  for (long long j = k; j < n; ++j) {
    p.matrix = one_step(E, g.eval(j)) * p.matrix;
    renormalize(p.matrix, p.log_scale);
  }
  return p;
}

CocycleProduct compose(const CocycleProduct& later,
                       const CocycleProduct& earlier) {
  if (earlier.to != later.from)
    throw ConfigError("compose: spans do not chain");
  CocycleProduct p{later.matrix * earlier.matrix,
                   later.log_scale + earlier.log_scale, earlier.from, later.to};
  renormalize(p.matrix, p.log_scale);
  return p;
}

PropagatedVector propagate(const PotentialSpec& g, double E, const Vec2& u0,
                           long long m, long long k) {
  PropagatedVector r{u0, 0.0};
  const double hi = std::ldexp(1.0, 256), lo = std::ldexp(1.0, -256);
  auto rescale = [&] {
    double nrm = r.v.cwiseAbs().maxCoeff();
    if (nrm > hi || (nrm < lo && nrm > 0)) {
      r.v /= nrm;
      r.log_scale += std::log(nrm);
    }
  };
  if (k >= 0) {
    for (long long j = 0; j < k; ++j) {
      r.v = one_step(E, g.eval(m + j)) * r.v;
      rescale();
    }
  } else {
    // one inverse step moves (phi(y), phi(y-1)) to (phi(y-1), phi(y-2))
    for (long long j = 0; j > k; --j) {
      double gy = g.eval(m + j - 1);
      Vec2 w;
      w << r.v(1), (E - gy) * r.v(1) - r.v(0);
      r.v = w;
      rescale();
    }
  }
  return r;
}

double one_step_log_norm_bound(const PotentialSpec& g, long long lo,
                               long long hi, double Emin, double Emax) {
  double best = 0.0;
  for (long long n = lo; n <= hi; ++n) {
    double gn = g.eval(n);
    // ||one_step|| is convex in E, so the max sits at an endpoint
    best = std::max({best, std::log(op_norm_2x2(one_step(Emin, gn))),
                     std::log(op_norm_2x2(one_step(Emax, gn)))});
  }
  return best;
}

std::vector<long long> default_base_points(long long n, int count) {
  std::vector<long long> pts{0};
  for (long long j = 1; static_cast<int>(pts.size()) < count; ++j) {
    pts.push_back(j * n);
    if (static_cast<int>(pts.size()) < count) pts.push_back(-j * n);
  }
  return pts;
}

LyapunovEstimate lyapunov_estimate(const PotentialSpec& g, double E,
                                   long long n,
                                   const std::vector<long long>& base_points) {
  if (n < 1) throw ConfigError("lyapunov_estimate: n must be >= 1");
  if (base_points.empty())
    throw ConfigError("lyapunov_estimate: need at least one base point");

  long long lo = base_points.front(), hi = lo;
  for (long long k : base_points) {
    lo = std::min(lo, k);
    hi = std::max(hi, k + n);
  }
  std::vector<double> cache(static_cast<size_t>(hi - lo));
  for (long long s = lo; s < hi; ++s)
    cache[static_cast<size_t>(s - lo)] = g.eval(s);

  LyapunovEstimate est{-std::numeric_limits<double>::infinity(), n, {}};
  for (long long k : base_points) {
    Mat2 m = Mat2::Identity();
    double log_scale = 0.0;
    for (long long j = k; j < k + n; ++j) {
      m = one_step(E, cache[static_cast<size_t>(j - lo)]) * m;
      renormalize(m, log_scale);
    }
    double v = (log_scale + std::log(op_norm_2x2(m))) / static_cast<double>(n);
    est.per_base.emplace_back(k, v);
    est.value = std::max(est.value, v);
  }
  return est;
}

}  // namespace qplab
