#include "qplab/spectral.hpp"

#include <lapacke.h>

#include <cmath>
#include <fstream>

#include "qplab/errors.hpp"

namespace qplab {

Truncation build_truncation_window(const PotentialSpec& g, long long lo,
                                   long long hi) {
  if (hi < lo) throw ConfigError("build_truncation_window: empty window");
  Truncation t;
  t.offset = lo;
  t.diag.resize(hi - lo + 1);
  for (long long s = lo; s <= hi; ++s) t.diag(s - lo) = g.eval(s);
  return t;
}

Truncation build_truncation(const PotentialSpec& g, long long L) {
  if (L < 0) throw ConfigError("build_truncation: L must be >= 0");
  return build_truncation_window(g, -L, L);
}

int EigenSystem::row(long long s) const {
  if (!in_window(s))
    throw OutOfWindow("EigenSystem: site " + std::to_string(s) +
                      " outside window");
  return static_cast<int>(s - offset);
}

int EigenSystem::trusted_count() const {
  int c = 0;
  for (char f : trusted_flags) c += (f != 0);
  return c;
}

EigenSystem eigendecompose(const Truncation& t, int max_dim,
                           long long trust_radius, double degenerate_gap) {
  const int n = t.dim();
  if (n > max_dim)
    throw ConfigError("eigendecompose: dimension " + std::to_string(n) +
                      " exceeds configured maximum");
  EigenSystem sys;
  sys.offset = t.offset;
  sys.eigenvalues.resize(n);
  sys.eigenvectors.resize(n, n);

  std::vector<double> d(t.diag.data(), t.diag.data() + n);
  std::vector<double> e(std::max(n - 1, 1), 1.0);
  int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, d.data(), e.data(),
                           sys.eigenvectors.data(), n);
  if (info != 0) {
    // bisection + inverse-iteration fallback
    d.assign(t.diag.data(), t.diag.data() + n);
    e.assign(std::max(n - 1, 1), 1.0);
    std::vector<int> ifail(std::max(n, 1));
    int m = 0;
    info = LAPACKE_dstevx(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(),
                          0, 0, 0, 0, 0.0, &m, sys.eigenvalues.data(),
                          sys.eigenvectors.data(), n, ifail.data());
    if (info != 0 || m != n)
      throw ConvergenceFailure("eigendecompose: LAPACK failed, info=" +
                               std::to_string(info));
  } else {
    for (int i = 0; i < n; ++i) sys.eigenvalues(i) = d[i];
  }

  // Near-degenerate pairs: the solver returns an arbitrary orthogonal basis
  // of the 2D space; rotate each pair so one member carries the full
  // amplitude at the dominant site of the pair (maximally localized basis).
  sys.degenerate_flags.assign(static_cast<size_t>(n), 0);
  for (int s = 0; s + 1 < n; ++s) {
    if (sys.eigenvalues(s + 1) - sys.eigenvalues(s) >= degenerate_gap) continue;
    sys.degenerate_flags[static_cast<size_t>(s)] = 1;
    sys.degenerate_flags[static_cast<size_t>(s + 1)] = 1;
    auto u = sys.eigenvectors.col(s);
    auto v = sys.eigenvectors.col(s + 1);
    int p = 0;
    (u.cwiseAbs2() + v.cwiseAbs2()).maxCoeff(&p);
    double cth = u(p), sth = v(p);
    double r = std::hypot(cth, sth);
    if (r > 0) {
      cth /= r;
      sth /= r;
      for (int i = 0; i < n; ++i) {
        double a = u(i), b = v(i);
        u(i) = cth * a + sth * b;
        v(i) = -sth * a + cth * b;
      }
    }
    ++s;  // pairs are disjoint
  }

  // deterministic sign convention: largest-magnitude entry positive
  for (int s = 0; s < n; ++s) {
    int p = 0;
    sys.eigenvectors.col(s).cwiseAbs().maxCoeff(&p);
    if (sys.eigenvectors(p, s) < 0) sys.eigenvectors.col(s) *= -1.0;
  }

  // residuals against the tridiagonal recurrence
  sys.residual_max = 0.0;
  for (int s = 0; s < n; ++s) {
    const auto phi = sys.eigenvectors.col(s);
    double E = sys.eigenvalues(s);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = t.diag(i) * phi(i) - E * phi(i);
      if (i > 0) r += phi(i - 1);
      if (i + 1 < n) r += phi(i + 1);
      acc += r * r;
    }
    sys.residual_max = std::max(sys.residual_max, std::sqrt(acc));
  }

  if (trust_radius < 0) {
    // Dirichlet boundary artifacts live near the window edges
    long long half = (t.last_site() - t.first_site()) / 2;
    trust_radius = half / 2;
  }
  sys.trust_radius = trust_radius;
  sys.centers.resize(n);
  sys.trusted_flags.resize(n);
  for (int s = 0; s < n; ++s) {
    long long c = localization_center(sys.eigenvectors.col(s), t.offset);
    sys.centers[static_cast<size_t>(s)] = c;
    sys.trusted_flags[static_cast<size_t>(s)] =
        (std::llabs(c) <= trust_radius) ? 1 : 0;
  }
  return sys;
}

long long localization_center(const Eigen::VectorXd& phi, long long offset) {
  long long best_site = offset;
  double best = -1.0;
  for (int i = 0; i < phi.size(); ++i) {
    double a = std::abs(phi(i));
    long long site = offset + i;
    bool better = a > best;
    if (a == best) {
      // ties: smallest |site|, then negative first
      long long cur = std::llabs(site), old = std::llabs(best_site);
      better = cur < old || (cur == old && site < best_site);
    }
    if (better) {
      best = a;
      best_site = site;
    }
  }
  return best_site;
}

std::vector<long long> almost_maxima(const Eigen::VectorXd& phi,
                                     long long offset, double K) {
  if (K < 1.0) throw ConfigError("almost_maxima: K must be >= 1");
  double mx = phi.cwiseAbs().maxCoeff();
  std::vector<long long> out;
  for (int i = 0; i < phi.size(); ++i)
    if (std::abs(phi(i)) >= mx / K) out.push_back(offset + i);
  return out;
}

namespace {

DecayFit fit_impl(const Eigen::VectorXd& phi, long long offset, long long m_s,
                  long long tail_lo, long long tail_hi, int side,
                  double amp_floor) {
  std::vector<double> xs, ys;
  for (int i = 0; i < phi.size(); ++i) {
    long long n = offset + i;
    long long d = n - m_s;
    if (side != 0 && ((side > 0 && d <= 0) || (side < 0 && d >= 0))) continue;
    long long ad = std::llabs(d);
    if (ad < tail_lo || ad > tail_hi) continue;
    double a = std::abs(phi(i));
    if (a <= amp_floor) continue;
    xs.push_back(-static_cast<double>(ad));
    ys.push_back(std::log(a));
  }
  if (xs.size() < 10)
    throw DegenerateFit("decay_fit: fewer than 10 usable tail points");
  // ln|phi| ~ c + gamma * x  with x = -|n-m_s|
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw DegenerateFit("decay_fit: degenerate abscissa");
  double gamma = (n * sxy - sx * sy) / denom;
  double c = (sy - gamma * sx) / n;
  double rss = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (c + gamma * xs[i]);
    rss += r * r;
  }
  return {gamma, std::sqrt(rss / n), static_cast<int>(xs.size())};
}

}  // namespace

DecayFit decay_fit(const Eigen::VectorXd& phi, long long offset, long long m_s,
                   long long tail_lo, long long tail_hi, double amp_floor) {
  return fit_impl(phi, offset, m_s, tail_lo, tail_hi, 0, amp_floor);
}

DecayFit decay_fit_one_sided(const Eigen::VectorXd& phi, long long offset,
                             long long m_s, long long tail_lo,
                             long long tail_hi, int side, double amp_floor) {
  return fit_impl(phi, offset, m_s, tail_lo, tail_hi, side, amp_floor);
}

double sule_constant(const Eigen::VectorXd& phi, long long offset,
                     long long m_s, double gamma, long long lo, long long hi,
                     double amp_floor) {
  if (gamma <= 0) throw ConfigError("sule_constant: gamma must be > 0");
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < phi.size(); ++i) {
    long long n = offset + i;
    if (n < lo || n > hi) continue;
    double a = std::abs(phi(i));
    if (a <= amp_floor) continue;
    // evaluated in log space: e^{gamma |n-m_s|} alone can overflow
    double lg = std::log(a) + gamma * static_cast<double>(std::llabs(n - m_s));
    best = std::max(best, lg);
  }
  return std::isfinite(best) ? std::exp(best) : 0.0;
}

void save_eigensystem_csv(const EigenSystem& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_eigensystem_csv: cannot open " + path);
  out.precision(17);
  for (int s = 0; s < sys.dim(); ++s) {
    out << sys.eigenvalues(s);
    for (int i = 0; i < sys.dim(); ++i) out << ',' << sys.eigenvectors(i, s);
    out << '\n';
  }
}

void save_eigensystem_bin(const EigenSystem& sys, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("save_eigensystem_bin: cannot open " + path);
  auto put64 = [&](long long v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
  };
  put64(sys.dim());
  put64(sys.offset);
  for (int s = 0; s < sys.dim(); ++s) {
    double E = sys.eigenvalues(s);
    out.write(reinterpret_cast<const char*>(&E), 8);
    out.write(reinterpret_cast<const char*>(sys.eigenvectors.col(s).data()),
              8 * static_cast<std::streamsize>(sys.dim()));
  }
}

}  // namespace qplab
