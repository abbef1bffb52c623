#include "qplab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "qplab/errors.hpp"

namespace qplab {

std::complex<double> amplitude(const EigenSystem& sys, long long n, long long m,
                               double t) {
  const int rn = sys.row(n), rm = sys.row(m);
  double re = 0.0, im = 0.0;
  for (int s = 0; s < sys.dim(); ++s) {
    double w = sys.eigenvectors(rn, s) * sys.eigenvectors(rm, s);
    double ph = -t * sys.eigenvalues(s);
    re += w * std::cos(ph);
    im += w * std::sin(ph);
  }
  return {re, im};
}

Eigen::VectorXcd amplitude_row(const EigenSystem& sys, long long m, double t) {
  const int rm = sys.row(m);
  const int n = sys.dim();
  Eigen::VectorXcd c(n);
  for (int s = 0; s < n; ++s) {
    double ph = -t * sys.eigenvalues(s);
    c(s) = sys.eigenvectors(rm, s) * std::complex<double>(std::cos(ph),
                                                          std::sin(ph));
  }
  return sys.eigenvectors.cast<std::complex<double>>() * c;
}

SupAmplitude sup_amplitude(const EigenSystem& sys, long long n, long long m,
                           const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw ConfigError("sup_amplitude: empty time grid");
  const int rn = sys.row(n), rm = sys.row(m);
  double bound = 0.0;
  for (int s = 0; s < sys.dim(); ++s)
    bound += std::abs(sys.eigenvectors(rn, s) * sys.eigenvectors(rm, s));
  double sup = 0.0;
  for (double t : t_grid) sup = std::max(sup, std::abs(amplitude(sys, n, m, t)));
  return {sup, bound};
}

double moment(const EigenSystem& sys, double p, double t, long long source) {
  Eigen::VectorXcd row = amplitude_row(sys, source, t);
  double total = 0.0;
  for (int i = 0; i < row.size(); ++i) {
    double site = static_cast<double>(std::llabs(sys.site(i)));
    total += std::pow(site, p) * std::norm(row(i));
  }
  return total;
}

std::vector<SudlFit> sudl_profile(const EigenSystem& sys,
                                  const std::vector<long long>& m_list,
                                  long long tail_lo, long long tail_hi,
                                  const std::vector<double>& t_grid) {
  if (m_list.empty() || t_grid.empty())
    throw ConfigError("sudl_profile: empty input list");
  std::vector<SudlFit> fits;
  for (long long m : m_list) {
    // one row per time, sup across times for every target site
    Eigen::VectorXd sup = Eigen::VectorXd::Zero(sys.dim());
    for (double t : t_grid)
      sup = sup.cwiseMax(amplitude_row(sys, m, t).cwiseAbs());

    std::vector<double> xs, ys;
    bool any_offsite = false;
    for (int i = 0; i < sys.dim(); ++i) {
      long long d = std::llabs(sys.site(i) - m);
      if (d > 0 && sup(i) > 1e-300) any_offsite = true;
      if (d < tail_lo || d > tail_hi) continue;
      if (sup(i) <= 1e-300) continue;
      xs.push_back(-static_cast<double>(d));
      ys.push_back(std::log(sup(i)));
    }
    SudlFit f;
    f.m = m;
    if (!any_offsite) {
      // diagonal H: all motion stays on the source site
      f.prefactor = sup(sys.row(m));
      f.rate = std::numeric_limits<double>::infinity();
      f.stat = 0.0;
      f.points = 0;
      f.decoupled = true;
      fits.push_back(f);
      continue;
    }
    if (xs.size() < 10)
      throw DegenerateFit("sudl_profile: fewer than 10 usable tail points");
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0) throw DegenerateFit("sudl_profile: degenerate abscissa");
    f.rate = (n * sxy - sx * sy) / denom;
    double lnC = (sy - f.rate * sx) / n;
    f.prefactor = std::exp(lnC);
    f.stat = m == 0 ? 0.0 : lnC / static_cast<double>(std::llabs(m));
    f.points = static_cast<int>(xs.size());
    f.decoupled = false;
    fits.push_back(f);
  }
  return fits;
}

double unitarity_defect(const EigenSystem& sys, long long m, double t) {
  return std::abs(amplitude_row(sys, m, t).squaredNorm() - 1.0);
}

std::vector<int> near_degenerate_pairs(const EigenSystem& sys, double gap_tol) {
  std::vector<int> flagged;
  for (int s = 0; s + 1 < sys.dim(); ++s)
    if (sys.eigenvalues(s + 1) - sys.eigenvalues(s) < gap_tol)
      flagged.push_back(s);
  return flagged;
}

std::vector<double> uniform_time_grid(const EigenSystem& sys, double T,
                                      std::size_t max_points) {
  // Gershgorin: ||H|| <= max|g| + 2
  double norm = sys.eigenvalues.cwiseAbs().maxCoeff();
  if (norm <= 0) norm = 1.0;
  double dt = 0.1 / norm;
  std::size_t count = static_cast<std::size_t>(T / dt) + 1;
  if (count > max_points)
    throw ConfigError("uniform_time_grid: grid of " + std::to_string(count) +
                      " points exceeds cap; use geometric_time_grid");
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    grid.push_back(static_cast<double>(i) * dt);
  return grid;
}

std::vector<double> geometric_time_grid(double t_min, double T, int count) {
  if (!(t_min > 0 && T > t_min && count >= 2))
    throw ConfigError("geometric_time_grid: need 0 < t_min < T, count >= 2");
  std::vector<double> grid{0.0};
  double r = std::log(T / t_min) / (count - 1);
  for (int i = 0; i < count; ++i) grid.push_back(t_min * std::exp(r * i));
  return grid;
}

void save_sudl_csv(const std::vector<SudlFit>& fits, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_sudl_csv: cannot open " + path);
  out.precision(12);
  out << "m,prefactor,rate,stat,points,decoupled\n";
  for (const auto& f : fits)
    out << f.m << ',' << f.prefactor << ',' << f.rate << ',' << f.stat << ','
        << f.points << ',' << (f.decoupled ? 1 : 0) << '\n';
}

}  // namespace qplab
