#include "qplab/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "qplab/errors.hpp"

namespace qplab {

namespace {

DensityCurve curve_from_sites(const std::vector<long long>& sites,
                              long long boundary_excluded,
                              const std::vector<long long>& L_grid,
                              const EigenSystem& sys, std::string flavor) {
  DensityCurve c;
  c.flavor = std::move(flavor);
  c.boundary_excluded = boundary_excluded;
  for (long long L : L_grid) {
    if (L < 0 || L > sys.trust_radius)
      throw GridExceedsTrustRegion("center_density: L=" + std::to_string(L) +
                                   " outside [0, trust_radius]");
    long long cnt = 0;
    for (long long m : sites) cnt += (std::llabs(m) <= L);
    c.L.push_back(L);
    c.counts.push_back(cnt);
    c.densities.push_back(static_cast<double>(cnt) /
                          static_cast<double>(2 * L + 1));
  }
  return c;
}

}  // namespace

DensityCurve center_density(const EigenSystem& sys,
                            const std::vector<long long>& L_grid) {
  std::vector<long long> sites;
  long long excluded = 0;
  for (int s = 0; s < sys.dim(); ++s) {
    if (sys.trusted(s))
      sites.push_back(sys.centers[static_cast<size_t>(s)]);
    else
      ++excluded;
  }
  return curve_from_sites(sites, excluded, L_grid, sys, "maxima");
}

DensityCurve almost_density(const EigenSystem& sys, double K,
                            const std::vector<long long>& L_grid,
                            AlmostMaxSelection sel) {
  std::vector<long long> sites;
  long long excluded = 0;
  for (int s = 0; s < sys.dim(); ++s) {
    if (!sys.trusted(s)) {
      ++excluded;
      continue;
    }
    auto cand = almost_maxima(sys.eigenvectors.col(s), sys.offset, K);
    // adversarial representative: extreme |site| in the chosen direction
    long long pick = cand.front();
    for (long long n : cand) {
      bool better = sel == AlmostMaxSelection::nearest_origin
                        ? std::llabs(n) < std::llabs(pick)
                        : std::llabs(n) > std::llabs(pick);
      if (better || (std::llabs(n) == std::llabs(pick) && n < pick)) pick = n;
    }
    sites.push_back(pick);
  }
  std::string flavor =
      "almost_maxima(K=" + std::to_string(K) + "," +
      (sel == AlmostMaxSelection::nearest_origin ? "nearest" : "farthest") +
      ")";
  return curve_from_sites(sites, excluded, L_grid, sys, std::move(flavor));
}

double window_mass(const EigenSystem& sys, const std::vector<long long>& J,
                   long long win_lo, long long win_hi) {
  double total = 0.0;
  for (int s = 0; s < sys.dim(); ++s) {
    if (!sys.trusted(s)) continue;
    long long m = sys.centers[static_cast<size_t>(s)];
    if (std::find(J.begin(), J.end(), m) == J.end()) continue;
    long long last = sys.offset + sys.eigenvectors.rows() - 1;
    for (long long n = std::max(win_lo, sys.offset);
         n <= std::min(win_hi, last); ++n) {
      double v = sys.eigenvectors(static_cast<int>(n - sys.offset), s);
      total += v * v;
    }
  }
  return total;
}

BoundsCheck density_bounds_check(const DensityCurve& curve, double b,
                                 double lambda, double tol) {
  if (lambda <= 1.0)
    throw ConfigError("density_bounds_check: lambda must be > 1");
  const double ln_lambda = std::log(lambda);
  if (b >= ln_lambda)
    throw ConfigError("density_bounds_check: bounds require b < ln lambda");
  BoundsCheck chk;
  chk.upper = 1.0 + b / (2.0 * ln_lambda) + tol;
  chk.lower = 1.0 - b / ln_lambda - tol;
  chk.pass = true;
  for (double d : curve.densities) {
    double margin = std::min(chk.upper - d, d - chk.lower);
    chk.margins.emplace_back(d, margin);
    if (margin < 0) chk.pass = false;
  }
  return chk;
}

void save_density_csv(const DensityCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_density_csv: cannot open " + path);
  out.precision(12);
  out << "L,count,density\n";
  for (size_t i = 0; i < curve.L.size(); ++i)
    out << curve.L[i] << ',' << curve.counts[i] << ',' << curve.densities[i]
        << '\n';
}

nlohmann::json bounds_check_to_json(const BoundsCheck& chk) {
  nlohmann::json j;
  j["pass"] = chk.pass;
  j["upper"] = chk.upper;
  j["lower"] = chk.lower;
  auto rows = nlohmann::json::array();
  for (const auto& [d, m] : chk.margins)
    rows.push_back({{"density", d}, {"margin", m}});
  j["rows"] = rows;
  return j;
}

}  // namespace qplab
