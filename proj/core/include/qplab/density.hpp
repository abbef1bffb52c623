#pragma once

#include <string>
#include <vector>

#include "qplab/spectral.hpp"

#include "json.hpp"

namespace qplab {

enum class AlmostMaxSelection { nearest_origin, farthest_origin };

struct DensityCurve {
  std::vector<long long> L;
  std::vector<long long> counts;    // #{trusted s : |m_s| <= L}
  std::vector<double> densities;    // counts / (2L+1)
  std::string flavor;               // "maxima" or "almost_maxima(K,sel)"
  long long boundary_excluded;      // eigenfunctions outside the trust region
};

/// Counts of localization centers of trusted eigenfunctions in [-L, L],
/// normalized by 2L+1, over the given grid of L.
DensityCurve center_density(const EigenSystem& sys,
                            const std::vector<long long>& L_grid);

/// Same, but each eigenfunction is represented by an almost maximum
/// (amplitude within 1/K of the global maximum), chosen adversarially.
DensityCurve almost_density(const EigenSystem& sys, double K,
                            const std::vector<long long>& L_grid,
                            AlmostMaxSelection sel);

/// Sum over trusted s with m_s in J and n in [win_lo, win_hi] of |phi_s(n)|^2.
double window_mass(const EigenSystem& sys, const std::vector<long long>& J,
                   long long win_lo, long long win_hi);

struct BoundsCheck {
  bool pass;
  double upper;  // 1 + b/(2 ln lambda) + tol
  double lower;  // 1 - b/ln lambda - tol
  /// per grid point: density and its distance inside the band (min of both
  /// sides; negative = violation)
  std::vector<std::pair<double, double>> margins;
};

/// Checks the density band lower <= density(L) <= upper at every grid L.
BoundsCheck density_bounds_check(const DensityCurve& curve, double b,
                                 double lambda, double tol);

void save_density_csv(const DensityCurve& curve, const std::string& path);
nlohmann::json bounds_check_to_json(const BoundsCheck& chk);

}  // namespace qplab
