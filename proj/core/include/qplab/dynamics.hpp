#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qplab/spectral.hpp"

namespace qplab {

/// (delta_n, e^{-itH} delta_m) in the truncated eigenbasis:
/// sum_s e^{-it E_s} phi_s(n) phi_s(m).
std::complex<double> amplitude(const EigenSystem& sys, long long n, long long m,
                               double t);

/// Full row over all window sites at once (one matrix-vector product).
Eigen::VectorXcd amplitude_row(const EigenSystem& sys, long long m, double t);

struct SupAmplitude {
  double sampled_sup;      // max over the time grid
  double eigenbasis_bound; // sum_s |phi_s(n) phi_s(m)|, valid for all t
};

/// Brackets sup_t |amplitude|: sampled max from below, eigenbasis sum from
/// above.
SupAmplitude sup_amplitude(const EigenSystem& sys, long long n, long long m,
                           const std::vector<double>& t_grid);

/// sum_n |n|^p |amplitude(n, source, t)|^2.
double moment(const EigenSystem& sys, double p, double t, long long source);

struct SudlFit {
  long long m;
  double prefactor;  // C-hat from the exponential fit of sup-amplitude
  double rate;       // gamma-hat; +inf when the site is decoupled
  double stat;       // ln(C-hat) / |m|, 0 at m = 0
  int points;
  bool decoupled;
};

/// Per-source exponential fit sup_t|amplitude(n,m,t)| ~ C_m e^{-gamma|n-m|}
/// over |n-m| in [tail_lo, tail_hi].  Uses the sampled sup over t_grid.
std::vector<SudlFit> sudl_profile(const EigenSystem& sys,
                                  const std::vector<long long>& m_list,
                                  long long tail_lo, long long tail_hi,
                                  const std::vector<double>& t_grid);

/// |sum_n |amplitude(n,m,t)|^2 - 1|.
double unitarity_defect(const EigenSystem& sys, long long m, double t);

/// Eigenvalue gaps below gap_tol; sup-over-t sampling converges slowly there.
std::vector<int> near_degenerate_pairs(const EigenSystem& sys,
                                       double gap_tol = 1e-12);

/// {0, dt, 2dt, ..., <= T} with dt = 0.1 / ||H||_bound (Gershgorin).
std::vector<double> uniform_time_grid(const EigenSystem& sys, double T,
                                      std::size_t max_points = 100000);
/// {0, t_min, ..., T} geometric, count interior points.
std::vector<double> geometric_time_grid(double t_min, double T, int count);

void save_sudl_csv(const std::vector<SudlFit>& fits, const std::string& path);

}  // namespace qplab
