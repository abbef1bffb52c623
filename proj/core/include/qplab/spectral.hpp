#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "qplab/potential.hpp"

namespace qplab {

/// Dirichlet truncation of H_g to a window of sites; symmetric tridiagonal
/// with unit off-diagonals.
struct Truncation {
  long long offset;      // site index of matrix row 0
  Eigen::VectorXd diag;  // g over the window

  int dim() const { return static_cast<int>(diag.size()); }
  long long first_site() const { return offset; }
  long long last_site() const { return offset + dim() - 1; }
};

/// Symmetric window [-L, L]; trust region defaults to half-width L/2.
Truncation build_truncation(const PotentialSpec& g, long long L);
/// Arbitrary window [lo, hi].
Truncation build_truncation_window(const PotentialSpec& g, long long lo,
                                   long long hi);

struct EigenSystem {
  long long offset;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns
  double residual_max;
  long long trust_radius;  // centers with |m_s| <= trust_radius are trusted
  std::vector<long long> centers;  // localization center per eigenvector
  std::vector<char> trusted_flags;
  /// Set for members of a near-degenerate pair (gap below the rotation
  /// threshold); their vectors span the right subspace but the individual
  /// directions carry no spectral meaning.
  std::vector<char> degenerate_flags;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  long long site(int row) const { return offset + row; }
  int row(long long s) const;
  bool in_window(long long s) const {
    return s >= offset && s < offset + dim();
  }
  bool trusted(int s) const { return trusted_flags[static_cast<size_t>(s)] != 0; }
  bool degenerate(int s) const {
    return degenerate_flags[static_cast<size_t>(s)] != 0;
  }
  int trusted_count() const;
};

/// Full eigendecomposition (implicit-shift QR on the tridiagonal form, with
/// a bisection + inverse-iteration fallback).  Computes residuals, centers,
/// and the trust flags.
///
/// Pairs with eigenvalue gap below degenerate_gap span a numerically
/// degenerate 2D space; within it any orthogonal basis is equally valid, so
/// the pair is rotated to the maximally localized combination (symmetric
/// potentials otherwise yield arbitrary mixtures of the two wells).  The
/// rotation moves pointwise residuals by at most the gap.
EigenSystem eigendecompose(const Truncation& t, int max_dim = 4001,
                           long long trust_radius = -1,
                           double degenerate_gap = 1e-8);

/// Site of the global maximum of |phi|; ties break to the smallest |site|,
/// negative first.
long long localization_center(const Eigen::VectorXd& phi, long long offset);

/// { n : |phi(n)| >= max|phi| / K }.
std::vector<long long> almost_maxima(const Eigen::VectorXd& phi,
                                     long long offset, double K);

struct DecayFit {
  double rate;      // gamma-hat
  double residual;  // RMS of the linear fit
  int points;
};

/// Least-squares slope of ln|phi(n)| against -|n - m_s| over sites with
/// |n - m_s| in [tail_lo, tail_hi] (both sides, clipped to the window).
/// Entries at or below amp_floor are dropped: double-precision eigenvectors
/// bottom out at rounding noise ~1e-16 (rare excursions to ~1e-14), and a
/// flat noise tail wrecks the slope.
DecayFit decay_fit(const Eigen::VectorXd& phi, long long offset, long long m_s,
                   long long tail_lo, long long tail_hi,
                   double amp_floor = 1e-12);

/// One-sided variant: only sites with sign(n - m_s) == side.
DecayFit decay_fit_one_sided(const Eigen::VectorXd& phi, long long offset,
                             long long m_s, long long tail_lo,
                             long long tail_hi, int side,
                             double amp_floor = 1e-12);

/// C_s = max_n |phi(n)| e^{gamma |n - m_s|} over sites in [lo, hi].  Entries
/// at or below amp_floor are rounding noise and are skipped (see decay_fit).
double sule_constant(const Eigen::VectorXd& phi, long long offset,
                     long long m_s, double gamma, long long lo, long long hi,
                     double amp_floor = 1e-12);

/// CSV dump: one line per eigenpair, eigenvalue then vector entries.
void save_eigensystem_csv(const EigenSystem& sys, const std::string& path);
/// Binary dump, little-endian: int64 dim, int64 offset, then per eigenpair
/// the eigenvalue followed by dim vector entries, all float64.
void save_eigensystem_bin(const EigenSystem& sys, const std::string& path);

}  // namespace qplab
