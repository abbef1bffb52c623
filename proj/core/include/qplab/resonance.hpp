#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qplab/arithmetic.hpp"
#include "qplab/spectral.hpp"

namespace qplab {

struct ResonanceSite {
  long long L0;
  double min_sin;  // |sin pi(2 theta + L0 alpha)|
  long long search_radius;
};

/// Exhaustive scan of |sin pi(2 theta + x alpha)| over |x| <= radius at
/// TorusScalar precision; ties break to smallest |x|, negative first.
ResonanceSite find_resonance(const TorusScalar& theta, const TorusScalar& alpha,
                             long long radius);

/// Two-case eigenfunction decay bound on |phi_s(ell)| / |phi_s(m_s)|:
///  - ell and the resonance k0+m_s on opposite sides of m_s:
///      e^{-(ln lambda - eps)|ell - m_s|}
///  - same side, with a certified sine floor >= e^{-eta |ell - m_s|}:
///      e^{-(ln lambda - eta - eps)|ell - m_s|}
/// The same-side case requires the caller to supply the certified value of
/// |sin pi(2 theta + alpha(2 m_s + k0))|.
double key_bound(long long ell, long long m_s, long long k0, double lambda,
                 double eta, double eps,
                 std::optional<double> certified_sin = std::nullopt);

enum class DecayCase { opposite_side, same_side_eta, nearest_resonance };

struct DecayRow {
  int s;
  long long ell;
  double observed;
  double predicted;  // includes the slack factor
  DecayCase tag;
  double margin;  // ln(predicted) - ln(observed); >= 0 means pass
  bool pass;
};

const char* decay_case_name(DecayCase c);

/// Nearest-resonance decay verifier over all trusted eigenfunctions:
/// |phi_s(ell)| <= e^{eps k} max{ ||U(m_s)|| e^{-(ln lambda - eps)|ell-m_s|},
///                                ||U(L0-m_s)|| e^{-(ln lambda - eps)|ell-(L0-m_s)|} } * slack
/// with k the trust radius.  Failures are rows, not exceptions.  Sites whose
/// predicted bound drops below amp_floor are skipped: double-precision
/// eigenvectors bottom out at rounding noise there and carry no signal.
std::vector<DecayRow> verify_decay(const EigenSystem& sys,
                                   const ResonanceSite& site, double lambda,
                                   double eps, double slack,
                                   double amp_floor = 1e-12);

void save_decay_report_csv(const std::vector<DecayRow>& rows,
                           const std::string& path);

struct PalindromeDefect {
  int iota;       // sign achieving the minimum
  double defect;  // min over iota of ||Phi(m_i) + iota Phi_i(m_i)||
  double phi_norm;  // ||Phi(m_i)||
};

/// Mismatch between the eigensolution 2-vector and its reflection about
/// k_i/2 (even k_i) or the shifted site for odd k_i.
PalindromeDefect palindrome_defect(const Eigen::VectorXd& u, long long offset,
                                   long long k_i);

}  // namespace qplab
