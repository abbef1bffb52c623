#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qplab/bigfloat.hpp"

#include "json.hpp"

namespace qplab {

/// Point on the torus R/Z held at arbitrary precision.
using TorusScalar = BigFloat;

/// Representative of x in [0,1).
TorusScalar torus_reduce(const TorusScalar& x);

/// dist(x, Z), in [0, 1/2].
TorusScalar torus_norm(const TorusScalar& x);
double torus_norm_d(const TorusScalar& x);

struct ContinuedFraction {
  TorusScalar alpha;
  std::vector<long long> partial_quotients;
  /// Convergents p_k/q_k, gcd(p_k,q_k)=1, q_k strictly increasing.
  std::vector<std::pair<long long, long long>> convergents;
  /// Set when the expansion terminated: alpha is rational at working precision.
  bool rational = false;
};

/// Expansion up to `depth` partial quotients or until precision (or the
/// 64-bit convergent range) is exhausted, whichever comes first.
ContinuedFraction continued_fraction(const TorusScalar& alpha, int depth);

struct DiophantineResult {
  bool satisfied;
  /// k minimizing ||k*alpha|| * k^kappa over 1 <= k <= N.
  long long worst_k;
  double worst_value;  // ||k* alpha|| * k*^kappa
  double worst_norm;   // ||k* alpha||
};

/// Checks ||k*alpha|| >= tau / k^kappa for all 1 <= k <= N by direct scan.
DiophantineResult diophantine_check(const ContinuedFraction& cf, double kappa,
                                    double tau, long long N);

struct ExponentRecord {
  long long n;
  double exponent;  // -ln||2theta + n alpha|| / |n|
};

struct DeltaEstimate {
  double b_hat;  // max exponent over records with |n| >= n_min
  std::vector<ExponentRecord> records;
  long long n_min;
};

/// Finite-range estimate of the arithmetic exponent
/// limsup_{|n|->inf} -ln||2theta + n alpha|| / |n|.
/// Throws DegenerateExactResonance when the torus norm vanishes exactly
/// (the exponent is +infinity there).
DeltaEstimate delta_alpha_theta(const TorusScalar& alpha,
                                const TorusScalar& theta, long long N,
                                long long n_min = 20);

struct WitnessBound {
  long long n;
  BigFloat lo, hi;  // certified enclosure of ||2theta + n alpha||
};

struct ResonanceCertificate {
  TorusScalar theta;
  TorusScalar alpha;
  double target_b;
  std::vector<WitnessBound> witnesses;
  /// eps_bar: verified ||2theta + n alpha|| >= e^{-(b+eps_bar)|n|} for all
  /// n_floor_min <= |n| <= n_max.
  double floor_exponent;
  long long n_max;
  long long n_floor_min;
  unsigned precision_bits;

  nlohmann::json to_json() const;
  static ResonanceCertificate from_json(const nlohmann::json& j);
};

/// Constructs a phase theta with prescribed resonance exponent b for the
/// frequency alpha, via nested intervals for 2theta, and certifies the
/// result by an independent linear re-scan over |n| <= n_max.
/// precision_bits = 0 auto-escalates to ceil(1.5*b*n_max/ln2) + 64 (min 512).
ResonanceCertificate construct_phase(const TorusScalar& alpha, double b,
                                     long long n_max,
                                     unsigned precision_bits = 0);

/// Re-runs the certifying scan of construct_phase on an existing certificate.
bool verify_certificate(const ResonanceCertificate& cert);

}  // namespace qplab
