#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qplab/arithmetic.hpp"
#include "qplab/bigfloat.hpp"

#include "json.hpp"

namespace qplab {

/// Bounded real sequence g: Z -> R.  Immutable and shareable; callback rules
/// must be pure functions of the site index.
class PotentialSpec {
 public:
  enum class Kind { almost_mathieu, table, callback };

  /// g(n) = 2 lambda cos(2 pi (theta + n alpha)).
  static PotentialSpec almost_mathieu(double lambda, TorusScalar alpha,
                                      TorusScalar theta);
  /// Finite table; access outside the stored window is an error.
  static PotentialSpec table(std::vector<double> values, long long offset);
  static PotentialSpec callback(std::function<double(long long)> fn,
                                double bound);

  /// Two-column CSV: site index, value.
  static PotentialSpec load_table_csv(const std::string& path);

  double eval(long long n) const;
  double bound() const { return bound_; }
  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const TorusScalar& alpha() const { return alpha_; }
  const TorusScalar& theta() const { return theta_; }
  /// Table window [lo, hi]; only valid for table kind.
  std::pair<long long, long long> window() const;

  nlohmann::json to_json() const;
  static PotentialSpec from_json(const nlohmann::json& j);

 private:
  PotentialSpec() = default;
  Kind kind_ = Kind::callback;
  double bound_ = 0.0;
  double lambda_ = 0.0;
  TorusScalar alpha_{BigFloat::kMinPrecision};
  TorusScalar theta_{BigFloat::kMinPrecision};
  std::vector<double> values_;
  long long offset_ = 0;
  std::function<double(long long)> fn_;
};

struct ReflectionScan {
  /// d_W(R T^n g, g) for |n| in [n_min, N].
  std::vector<std::pair<long long, double>> distances;
  long long window_W;
  std::vector<ExponentRecord> records;
  double estimate;  // max exponent over |n| >= n_min
  long long n_min;
};

/// Finite-window proxy for d(R T^n g, g): sup_{|m|<=W} |g(n-m) - g(m)|.
double reflection_distance(const PotentialSpec& g, long long n, long long W);

/// Finite-range estimate of the reflection exponent
/// delta(g) = limsup -ln d(R T^n g, g)/|n|.  Exact-zero distances are
/// degenerate (exact palindrome) and throw.
ReflectionScan delta_g(const PotentialSpec& g, long long N, long long W,
                       long long n_min = 20);

}  // namespace qplab
