#include "qplab/resonance.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "qplab/errors.hpp"

namespace qplab {

ResonanceSite find_resonance(const TorusScalar& theta, const TorusScalar& alpha,
                             long long radius) {
  if (radius < 1) throw ConfigError("find_resonance: radius must be >= 1");
  const unsigned prec = std::max(theta.precision(), alpha.precision());
  BigFloat two_theta(prec);
  mpfr_mul_2si(two_theta.raw(), theta.raw(), 1, MPFR_RNDN);

  // |sin pi y| is monotone in ||y||, so minimize the torus norm directly
  long long best_x = 0;
  BigFloat best = torus_norm(two_theta);
  BigFloat pos = torus_reduce(two_theta), neg = pos;
  for (long long m = 1; m <= radius; ++m) {
    pos = BigFloat::frac(pos + alpha);
    neg = BigFloat::frac(neg - alpha);
    for (int dir = 1; dir >= 0; --dir) {
      // negative x first at equal |x|
      long long x = dir == 1 ? -m : m;
      BigFloat v = torus_norm(dir == 1 ? neg : pos);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
  }
  double min_sin =
      BigFloat::abs(BigFloat::sin(best * BigFloat::pi(prec))).to_double();
  return {best_x, min_sin, radius};
}

double key_bound(long long ell, long long m_s, long long k0, double lambda,
                 double eta, double eps, std::optional<double> certified_sin) {
  if (lambda <= 1.0) throw ConfigError("key_bound: lambda must be > 1");
  if (ell == m_s) throw ConfigError("key_bound: ell must differ from m_s");
  const double ln_lambda = std::log(lambda);
  const double dist = static_cast<double>(std::llabs(ell - m_s));
  if ((ell - m_s) * k0 < 0) {
    return std::exp(-(ln_lambda - eps) * dist);
  }
  if (!(eta > 0.0 && eta < ln_lambda - eps))
    throw EtaOutOfRange("key_bound: need eta in (0, ln lambda - eps)");
  if (!certified_sin.has_value())
    throw HypothesisNotCertified(
        "key_bound: same-side case needs the certified sine value at the "
        "resonance");
  if (*certified_sin < std::exp(-eta * dist))
    throw HypothesisNotCertified(
        "key_bound: certified sine value sits below e^{-eta |ell - m_s|}");
  return std::exp(-(ln_lambda - eta - eps) * dist);
}

const char* decay_case_name(DecayCase c) {
  switch (c) {
    case DecayCase::opposite_side:
      return "opposite-side";
    case DecayCase::same_side_eta:
      return "same-side-eta";
    case DecayCase::nearest_resonance:
      return "nearest-resonance";
  }
  return "?";
}

namespace {

double u_norm(const EigenSystem& sys, int s, long long y) {
  double a = sys.in_window(y) ? sys.eigenvectors(sys.row(y), s) : 0.0;
  double b = sys.in_window(y - 1) ? sys.eigenvectors(sys.row(y - 1), s) : 0.0;
  return std::hypot(a, b);
}

}  // namespace

std::vector<DecayRow> verify_decay(const EigenSystem& sys,
                                   const ResonanceSite& site, double lambda,
                                   double eps, double slack, double amp_floor) {
  const double ln_lambda = std::log(lambda);
  const double scale = static_cast<double>(sys.trust_radius);
  std::vector<DecayRow> rows;
  for (int s = 0; s < sys.dim(); ++s) {
    if (!sys.trusted(s)) continue;
    const long long m_s = sys.centers[static_cast<size_t>(s)];
    const long long refl = site.L0 - m_s;
    const long long k0 = site.L0 - 2 * m_s;  // resonance relative to m_s
    const double u_center = u_norm(sys, s, m_s);
    const double u_refl = sys.in_window(refl) ? u_norm(sys, s, refl) : 0.0;
    for (long long ell = -sys.trust_radius; ell <= sys.trust_radius; ++ell) {
      if (ell == m_s) continue;
      double observed = std::abs(sys.eigenvectors(sys.row(ell), s));
      double t1 = u_center *
                  std::exp(-(ln_lambda - eps) *
                           static_cast<double>(std::llabs(ell - m_s)));
      double t2 = u_refl *
                  std::exp(-(ln_lambda - eps) *
                           static_cast<double>(std::llabs(ell - refl)));
      double predicted = std::exp(eps * scale) * std::max(t1, t2) * slack;
      if (predicted < amp_floor) continue;
      DecayCase tag;
      if ((ell - m_s) * k0 < 0)
        tag = DecayCase::opposite_side;
      else if (t2 > t1)
        tag = DecayCase::nearest_resonance;
      else
        tag = DecayCase::same_side_eta;
      double margin = (observed > 0 && predicted > 0)
                          ? std::log(predicted) - std::log(observed)
                          : std::numeric_limits<double>::infinity();
      rows.push_back(
          {s, ell, observed, predicted, tag, margin, observed <= predicted});
    }
  }
  return rows;
}

void save_decay_report_csv(const std::vector<DecayRow>& rows,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_decay_report_csv: cannot open " + path);
  out.precision(12);
  out << "s,ell,observed,predicted,case,margin,pass\n";
  for (const auto& r : rows)
    out << r.s << ',' << r.ell << ',' << r.observed << ',' << r.predicted
        << ',' << decay_case_name(r.tag) << ',' << r.margin << ','
        << (r.pass ? 1 : 0) << '\n';
}

PalindromeDefect palindrome_defect(const Eigen::VectorXd& u, long long offset,
                                   long long k_i) {
  const long long dim = u.size();
  auto at = [&](long long n) -> double {
    long long i = n - offset;
    if (i < 0 || i >= dim)
      throw OutOfWindow("palindrome_defect: site " + std::to_string(n) +
                        " outside window");
    return u(i);
  };
  // even k_i: m_i = k_i/2; odd: the site above the half-integer midpoint
  long long m = (k_i % 2 == 0) ? k_i / 2 : (k_i - 1) / 2 + 1;
  // Phi(m) = (u(m), u(m-1)); Phi_i(m) = (u(k_i - m), u(k_i - m + 1))
  double a0 = at(m), a1 = at(m - 1);
  double b0 = at(k_i - m), b1 = at(k_i - m + 1);
  double plus = std::hypot(a0 + b0, a1 + b1);
  double minus = std::hypot(a0 - b0, a1 - b1);
  PalindromeDefect r;
  r.phi_norm = std::hypot(a0, a1);
  if (minus <= plus) {
    r.iota = -1;
    r.defect = minus;
  } else {
    r.iota = +1;
    r.defect = plus;
  }
  return r;
}

}  // namespace qplab
