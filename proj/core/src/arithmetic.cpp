#include "qplab/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qplab/errors.hpp"

namespace qplab {

TorusScalar torus_reduce(const TorusScalar& x) { return BigFloat::frac(x); }

TorusScalar torus_norm(const TorusScalar& x) {
  BigFloat r = BigFloat::frac(x);
  BigFloat one_minus(r.precision());
  mpfr_ui_sub(one_minus.raw(), 1, r.raw(), MPFR_RNDN);
  return BigFloat::min(r, one_minus);
}

double torus_norm_d(const TorusScalar& x) { return torus_norm(x).to_double(); }

namespace {

// -ln(v)/n with v a torus norm; falls back to mpfr when v underflows double.
double neg_log_over(const BigFloat& v, long long n) {
  double d = v.to_double();
  if (d > 0.0 && std::isfinite(d)) return -std::log(d) / static_cast<double>(n);
  return -BigFloat::log(v).to_double() / static_cast<double>(n);
}

}  // namespace

ContinuedFraction continued_fraction(const TorusScalar& alpha, int depth) {
  if (depth < 1) throw ConfigError("continued_fraction: depth must be >= 1");
  ContinuedFraction cf{alpha, {}, {}, false};
  const unsigned prec = alpha.precision();
  // quotients beyond this are indistinguishable from a rational termination
  const long long quotient_cap = 1LL << 40;

  BigFloat x = alpha;
  long long p_prev = 1, q_prev = 0;  // p_{-1}, q_{-1}
  long long p_cur = 0, q_cur = 1;    // virtual p_0 = a_0 handled in loop
  bool first = true;
  for (int k = 0; k < depth + 1; ++k) {
    BigFloat fl = BigFloat::floor(x);
    long long a = fl.to_ll();
    BigFloat rem = x - fl;
    if (k > 0) {
      if (a >= quotient_cap) {
        cf.rational = true;
        break;
      }
      // p_k = a_k p_{k-1} + p_{k-2}, same for q; guard 64-bit range
      if (q_prev > (std::numeric_limits<long long>::max() - q_cur) / a)
        throw PrecisionExhausted(
            "continued_fraction: convergent denominator exceeds 64-bit range");
      long long p_new = a * p_cur + p_prev;
      long long q_new = a * q_cur + q_prev;
      p_prev = p_cur;
      q_prev = q_cur;
      p_cur = p_new;
      q_cur = q_new;
      cf.partial_quotients.push_back(a);
      cf.convergents.emplace_back(p_cur, q_cur);
    } else {
      // integer part a_0 folded into p; torus applications use a_0 = floor
      p_cur = a;
      q_cur = 1;
      p_prev = 1;
      q_prev = 0;
      first = false;
    }
    (void)first;
    if (rem.is_zero()) {
      cf.rational = true;
      break;
    }
    // remainder at the precision floor: treat as rational at working precision
    BigFloat thresh(1.0, prec);
    mpfr_mul_2si(thresh.raw(), thresh.raw(), -static_cast<long>(prec / 2),
                 MPFR_RNDN);
    if (BigFloat::abs(rem) < thresh) {
      cf.rational = true;
      break;
    }
    BigFloat inv(prec);
    mpfr_ui_div(inv.raw(), 1, rem.raw(), MPFR_RNDN);
    x = inv;
  }
  return cf;
}

DiophantineResult diophantine_check(const ContinuedFraction& cf, double kappa,
                                    double tau, long long N) {
  if (kappa <= 0 || tau <= 0 || N < 1)
    throw ConfigError("diophantine_check: require kappa>0, tau>0, N>=1");
  const BigFloat& alpha = cf.alpha;
  const unsigned prec = alpha.precision();
  BigFloat r(0.0, prec);
  DiophantineResult res{true, 0, std::numeric_limits<double>::infinity(), 0.0};
  // certification slack: N accumulated additions at 2^(1-prec) each
  const double cert_err =
      std::ldexp(static_cast<double>(N) + 2.0, 1 - static_cast<int>(prec));
  for (long long k = 1; k <= N; ++k) {
    r = BigFloat::frac(r + alpha);
    double nrm = torus_norm_d(r);
    double bound = tau / std::pow(static_cast<double>(k), kappa);
    if (std::abs(nrm - bound) <= cert_err)
      throw PrecisionExhausted(
          "diophantine_check: ||k alpha|| too close to tau/k^kappa to certify");
    if (nrm < bound) res.satisfied = false;
    double val = nrm * std::pow(static_cast<double>(k), kappa);
    if (val < res.worst_value) {
      res.worst_value = val;
      res.worst_k = k;
      res.worst_norm = nrm;
    }
  }
  return res;
}

DeltaEstimate delta_alpha_theta(const TorusScalar& alpha,
                                const TorusScalar& theta, long long N,
                                long long n_min) {
  if (N < 10) throw ConfigError("delta_alpha_theta: N must be >= 10");
  const unsigned prec = std::max(alpha.precision(), theta.precision());
  BigFloat a(prec), x0(prec);
  mpfr_set(a.raw(), alpha.raw(), MPFR_RNDN);
  mpfr_mul_2si(x0.raw(), theta.raw(), 1, MPFR_RNDN);  // 2 theta
  x0 = torus_reduce(x0);

  DeltaEstimate est{0.0, {}, n_min};
  double best_record = -std::numeric_limits<double>::infinity();
  BigFloat pos = x0, neg = x0;
  for (long long m = 1; m <= N; ++m) {
    pos = BigFloat::frac(pos + a);
    neg = BigFloat::frac(neg - a);
    for (int dir = 0; dir < 2; ++dir) {
      long long n = dir == 0 ? m : -m;
      BigFloat v = torus_norm(dir == 0 ? pos : neg);
      if (v.is_zero())
        throw DegenerateExactResonance(
            "delta_alpha_theta: exact resonance (delta = +infinity)", n);
      double e = neg_log_over(v, m);
      if (e > best_record) {
        best_record = e;
        est.records.push_back({n, e});
      }
      if (m >= n_min) est.b_hat = std::max(est.b_hat, e);
    }
  }
  return est;
}

// ---------------------------------------------------------------------------
// construct_phase
// ---------------------------------------------------------------------------

namespace {

struct Interval {
  BigFloat lo, hi;
  BigFloat width() const { return hi - lo; }
};

// Disjoint sorted subintervals of [0,1).
class IntervalSet {
 public:
  explicit IntervalSet(Interval iv) { ivs_.push_back(std::move(iv)); }

  bool empty() const { return ivs_.empty(); }
  const std::vector<Interval>& intervals() const { return ivs_; }

  // Removes the open arc (c-r, c+r) mod 1.
  void subtract_ball(const BigFloat& c, const BigFloat& r) {
    subtract_linear(c - r, c + r);
    BigFloat lo = c - r, hi = c + r;
    if (lo.sign() < 0) subtract_linear(lo + 1.0, hi + 1.0);
    if (hi.cmp(1.0) > 0) subtract_linear(lo - 1.0, hi - 1.0);
  }

  // Intersections of the arc (lo, hi) mod 1 with the set.
  std::vector<Interval> clip(const BigFloat& lo, const BigFloat& hi) const {
    std::vector<Interval> out;
    clip_linear(lo, hi, out);
    if (lo.sign() < 0) clip_linear(lo + 1.0, hi + 1.0, out);
    if (hi.cmp(1.0) > 0) clip_linear(lo - 1.0, hi - 1.0, out);
    return out;
  }

  Interval widest() const {
    const Interval* best = &ivs_.front();
    for (const auto& iv : ivs_)
      if (iv.width() > best->width()) best = &iv;
    return *best;
  }

 private:
  void subtract_linear(const BigFloat& lo, const BigFloat& hi) {
    if (ivs_.empty() || hi <= lo) return;
    std::vector<Interval> next;
    next.reserve(ivs_.size() + 1);
    for (auto& iv : ivs_) {
      if (iv.hi <= lo || iv.lo >= hi) {
        next.push_back(std::move(iv));
        continue;
      }
      if (iv.lo < lo) next.push_back({iv.lo, BigFloat::min(iv.hi, lo)});
      if (iv.hi > hi) next.push_back({BigFloat::max(iv.lo, hi), iv.hi});
    }
    ivs_ = std::move(next);
  }

  void clip_linear(const BigFloat& lo, const BigFloat& hi,
                   std::vector<Interval>& out) const {
    for (const auto& iv : ivs_) {
      BigFloat a = BigFloat::max(iv.lo, lo);
      BigFloat b = BigFloat::min(iv.hi, hi);
      if (a < b) out.push_back({a, b});
    }
  }

  std::vector<Interval> ivs_;
};

BigFloat exp_of(double x, unsigned prec) {
  return BigFloat::exp(BigFloat(x, prec));
}

}  // namespace

ResonanceCertificate construct_phase(const TorusScalar& alpha, double b,
                                     long long n_max,
                                     unsigned precision_bits) {
  if (b < 0) throw ConfigError("construct_phase: b must be >= 0");
  if (n_max < 8) throw ConfigError("construct_phase: n_max must be >= 8");
  const double ln2 = std::log(2.0);
  const unsigned required = static_cast<unsigned>(
      std::ceil(1.05 * b * static_cast<double>(n_max) / ln2)) + 32;
  unsigned prec;
  if (precision_bits == 0) {
    prec = std::max<unsigned>(
        512, static_cast<unsigned>(
                 std::ceil(1.5 * b * static_cast<double>(n_max) / ln2)) + 64);
  } else {
    if (precision_bits < required)
      throw PrecisionExhausted(
          "construct_phase: e^{-b n_max} not representable with guard digits "
          "at the requested precision");
    prec = precision_bits;
  }
  if (alpha.precision() < prec)
    throw PrecisionExhausted(
        "construct_phase: alpha carries fewer bits than the working precision");

  const long long n_min = 20;
  ResonanceCertificate cert;
  cert.alpha = alpha;
  cert.target_b = b;
  cert.n_max = n_max;
  cert.precision_bits = prec;

  if (b == 0.0) {
    // theta = 0: resonances of 2theta + n alpha are those of n alpha alone.
    cert.theta = BigFloat(0.0, prec);
    cert.n_floor_min = n_min;
    DeltaEstimate d = delta_alpha_theta(alpha, cert.theta, n_max, n_min);
    cert.floor_exponent = d.b_hat;
    return cert;
  }

  const double eps_bar = 0.05 * b;
  // the cutoff must leave the floor-ball union under measure 1/2, or small b
  // lets the excluded arcs cover the whole circle
  const double rate = 1.05 * b;
  const double feasible =
      std::log(8.0 / (1.0 - std::exp(-rate))) / rate;
  long long n_floor_min = std::max<long long>(
      n_min, static_cast<long long>(
                 std::ceil(std::max(std::log(2.5) / rate, feasible))));
  cert.n_floor_min = n_floor_min;

  // Admissible set for x = 2theta. Margins keep us off the wrap seam.
  BigFloat seam(1.0, prec);
  mpfr_mul_2si(seam.raw(), seam.raw(), -24, MPFR_RNDN);
  IntervalSet A(Interval{seam, BigFloat(1.0, prec) - seam});

  // Floor constraints: ||x + n alpha|| >= e^{-(b+eps_bar)|n|}, both signs.
  BigFloat tiny(1.0, prec);
  mpfr_mul_2si(tiny.raw(), tiny.raw(), -static_cast<long>(prec / 2),
               MPFR_RNDN);
  {
    BigFloat cpos(0.0, prec), cneg(0.0, prec);  // frac(-n a), frac(+n a)
    for (long long n = 1; n <= n_max; ++n) {
      cpos = BigFloat::frac(cpos - alpha);
      cneg = BigFloat::frac(cneg + alpha);
      BigFloat radius =
          (n < n_floor_min)
              ? tiny
              : exp_of(-(b + eps_bar) * static_cast<double>(n), prec) *
                    (1.0 + 1e-6);
      A.subtract_ball(cpos, radius);
      A.subtract_ball(cneg, radius);
      if (A.empty())
        throw InfeasibleWindow(
            "construct_phase: floor constraints leave no admissible phase");
    }
  }

  // Witness steps: nested intervals, n_{j+1} >= 2 n_j.
  // Witnesses below the measurement cutoff are invisible to the finite-range
  // exponent scan, and letting them shrink the admissible set early can leave
  // nothing for the measurable scales; start the ladder at the cutoff.
  const long long n_start = std::max<long long>(
      n_floor_min, static_cast<long long>(std::ceil(std::log(8.0) / b)));
  long long prev = 0;
  std::vector<long long> witness_times;
  while (true) {
    long long from = std::max(n_start, 2 * prev);
    if (from > n_max) break;
    long long chosen = 0;
    Interval chosen_piece{BigFloat(0.0, prec), BigFloat(0.0, prec)};
    BigFloat chosen_width(0.0, prec);
    for (int pass = 0; pass < 2 && chosen == 0; ++pass) {
      BigFloat c = BigFloat::frac(alpha * (-from));
      for (long long n = from; n <= n_max; ++n) {
        if (n > from) c = BigFloat::frac(c - alpha);
        double nn = static_cast<double>(n);
        BigFloat e1 = exp_of(-b * nn, prec);
        BigFloat hi = e1 * std::min(2.0, std::exp(eps_bar * nn));
        BigFloat target_w = hi - e1;
        // window preimage: x in (c+e1, c+hi) u (c-hi, c-e1) mod 1
        std::vector<Interval> pieces = A.clip(c + e1, c + hi);
        auto more = A.clip(c - hi, c - e1);
        pieces.insert(pieces.end(), more.begin(), more.end());
        for (const auto& p : pieces) {
          BigFloat w = p.width();
          bool good = pass == 0 ? (w >= target_w * 0.3) : (w > chosen_width);
          if (good && w > chosen_width) {
            chosen = n;
            chosen_piece = p;
            chosen_width = w;
          }
        }
        if (pass == 0 && chosen != 0) break;
      }
    }
    if (chosen == 0) break;
    A = IntervalSet(chosen_piece);
    witness_times.push_back(chosen);
    prev = chosen;
  }

  bool has_measurable = false;
  for (long long n : witness_times)
    if (n >= n_floor_min) has_measurable = true;
  if (!has_measurable)
    throw InfeasibleWindow(
        "construct_phase: no witness time at or beyond the measurement "
        "cutoff; retry with larger n_max");

  Interval final_iv = A.widest();
  BigFloat x = (final_iv.lo + final_iv.hi) * 0.5;
  BigFloat theta(prec);
  mpfr_mul_2si(theta.raw(), x.raw(), -1, MPFR_RNDN);
  cert.theta = theta;
  cert.floor_exponent = eps_bar;

  // Independent certifying re-scan before the certificate is emitted.
  {
    BigFloat pos = x, neg = x;
    std::vector<long long> wit_sorted = witness_times;
    for (long long m = 1; m <= n_max; ++m) {
      pos = BigFloat::frac(pos + alpha);
      neg = BigFloat::frac(neg - alpha);
      bool is_witness =
          std::find(wit_sorted.begin(), wit_sorted.end(), m) != wit_sorted.end();
      BigFloat vpos = torus_norm(pos);
      BigFloat vneg = torus_norm(neg);
      if (vpos.is_zero() || vneg.is_zero())
        throw InfeasibleWindow("construct_phase: exact resonance slipped in");
      double mm = static_cast<double>(m);
      if (is_witness) {
        BigFloat e1 = exp_of(-b * mm, prec);
        BigFloat hi = e1 * std::min(2.0, std::exp(eps_bar * mm));
        if (vpos < e1 || vpos > hi)
          throw InfeasibleWindow(
              "construct_phase: witness interval failed verification");
        // certified enclosure: relative 2^(1-prec) per op, n_max ops
        double rel = std::ldexp(static_cast<double>(n_max) + 4.0,
                                1 - static_cast<int>(prec));
        cert.witnesses.push_back(
            {m, vpos * (1.0 - rel), vpos * (1.0 + rel)});
      } else if (m >= n_floor_min) {
        BigFloat floor_b = exp_of(-(b + eps_bar) * mm, prec);
        if (vpos < floor_b || vneg < floor_b)
          throw InfeasibleWindow(
              "construct_phase: floor bound failed verification");
      }
      if (is_witness && m >= n_floor_min) {
        BigFloat floor_b = exp_of(-(b + eps_bar) * mm, prec);
        if (vneg < floor_b)
          throw InfeasibleWindow(
              "construct_phase: floor bound failed verification");
      }
    }
  }
  return cert;
}

bool verify_certificate(const ResonanceCertificate& cert) {
  const unsigned prec = cert.precision_bits;
  BigFloat x(prec);
  mpfr_mul_2si(x.raw(), cert.theta.raw(), 1, MPFR_RNDN);
  x = torus_reduce(x);
  const double b = cert.target_b;
  const double eps = cert.floor_exponent;
  BigFloat pos = x, neg = x;
  for (long long m = 1; m <= cert.n_max; ++m) {
    pos = BigFloat::frac(pos + cert.alpha);
    neg = BigFloat::frac(neg - cert.alpha);
    BigFloat vpos = torus_norm(pos);
    BigFloat vneg = torus_norm(neg);
    if (vpos.is_zero() || vneg.is_zero()) return false;
    const WitnessBound* w = nullptr;
    for (const auto& wb : cert.witnesses)
      if (wb.n == m) w = &wb;
    if (w != nullptr) {
      if (vpos < w->lo || vpos > w->hi) return false;
      if (b > 0) {
        BigFloat flo = exp_of(-(b + eps) * static_cast<double>(m), prec);
        BigFloat fhi = exp_of(-(b - eps) * static_cast<double>(m), prec);
        if (w->lo < flo || w->hi > fhi) return false;
      }
    }
    if (b > 0 && m >= cert.n_floor_min) {
      BigFloat floor_b = exp_of(-(b + eps) * static_cast<double>(m), prec);
      if ((w == nullptr && vpos < floor_b) || vneg < floor_b) return false;
    }
  }
  return true;
}

nlohmann::json ResonanceCertificate::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["precision_bits"] = precision_bits;
  j["theta"] = theta.to_string();
  j["alpha"] = alpha.to_string();
  j["target_b"] = target_b;
  j["floor_exponent"] = floor_exponent;
  j["n_max"] = n_max;
  j["n_floor_min"] = n_floor_min;
  j["witness_times"] = nlohmann::json::array();
  j["witness_bounds"] = nlohmann::json::array();
  for (const auto& w : witnesses) {
    j["witness_times"].push_back(w.n);
    j["witness_bounds"].push_back(
        {{"n", w.n}, {"lo", w.lo.to_string()}, {"hi", w.hi.to_string()}});
  }
  return j;
}

ResonanceCertificate ResonanceCertificate::from_json(const nlohmann::json& j) {
  ResonanceCertificate c;
  c.precision_bits = j.at("precision_bits").get<unsigned>();
  c.theta = BigFloat::from_string(j.at("theta").get<std::string>(),
                                  c.precision_bits);
  c.alpha = BigFloat::from_string(j.at("alpha").get<std::string>(),
                                  c.precision_bits);
  c.target_b = j.at("target_b").get<double>();
  c.floor_exponent = j.at("floor_exponent").get<double>();
  c.n_max = j.at("n_max").get<long long>();
  c.n_floor_min = j.at("n_floor_min").get<long long>();
  for (const auto& wb : j.at("witness_bounds")) {
    c.witnesses.push_back(
        {wb.at("n").get<long long>(),
         BigFloat::from_string(wb.at("lo").get<std::string>(),
                               c.precision_bits),
         BigFloat::from_string(wb.at("hi").get<std::string>(),
                               c.precision_bits)});
  }
  return c;
}

}  // namespace qplab
