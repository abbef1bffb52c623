#include "qplab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "qplab/errors.hpp"

namespace qplab {

PotentialSpec PotentialSpec::almost_mathieu(double lambda, TorusScalar alpha,
                                            TorusScalar theta) {
  PotentialSpec p;
  p.kind_ = Kind::almost_mathieu;
  p.lambda_ = lambda;
  p.alpha_ = std::move(alpha);
  p.theta_ = std::move(theta);
  p.bound_ = 2.0 * std::abs(lambda);
  return p;
}

PotentialSpec PotentialSpec::table(std::vector<double> values,
                                   long long offset) {
  if (values.empty()) throw ConfigError("PotentialSpec: empty table");
  PotentialSpec p;
  p.kind_ = Kind::table;
  p.values_ = std::move(values);
  p.offset_ = offset;
  p.bound_ = 0.0;
  for (double v : p.values_) p.bound_ = std::max(p.bound_, std::abs(v));
  return p;
}

PotentialSpec PotentialSpec::callback(std::function<double(long long)> fn,
                                      double bound) {
  PotentialSpec p;
  p.kind_ = Kind::callback;
  p.fn_ = std::move(fn);
  p.bound_ = bound;
  return p;
}

PotentialSpec PotentialSpec::load_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_table_csv: cannot open " + path);
  std::vector<std::pair<long long, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b))
      throw ConfigError("load_table_csv: malformed line '" + line + "'");
    rows.emplace_back(std::stoll(a), std::stod(b));
  }
  if (rows.empty()) throw ConfigError("load_table_csv: no rows in " + path);
  std::sort(rows.begin(), rows.end());
  long long lo = rows.front().first, hi = rows.back().first;
  if (hi - lo + 1 != static_cast<long long>(rows.size()))
    throw ConfigError("load_table_csv: site indices must be contiguous");
  std::vector<double> vals;
  vals.reserve(rows.size());
  for (auto& r : rows) vals.push_back(r.second);
  return table(std::move(vals), lo);
}

double PotentialSpec::eval(long long n) const {
  switch (kind_) {
    case Kind::almost_mathieu: {
      // phase reduced at TorusScalar precision, cosine taken in double
      double ph = BigFloat::frac(theta_ + alpha_ * n).to_double();
      return 2.0 * lambda_ * std::cos(2.0 * M_PI * ph);
    }
    case Kind::table: {
      long long i = n - offset_;
      if (i < 0 || i >= static_cast<long long>(values_.size()))
        throw OutOfWindow("PotentialSpec: table access at site " +
                          std::to_string(n) + " outside stored window");
      return values_[static_cast<size_t>(i)];
    }
    case Kind::callback:
      return fn_(n);
  }
  throw Error("PotentialSpec: bad kind");
}

std::pair<long long, long long> PotentialSpec::window() const {
  if (kind_ != Kind::table)
    throw ConfigError("PotentialSpec: window() is table-only");
  return {offset_, offset_ + static_cast<long long>(values_.size()) - 1};
}

nlohmann::json PotentialSpec::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  switch (kind_) {
    case Kind::almost_mathieu:
      j["kind"] = "almost_mathieu";
      j["lambda"] = lambda_;
      j["alpha"] = alpha_.to_string();
      j["theta"] = theta_.to_string();
      j["precision_bits"] = alpha_.precision();
      break;
    case Kind::table:
      j["kind"] = "table";
      j["offset"] = offset_;
      j["values"] = values_;
      break;
    case Kind::callback:
      throw ConfigError("PotentialSpec: callback rules do not serialize");
  }
  j["bound"] = bound_;
  return j;
}

PotentialSpec PotentialSpec::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "almost_mathieu") {
    unsigned prec = j.value("precision_bits", BigFloat::kDefaultPrecision);
    return almost_mathieu(
        j.at("lambda").get<double>(),
        BigFloat::from_string(j.at("alpha").get<std::string>(), prec),
        BigFloat::from_string(j.at("theta").get<std::string>(), prec));
  }
  if (kind == "table")
    return table(j.at("values").get<std::vector<double>>(),
                 j.at("offset").get<long long>());
  throw ConfigError("PotentialSpec: unknown kind '" + kind + "'");
}

double reflection_distance(const PotentialSpec& g, long long n, long long W) {
  if (W < 1) throw ConfigError("reflection_distance: W must be >= 1");
  double sup = 0.0;
  for (long long m = -W; m <= W; ++m)
    sup = std::max(sup, std::abs(g.eval(n - m) - g.eval(m)));
  return sup;
}

ReflectionScan delta_g(const PotentialSpec& g, long long N, long long W,
                       long long n_min) {
  if (N < 10) throw ConfigError("delta_g: N must be >= 10");
  if (W < N) throw ConfigError("delta_g: window W must dominate shift range N");

  // cache g over every site the scan touches: [-(N+W), N+W]
  const long long lo = -(N + W), hi = N + W;
  std::vector<double> cache(static_cast<size_t>(hi - lo + 1));
  for (long long s = lo; s <= hi; ++s)
    cache[static_cast<size_t>(s - lo)] = g.eval(s);
  auto at = [&](long long s) { return cache[static_cast<size_t>(s - lo)]; };

  ReflectionScan scan;
  scan.window_W = W;
  scan.n_min = n_min;
  scan.estimate = 0.0;
  double best_record = -std::numeric_limits<double>::infinity();
  for (long long m = 1; m <= N; ++m) {
    for (int dir = 0; dir < 2; ++dir) {
      long long n = dir == 0 ? m : -m;
      double sup = 0.0;
      for (long long k = -W; k <= W; ++k)
        sup = std::max(sup, std::abs(at(n - k) - at(k)));
      if (sup == 0.0)
        throw DegenerateExactPalindrome(
            "delta_g: exact reflection symmetry at shift " + std::to_string(n),
            n);
      scan.distances.emplace_back(n, sup);
      double e = -std::log(sup) / static_cast<double>(m);
      if (e > best_record) {
        best_record = e;
        scan.records.push_back({n, e});
      }
      if (m >= n_min) scan.estimate = std::max(scan.estimate, e);
    }
  }
  return scan;
}

}  // namespace qplab
