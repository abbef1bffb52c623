#pragma once

#include <stdexcept>
#include <string>

namespace qplab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfWindow : Error {
  using Error::Error;
};

struct PrecisionExhausted : Error {
  using Error::Error;
};

// ||2theta + n*alpha|| vanished exactly for some n != 0; delta(alpha,theta)
// is +infinity there and must not be reported as a float.
struct DegenerateExactResonance : Error {
  long long site;
  DegenerateExactResonance(const std::string& msg, long long n)
      : Error(msg), site(n) {}
};

struct DegenerateExactPalindrome : Error {
  long long site;
  DegenerateExactPalindrome(const std::string& msg, long long n)
      : Error(msg), site(n) {}
};

struct InfeasibleWindow : Error {
  using Error::Error;
};

struct ConvergenceFailure : Error {
  using Error::Error;
};

struct DegenerateFit : Error {
  using Error::Error;
};

struct EtaOutOfRange : Error {
  using Error::Error;
};

struct HypothesisNotCertified : Error {
  using Error::Error;
};

struct GridExceedsTrustRegion : Error {
  using Error::Error;
};

struct Overflow : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qplab
