#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracsee {

/// Base class for every error raised by the library. `kind()` is the stable
/// machine-readable tag the CLI puts in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define FRACSEE_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

FRACSEE_DEFINE_ERROR(DomainError)
FRACSEE_DEFINE_ERROR(OverflowError)
FRACSEE_DEFINE_ERROR(ResolutionError)
FRACSEE_DEFINE_ERROR(OutOfRange)
FRACSEE_DEFINE_ERROR(ConfigError)
FRACSEE_DEFINE_ERROR(DelayViolation)
FRACSEE_DEFINE_ERROR(AdaptednessError)
FRACSEE_DEFINE_ERROR(UnresolvedDelay)
FRACSEE_DEFINE_ERROR(UnsupportedKernel)

#undef FRACSEE_DEFINE_ERROR

/// Picard iteration did not reach the tolerance. Carries the distance
/// recorded after every sweep so divergence can be diagnosed.
class MaxIterations : public Error {
 public:
  MaxIterations(const std::string& what, std::vector<double> distances)
      : Error("MaxIterations", what), distances_(std::move(distances)) {}
  const std::vector<double>& distances() const noexcept { return distances_; }

 private:
  std::vector<double> distances_;
};

/// Configuration parse failure at a known line and key.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, std::string key)
      : Error("ParseError", what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Every violated invariant of a configuration, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error("ValidationError", join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string out = "invalid configuration:";
    for (const auto& s : p) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> problems_;
};

}  // namespace fracsee
