#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace apc {

/// Raised when an input lies outside the domain an operation is defined on.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Raised when the K0 fixed-point iteration leaves the positive half-line.
/// Carries the iterates produced so far.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}

  const std::vector<double>& trace() const noexcept { return trace_; }

private:
  std::vector<double> trace_;
};

/// Raised by the numerical oracles (bracketing failure, malformed tables).
class OracleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

}  // namespace detail
}  // namespace apc
