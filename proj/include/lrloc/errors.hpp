#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lrloc {

/// Invalid argument or precondition violation (bad spec, out-of-range index, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Numerical failure: solver did not converge, step budget exhausted, ...
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what, std::uint64_t seed = 0)
      : std::runtime_error(what), seed_(seed) {}
  std::uint64_t seed() const noexcept { return seed_; }

private:
  std::uint64_t seed_;
};

/// An ensemble did not meet its convergence rule. A DomainError, since the
/// caller asked for a classification the data cannot support yet.
class UnconvergedError : public DomainError {
public:
  using DomainError::DomainError;
};

}  // namespace lrloc
