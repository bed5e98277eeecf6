#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace polarbound {

/// Input rejected by a validating constructor. `index` names the offending
/// list position when there is one.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(const std::string& what, std::ptrdiff_t index = -1)
      : std::invalid_argument(what), index_(index) {}
  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

/// A bound was requested outside the setting it is stated for (e.g. a
/// rank-equal formula on r != s).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exhaustive enumeration would exceed the caller's budget or cap.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t required)
      : std::runtime_error(what), required_(required) {}
  std::uint64_t required() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

class SvdFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CompletionInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested supremum is approached but not attained (F = 2G for the
/// positive-factor upper bound).
class DegenerateSupremum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A recomputed identity disagreed with its closed form.
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polarbound
