#pragma once

#include <stdexcept>
#include <string>

namespace symflow {

/// Failure categories. The CLI maps each one to its own exit code.
enum class ErrorCategory {
  Config,       ///< invalid input or configuration
  Hypothesis,   ///< a mathematical hypothesis fails (e.g. a non-hyperbolic limit)
  Numerical,    ///< a numerical procedure could not certify its result
  Mismatch,     ///< an asserted identity does not hold
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class RankDeficient : public Error {
 public:
  explicit RankDeficient(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class NotLagrangian : public Error {
 public:
  explicit NotLagrangian(const std::string& what) : Error(ErrorCategory::Hypothesis, what) {}
};

class NotHyperbolic : public Error {
 public:
  explicit NotHyperbolic(const std::string& what) : Error(ErrorCategory::Hypothesis, what) {}
};

/// A hypothesis of a theorem (rather than of a single computation) is not met.
class HypothesisViolation : public Error {
 public:
  explicit HypothesisViolation(const std::string& what) : Error(ErrorCategory::Hypothesis, what) {}
};

/// Both sides of an asserted identity were computed and differ.
class IdentityMismatch : public Error {
 public:
  explicit IdentityMismatch(const std::string& what) : Error(ErrorCategory::Mismatch, what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

/// A crossing interval is not isolated (e.g. the two paths coincide on an interval).
class UnresolvedCrossing : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// A crossing operator is singular; the epsilon-shifted route has to be used.
class DegenerateCrossing : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class StepUnderflow : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class HorizonTooSmall : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class WindowSearchFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace symflow
