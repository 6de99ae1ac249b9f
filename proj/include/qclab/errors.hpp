#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qclab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (r <= 0, unordered chain, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A landmark of the potential could not be bracketed.
class ProfileError : public Error {
 public:
  ProfileError(std::string landmark, const std::string& what)
      : Error(what), landmark_(std::move(landmark)) {}
  const std::string& landmark() const { return landmark_; }

 private:
  std::string landmark_;
};

/// Scalar root finder was handed an interval without a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Mesh layout violates the single-atomistic-region invariants.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver stopped without meeting its tolerance. Carries the last iterate.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> last_iterate)
      : Error(what), last_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const { return last_; }

 private:
  std::vector<double> last_;
};

/// Inner minimization broke down. fracture() is set when a spacing passed the
/// fracture threshold; element() is the offending element (or 0 when not applicable).
class InnerFailure : public NonConvergence {
 public:
  InnerFailure(const std::string& what, std::vector<double> last_iterate, bool fracture, int element)
      : NonConvergence(what, std::move(last_iterate)), fracture_(fracture), element_(element) {}
  bool fracture() const { return fracture_; }
  int element() const { return element_; }

 private:
  bool fracture_;
  int element_;
};

/// Contraction hypotheses do not hold (nonpositive denominator, window outside the admissible range).
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// The loading equation has no solution (load at or beyond the load limit).
class NoSolution : public Error {
 public:
  using Error::Error;
};

/// No contraction window exists at the requested load.
class WindowExhausted : public Error {
 public:
  using Error::Error;
};

/// Planner could not advance the load with a positive admissible step.
class StallError : public Error {
 public:
  StallError(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Plan precondition violated (e.g. tolerance larger than the contraction radius).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A plan rewrite was requested where it does not apply.
class RewriteInapplicable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qclab
