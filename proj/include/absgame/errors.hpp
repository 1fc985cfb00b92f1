#ifndef ABSGAME_ERRORS_HPP
#define ABSGAME_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace absgame {

// Process exit codes shared by the CLI and the test drivers:
// 0 ok, 1 verification failed, 2 invalid spec/config, 3 precision exhausted.
enum class ExitCode : int {
  ok = 0,
  verification_failed = 1,
  invalid_spec = 2,
  precision_exhausted = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Invalid configuration: bad schema, out-of-range parameter, unusable map or
// target data, unsupported combination of features.
class SpecError : public Error {
 public:
  explicit SpecError(const std::string& what)
      : Error(ExitCode::invalid_spec, what) {}
};

// A ball comparison came out indeterminate where a decision was required.
// Never silently resolved; callers either deepen precision or abort.
class PrecisionExhausted : public Error {
 public:
  explicit PrecisionExhausted(const std::string& what)
      : Error(ExitCode::precision_exhausted, what) {}
};

// An a-posteriori check failed, or a certified internal invariant did not
// hold at run time (which indicates a miscomputed constant, not bad input).
class VerificationError : public Error {
 public:
  explicit VerificationError(const std::string& what)
      : Error(ExitCode::verification_failed, what) {}
};

// An orbit landed on a branch boundary: the point belongs to the countable
// exceptional set that avoidance statements exclude. Runs are flagged, not
// silently patched.
class BoundaryOrbitError : public Error {
 public:
  explicit BoundaryOrbitError(const std::string& what)
      : Error(ExitCode::verification_failed, what) {}
};

// A game move violated a legality predicate; `predicate()` names it.
class IllegalMoveError : public Error {
 public:
  IllegalMoveError(std::string predicate, const std::string& what)
      : Error(ExitCode::verification_failed, what),
        predicate_(std::move(predicate)) {}
  const std::string& predicate() const noexcept { return predicate_; }

 private:
  std::string predicate_;
};

}  // namespace absgame

#endif  // ABSGAME_ERRORS_HPP
