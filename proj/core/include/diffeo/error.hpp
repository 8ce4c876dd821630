#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diffeo {

enum class ErrorCode {
  kShapeMismatch,
  kNonScalarTarget,
  kExpansionPointMismatch,
  kDomainError,
  kOrderExceeded,
  kBasepointMismatch,
  kRadiusExceeded,
  kProbeDomainError,
  kMembershipViolation,
  kUnsupportedGroup,
  kUnreachablePoint,
  kNonLinearTangent,
  kBaseMismatch,
  kAlgebraNotClosed,
  kStepOutOfDomain,
  kDegreeOverflow,
  kBasisDegenerate,
  kToleranceAmbiguous,
  kSpecParseError,
  kCheckFailure,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (notably the CLI) can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace diffeo
