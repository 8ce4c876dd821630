#include "diffeo/error.hpp"

namespace diffeo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonScalarTarget: return "NonScalarTarget";
    case ErrorCode::kExpansionPointMismatch: return "ExpansionPointMismatch";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kOrderExceeded: return "OrderExceeded";
    case ErrorCode::kBasepointMismatch: return "BasepointMismatch";
    case ErrorCode::kRadiusExceeded: return "RadiusExceeded";
    case ErrorCode::kProbeDomainError: return "ProbeDomainError";
    case ErrorCode::kMembershipViolation: return "MembershipViolation";
    case ErrorCode::kUnsupportedGroup: return "UnsupportedGroup";
    case ErrorCode::kUnreachablePoint: return "UnreachablePoint";
    case ErrorCode::kNonLinearTangent: return "NonLinearTangent";
    case ErrorCode::kBaseMismatch: return "BaseMismatch";
    case ErrorCode::kAlgebraNotClosed: return "AlgebraNotClosed";
    case ErrorCode::kStepOutOfDomain: return "StepOutOfDomain";
    case ErrorCode::kDegreeOverflow: return "DegreeOverflow";
    case ErrorCode::kBasisDegenerate: return "BasisDegenerate";
    case ErrorCode::kToleranceAmbiguous: return "ToleranceAmbiguous";
    case ErrorCode::kSpecParseError: return "SpecParseError";
    case ErrorCode::kCheckFailure: return "CheckFailure";
  }
  return "Unknown";
}

}  // namespace diffeo
