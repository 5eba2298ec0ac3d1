#include "wavefront/error.hpp"

namespace wavefront {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnsupportedDerivative: return "UnsupportedDerivative";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SingularSchwarzian: return "SingularSchwarzian";
    case ErrorKind::HypothesisHViolated: return "HypothesisHViolated";
    case ErrorKind::NoPositiveFixedPoint: return "NoPositiveFixedPoint";
    case ErrorKind::WrongRegime: return "WrongRegime";
    case ErrorKind::ContourDegeneracy: return "ContourDegeneracy";
    case ErrorKind::GridError: return "GridError";
    case ErrorKind::SpeedBelowMinimal: return "SpeedBelowMinimal";
    case ErrorKind::DivergedOutOfCone: return "DivergedOutOfCone";
    case ErrorKind::InsufficientTail: return "InsufficientTail";
    case ErrorKind::NotAnExtremum: return "NotAnExtremum";
    case ErrorKind::NumericalBlowup: return "NumericalBlowup";
    case ErrorKind::DomainTooSmall: return "DomainTooSmall";
    case ErrorKind::InconsistentResult: return "InconsistentResult";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace wavefront
