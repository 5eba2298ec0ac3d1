#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavefront {

enum class ErrorKind {
  UnsupportedDerivative,
  DomainError,
  SingularSchwarzian,
  HypothesisHViolated,
  NoPositiveFixedPoint,
  WrongRegime,
  ContourDegeneracy,
  GridError,
  SpeedBelowMinimal,
  DivergedOutOfCone,
  InsufficientTail,
  NotAnExtremum,
  NumericalBlowup,
  DomainTooSmall,
  InconsistentResult,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wavefront
