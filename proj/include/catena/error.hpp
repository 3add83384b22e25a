#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace catena {

enum class ErrorKind {
  NoSolution,
  SingularGap,
  NoConvergence,
  SingularJacobian,
  SingularOperator,
  NotBracketed,
  InsufficientDecay,
  CriterionViolated,
  InvalidConfig,
  Touchdown,
  CeilingContact,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoSolution:
      return "NoSolution";
    case ErrorKind::SingularGap:
      return "SingularGap";
    case ErrorKind::NoConvergence:
      return "NoConvergence";
    case ErrorKind::SingularJacobian:
      return "SingularJacobian";
    case ErrorKind::SingularOperator:
      return "SingularOperator";
    case ErrorKind::NotBracketed:
      return "NotBracketed";
    case ErrorKind::InsufficientDecay:
      return "InsufficientDecay";
    case ErrorKind::CriterionViolated:
      return "CriterionViolated";
    case ErrorKind::InvalidConfig:
      return "InvalidConfig";
    case ErrorKind::Touchdown:
      return "Touchdown";
    case ErrorKind::CeilingContact:
      return "CeilingContact";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace catena
