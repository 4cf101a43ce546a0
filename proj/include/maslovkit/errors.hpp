#pragma once

#include <stdexcept>
#include <string>

namespace maslovkit {

enum class ErrorKind {
  ZeroPoint,
  OffSurface,
  DegenerateGradient,
  ToleranceExceeded,
  StepUnderflow,
  NotAntiperiodic,
  NoConvergence,
  SingularJacobian,
  NotSymplectic,
  UnresolvedCrossing,
  NonIntegerStability,
  NotSymmetricOrbit,
  LimitUnstable,
  EmptyIntersection,
  NoUnitBlock,
  AmbiguousCase,
  MissingSplittingNumber,
  InvalidTypeNumbers,
  SignAmbiguous,
  UnboundedContribution,
  TruncationTooTight,
  InvalidInput,
};

const char* to_string(ErrorKind kind);

/// Numerical or contract failure raised by any toolkit operation.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroPoint: return "ZeroPoint";
    case ErrorKind::OffSurface: return "OffSurface";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::ToleranceExceeded: return "ToleranceExceeded";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NotAntiperiodic: return "NotAntiperiodic";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::NotSymplectic: return "NotSymplectic";
    case ErrorKind::UnresolvedCrossing: return "UnresolvedCrossing";
    case ErrorKind::NonIntegerStability: return "NonIntegerStability";
    case ErrorKind::NotSymmetricOrbit: return "NotSymmetricOrbit";
    case ErrorKind::LimitUnstable: return "LimitUnstable";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::NoUnitBlock: return "NoUnitBlock";
    case ErrorKind::AmbiguousCase: return "AmbiguousCase";
    case ErrorKind::MissingSplittingNumber: return "MissingSplittingNumber";
    case ErrorKind::InvalidTypeNumbers: return "InvalidTypeNumbers";
    case ErrorKind::SignAmbiguous: return "SignAmbiguous";
    case ErrorKind::UnboundedContribution: return "UnboundedContribution";
    case ErrorKind::TruncationTooTight: return "TruncationTooTight";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace maslovkit
