#include "granuflow/error.hpp"

namespace granuflow {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MassMismatch: return "MassMismatch";
    case ErrorKind::EmptyMeasure: return "EmptyMeasure";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::EmptyCloud: return "EmptyCloud";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::SolverDiverged: return "SolverDiverged";
    case ErrorKind::CflViolation: return "CflViolation";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace granuflow
