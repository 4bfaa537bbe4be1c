#include "cpssperso/error.hpp"

namespace cpssperso {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSystem: return "InvalidSystem";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::EpisodeOver: return "EpisodeOver";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidTolerance: return "InvalidTolerance";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::Divergence: return "DivergenceError";
    case ErrorKind::UnknownSystem: return "UnknownSystem";
    case ErrorKind::RoleCollision: return "RoleCollision";
    case ErrorKind::DuplicateObjective: return "DuplicateObjective";
    case ErrorKind::PriorityViolation: return "PriorityViolation";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Parse: return "ParseError";
  }
  return "Error";
}

}  // namespace cpssperso
