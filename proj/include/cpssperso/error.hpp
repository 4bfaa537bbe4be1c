#ifndef CPSSPERSO_ERROR_HPP_
#define CPSSPERSO_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpssperso {

enum class ErrorKind {
  InvalidSystem,
  ValidationFailed,
  InvalidParams,
  EpisodeOver,
  IndexOutOfRange,
  InvalidTolerance,
  ShapeError,
  EmptyBatch,
  Divergence,
  UnknownSystem,
  RoleCollision,
  DuplicateObjective,
  PriorityViolation,
  Config,
  Io,
  Parse,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cpssperso

#endif  // CPSSPERSO_ERROR_HPP_
