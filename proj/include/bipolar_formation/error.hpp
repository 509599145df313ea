#pragma once

#include <stdexcept>
#include <string>

namespace bform {

enum class ErrorCode {
  kCollocated,
  kNotUnit,
  kFocalSingularity,
  kDegenerateTriangle,
  kInconsistentTriangle,
  kBadAngle,
  kOutOfBounds,
  kInfeasibleInitialError,
  kInvalidArgument,
  kValidation,
  kParse,
  kIo,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the C
// API can map it onto a status without string matching.
class FormationError : public std::runtime_error {
 public:
  FormationError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when a prescribed-performance channel leaves its band. Carries enough
// context to name the offending channel in diagnostics.
class OutOfBoundsError : public FormationError {
 public:
  OutOfBoundsError(std::string channel, double time, double e_tilde,
                   const std::string& what)
      : FormationError(ErrorCode::kOutOfBounds, what),
        channel_(std::move(channel)),
        time_(time),
        e_tilde_(e_tilde) {}

  const std::string& channel() const noexcept { return channel_; }
  double time() const noexcept { return time_; }
  double e_tilde() const noexcept { return e_tilde_; }

 private:
  std::string channel_;
  double time_;
  double e_tilde_;
};

}  // namespace bform
