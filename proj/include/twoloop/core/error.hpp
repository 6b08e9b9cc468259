#pragma once

#include <stdexcept>
#include <string>

namespace twoloop {

enum class ErrorKind {
  Config,           // invalid configuration or mismatched shapes
  EvaluationFailed, // non-finite fitness, crashed simulation
  EmptyTrajectory,  // no ok entries to choose from
  Io,               // filesystem failures
  State,            // optimizer state or checkpoint corruption
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  // JSON pointer into the offending config document, when known.
  Error(ErrorKind kind, const std::string& message, std::string pointer)
      : std::runtime_error(message), kind_(kind), pointer_(std::move(pointer)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  ErrorKind kind_;
  std::string pointer_;
};

inline Error config_error(const std::string& message, std::string pointer = {}) {
  return Error(ErrorKind::Config, message, std::move(pointer));
}

}  // namespace twoloop
