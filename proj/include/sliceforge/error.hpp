#pragma once

#include <stdexcept>
#include <string>

namespace sliceforge {

enum class ErrorKind { Validation, Infeasible, Io };

/// Base error for every pipeline stage. `stage` names where it was raised
/// and `hint` carries an optional remediation suggestion for the CLI.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message, std::string stage = {},
        std::string hint = {})
      : std::runtime_error(message), kind_(kind), stage_(std::move(stage)),
        hint_(std::move(hint)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string &stage() const noexcept { return stage_; }
  const std::string &hint() const noexcept { return hint_; }

private:
  ErrorKind kind_;
  std::string stage_;
  std::string hint_;
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string &message, std::string stage = {},
                           std::string hint = {})
      : Error(ErrorKind::Validation, message, std::move(stage),
              std::move(hint)) {}
};

class InfeasibleError : public Error {
public:
  explicit InfeasibleError(const std::string &message, std::string stage = {},
                           std::string hint = {})
      : Error(ErrorKind::Infeasible, message, std::move(stage),
              std::move(hint)) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string &message, std::string stage = {})
      : Error(ErrorKind::Io, message, std::move(stage)) {}
};

/// Process exit code for an error kind: 2 validation, 3 infeasible, 4 I/O.
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::Validation:
    return 2;
  case ErrorKind::Infeasible:
    return 3;
  case ErrorKind::Io:
    return 4;
  }
  return 1;
}

} // namespace sliceforge
