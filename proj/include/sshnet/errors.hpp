#ifndef SSHNET_ERRORS_HPP_
#define SSHNET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sshnet {

// Exit codes used by the command-line front end.
enum class ExitCode : int { kSuccess = 0, kUsage = 1, kIo = 2, kNumerical = 3 };

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode exit_code() const noexcept { return ExitCode::kNumerical; }
};

// Invalid scalar parameter (out-of-range alpha, nonpositive shape, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kUsage; }
};

// Vector/matrix dimensions do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kUsage; }
};

// Input signal too short to fill every regressor row.
class InsufficientHistoryError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kUsage; }
};

// A factorization failed or a matrix was numerically indefinite.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Operation invoked on an object in the wrong state (e.g. empty chain).
class StateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kIo; }
};

// Schema violation while reading a file. `pointer` is a JSON pointer.
class ParseError : public IoError {
 public:
  ParseError(const std::string& pointer, const std::string& what)
      : IoError(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kUsage; }
};

}  // namespace sshnet

#endif  // SSHNET_ERRORS_HPP_
