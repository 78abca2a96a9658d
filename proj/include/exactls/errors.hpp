#pragma once

#include <stdexcept>
#include <string>

namespace exactls {

// Broad failure classes. The CLI maps each onto a process exit code.
enum class ErrorKind {
  usage,       // malformed request (bad flags, N == N*, ...)
  domain,      // argument outside the mathematical domain
  data,        // unusable input data (non-finite cells, degenerate response)
  singular,    // numerical rank deficiency
  numerical,   // iteration failed to converge
  resource,    // combinatorial / memory budget exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, std::string column)
      : Error(ErrorKind::singular, what), column_(std::move(column)) {}
  /// Offending regressor id (may be a comma separated list).
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ErrorKind::resource, what) {}
};

}  // namespace exactls
