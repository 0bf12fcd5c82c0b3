#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ionmux {

enum class ErrorKind {
  Parameter,
  ProtocolConstruction,
  Numeric,
  Analysis,
  Budget,
  Config,
};

std::string_view to_string(ErrorKind kind);

/// Base of every exception thrown by the library. `kind()` is what the CLI
/// serializes into its machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorKind::Parameter, what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what)
      : Error(ErrorKind::ProtocolConstruction, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

class AnalysisError : public Error {
 public:
  explicit AnalysisError(const std::string& what) : Error(ErrorKind::Analysis, what) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& what) : Error(ErrorKind::Budget, what) {}
};

/// Configuration problems carry the offending key so diagnostics can name it.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(ErrorKind::Config, what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace ionmux
