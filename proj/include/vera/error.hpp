#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vera {

/// Base for every error the library throws. `code()` is a stable
/// kebab-case identifier suitable for machine consumption (CLI stderr,
/// HTTP error bodies); `what()` carries the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Malformed document. `path` is a JSON-pointer-like location and
/// `offset` the byte offset of a syntax error (0 when not applicable).
class DecodeError : public Error {
 public:
  DecodeError(std::string code, const std::string& message, std::string path = {},
              std::size_t offset = 0)
      : Error(std::move(code), message), path_(std::move(path)), offset_(offset) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string path_;
  std::size_t offset_;
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message) : Error("not-found", message) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message) : Error("transport", message) {}
};

class InvalidQueryError : public Error {
 public:
  explicit InvalidQueryError(const std::string& message) : Error("invalid-query", message) {}
};

/// A species attribute outside its permitted range.
class AttrRangeError : public Error {
 public:
  AttrRangeError(std::string field, const std::string& message)
      : Error("attr-range", message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class CompileError : public Error {
 public:
  using Error::Error;
};

/// Raised when the engine detects a broken numeric invariant. This always
/// indicates an engine bug, never bad user input.
class EngineInvariantError : public Error {
 public:
  explicit EngineInvariantError(const std::string& message)
      : Error("engine-invariant", message) {}
};

/// A run grew past the engine's agent budget (see kAgentLimitFactor).
/// Caused by the model, not by an engine defect.
class AgentLimitError : public Error {
 public:
  explicit AgentLimitError(const std::string& message) : Error("agent-limit", message) {}
};

}  // namespace vera
