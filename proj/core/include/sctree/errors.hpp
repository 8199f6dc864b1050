#pragma once

#include <stdexcept>
#include <string>

namespace sctree {

// Base for every error raised by the library. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (depth < 1, empty pair list, n out of range, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A persisted document (tree JSON, benchmark YAML, fixture CSV) failed to parse or validate.
// `field()` names the offending field path, e.g. "roots[3].inputs".
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// The HTTP endpoint could not be reached or kept failing after all retries.
class GatewayError : public Error {
 public:
  GatewayError(const std::string& what, int last_status)
      : Error(what), last_status_(last_status) {}

  // HTTP status of the last attempt, or -1 when the last attempt failed at transport level.
  int last_status() const noexcept { return last_status_; }

 private:
  int last_status_;
};

// The endpoint answered but the body did not follow the expected wire shape.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// The execution worker violated the line protocol in a way that is not attributable to the
// executed snippet (wrong case id, unknown status), or the worker could not be spawned.
class HarnessError : public Error {
 public:
  using Error::Error;
};

class BenchmarkGenerationError : public Error {
 public:
  using Error::Error;
};

// Correlation is undefined (constant series, length < 3, mismatched lengths).
class CorrelationError : public Error {
 public:
  using Error::Error;
};

}  // namespace sctree
