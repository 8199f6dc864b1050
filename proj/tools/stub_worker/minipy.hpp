#pragma once

// A small interpreter for the subset of Python that benchmark snippets typically use:
// functions, control flow, ints/floats/strings/lists/tuples/dicts/sets, comprehensions,
// f-strings, try/except, and a handful of builtins. Integers are 64-bit; overflow raises.

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace minipy {

// A Python-level exception that escaped, or a syntax error while loading.
class PyError : public std::runtime_error {
 public:
  PyError(std::string type, const std::string& message)
      : std::runtime_error(message.empty() ? type : type + ": " + message), type_(std::move(type)), message_(message) {}
  const std::string& type() const noexcept { return type_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string type_;
  std::string message_;
};

// The return value has no JSON form (functions, sets, non-finite floats...).
class Unserializable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  int recursion_limit = 1000;
};

class Interpreter {
 public:
  explicit Interpreter(Options options = {});
  ~Interpreter();
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  // Runs module-level code. Throws PyError.
  void exec(std::string_view source);
  bool has_function(std::string_view name) const;
  // Calls a global function with JSON arguments and converts the result back.
  // Throws PyError or Unserializable.
  nlohmann::json call(std::string_view name, const nlohmann::json& args);

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace minipy
