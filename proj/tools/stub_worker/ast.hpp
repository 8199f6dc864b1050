#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "minipy.hpp"

namespace minipy {

// ---------------------------------------------------------------------------------------------
// tokens

struct Token {
  enum class Type { name, number, string, fstring, op, newline, indent, dedent, end };
  Type type = Type::end;
  std::string text;  // decoded value for strings
  int line = 0;
};

std::vector<Token> tokenize(std::string_view source);

// ---------------------------------------------------------------------------------------------
// values

struct Value;
struct ListObj;
struct DictObj;
struct FuncObj;
struct BuiltinObj;
struct MethodObj;
struct ExcObj;
struct ModuleObj;
struct RangeObj;

struct None {
  friend bool operator==(None, None) { return true; }
};

struct Value {
  using Data = std::variant<None, bool, std::int64_t, double, std::string, std::shared_ptr<ListObj>,
                            std::shared_ptr<DictObj>, std::shared_ptr<FuncObj>, std::shared_ptr<BuiltinObj>,
                            std::shared_ptr<MethodObj>, std::shared_ptr<ExcObj>, std::shared_ptr<ModuleObj>,
                            std::shared_ptr<RangeObj>>;
  Data data;

  Value() = default;
  Value(None) {}
  Value(bool b) : data(b) {}
  Value(std::int64_t i) : data(i) {}
  Value(int i) : data(static_cast<std::int64_t>(i)) {}
  Value(double d) : data(d) {}
  Value(std::string s) : data(std::move(s)) {}
  Value(const char* s) : data(std::string(s)) {}
  template <class T>
  Value(std::shared_ptr<T> p) : data(std::move(p)) {}

  template <class T>
  bool is() const { return std::holds_alternative<T>(data); }
  template <class T>
  const T& as() const { return std::get<T>(data); }
  template <class T>
  T& as() { return std::get<T>(data); }
};

enum class ListKind { list, tuple };

struct ListObj {
  std::vector<Value> items;
  ListKind kind = ListKind::list;
};

// Insertion-ordered mapping; sets are dicts whose values are ignored.
struct DictObj {
  std::vector<std::pair<Value, Value>> entries;
  std::unordered_map<std::string, std::size_t> index;
  bool is_set = false;
  Value default_factory;  // defaultdict / Counter when not None
  bool counter = false;
};

struct RangeObj {
  std::int64_t start = 0, stop = 0, step = 1;

  std::int64_t size() const {
    if (step > 0) return start < stop ? (stop - start - 1) / step + 1 : 0;
    return start > stop ? (start - stop - 1) / (-step) + 1 : 0;
  }
};

struct Env {
  std::unordered_map<std::string, Value> vars;
  std::shared_ptr<Env> parent;
  std::vector<std::string> outer_names;  // declared global / nonlocal
};

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<Expr>;
using StmtPtr = std::shared_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

struct FuncObj {
  std::string name;
  std::vector<std::string> params;
  std::vector<Value> defaults;  // for the trailing params
  std::shared_ptr<const Block> body;
  ExprPtr lambda_body;
  std::shared_ptr<Env> closure;
};

struct Interp;
using Kwargs = std::vector<std::pair<std::string, Value>>;
using NativeFn = std::function<Value(Interp&, std::vector<Value>&, Kwargs&)>;

struct BuiltinObj {
  std::string name;
  NativeFn fn;
};

struct MethodObj {
  Value self;
  std::string name;
};

// An exception class (instance == false) or a raised/constructed exception (instance == true).
struct ExcObj {
  std::string type;
  std::string message;
  bool instance = false;
};

struct ModuleObj {
  std::string name;
  std::unordered_map<std::string, Value> attrs;
};

// ---------------------------------------------------------------------------------------------
// syntax tree

struct Comprehension {
  ExprPtr target;
  ExprPtr iter;
  std::vector<ExprPtr> conditions;
};

struct FStringPart {
  std::string literal;
  ExprPtr expr;  // null for literal parts
  std::string spec;
  char conversion = 0;
};

struct Expr {
  enum class Kind {
    constant, name, tuple, list, dict, set, list_comp, dict_comp, set_comp, fstring,
    unary, binary, boolop, compare, ifexp, call, attribute, subscript, slice, lambda
  };
  Kind kind = Kind::constant;
  int line = 0;
  Value constant;
  std::string name;                  // name, attribute, operator
  std::vector<std::string> ops;      // compare
  std::vector<ExprPtr> items;        // tuple/list/set elements, call args, compare operands
  std::vector<std::pair<ExprPtr, ExprPtr>> pairs;  // dict
  std::vector<std::pair<std::string, ExprPtr>> kwargs;
  ExprPtr a, b, c;                   // operands; slice lower/upper/step
  std::vector<Comprehension> clauses;
  std::vector<FStringPart> parts;
  std::vector<std::string> params;   // lambda
  std::vector<ExprPtr> defaults;
};

struct ExceptClause {
  ExprPtr type;  // null catches everything
  std::string name;
  Block body;
};

struct Stmt {
  enum Kind {
    expr, assign, aug_assign, if_, while_, for_, def, return_, break_, continue_, pass, raise,
    try_, import, assert_, del, global
  };
  Kind kind = pass;
  int line = 0;
  std::vector<ExprPtr> targets;  // assign (chained), del
  ExprPtr value;                 // assign value, expression, return, raise, condition, for iterable
  ExprPtr target;                // aug_assign, for
  ExprPtr message;               // assert
  std::string op;                // aug_assign
  std::string name;              // def
  std::vector<std::string> params;  // def parameters; global / nonlocal names
  std::vector<ExprPtr> defaults;
  std::vector<ExprPtr> decorators;
  std::shared_ptr<Block> body;
  Block orelse;
  std::vector<ExceptClause> handlers;
  Block finally;
  std::vector<std::pair<std::string, std::string>> imports;  // (module, bound name)
  std::vector<std::pair<std::string, std::string>> from_names;  // (attr, bound name) for from-imports
};

std::shared_ptr<Block> parse_module(std::string_view source);
// For f-string replacement fields.
ExprPtr parse_expression(std::string_view source, int line);

[[noreturn]] inline void syntax_error(int line, const std::string& what) {
  throw PyError("SyntaxError", what + " (line " + std::to_string(line) + ")");
}

}  // namespace minipy
