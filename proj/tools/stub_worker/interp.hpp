#pragma once

#include "runtime.hpp"

namespace minipy {

struct Interp {
  enum class Flow { normal, brk, cont, ret };
  using EnvPtr = std::shared_ptr<Env>;

  Options options;
  EnvPtr globals = std::make_shared<Env>();
  std::unordered_map<std::string, Value> builtins;
  std::vector<std::shared_ptr<Block>> modules;
  std::vector<Value> handling;  // exceptions being handled, innermost last
  int depth = 0;

  Interp();

  Flow exec_block(const Block& block, const EnvPtr& env, Value& ret);
  Flow exec(const Stmt& s, const EnvPtr& env, Value& ret);
  Value eval(const Expr& e, const EnvPtr& env);

  Value call(const Value& callee, std::vector<Value> args, Kwargs kwargs = {});
  Value call_method(const Value& self, const std::string& name, std::vector<Value>& args, Kwargs& kwargs);
  Value get_attr(const Value& obj, const std::string& name);

  Value lookup(const std::string& name, const EnvPtr& env);
  void assign(const Expr& target, const Value& value, const EnvPtr& env);
  void assign_name(const std::string& name, const Value& value, const EnvPtr& env);

  Value binop(const std::string& op, const Value& a, const Value& b);
  bool contains(const Value& container, const Value& item);
  Value getitem(const Value& obj, const Value& index);
  void setitem(const Value& obj, const Value& index, const Value& value);
  Value slice(const Value& obj, const Value& lower, const Value& upper, const Value& step);

  Value import_module(const std::string& name);
  std::vector<Value> sort_values(std::vector<Value> items, const Value& key, bool reverse);

 private:
  Value call_function(const FuncObj& f, std::vector<Value>& args, Kwargs& kwargs);
  Value eval_comprehension(const Expr& e, const EnvPtr& env);
  Flow exec_try(const Stmt& s, const EnvPtr& env, Value& ret);
};

void install_builtins(Interp& interp);
Value string_method(Interp& in, const std::string& s, const std::string& name, std::vector<Value>& args, Kwargs& kwargs);
Value list_method(Interp& in, const std::shared_ptr<ListObj>& l, const std::string& name, std::vector<Value>& args, Kwargs& kwargs);
Value dict_method(Interp& in, const std::shared_ptr<DictObj>& d, const std::string& name, std::vector<Value>& args, Kwargs& kwargs);
Value make_module(Interp& in, const std::string& name);

bool exception_matches(const std::string& raised, const std::string& handler);

}  // namespace minipy
