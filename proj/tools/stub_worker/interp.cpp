#include "interp.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>

namespace minipy {

namespace {

using ListPtr = std::shared_ptr<ListObj>;
using DictPtr = std::shared_ptr<DictObj>;
using Flow = Interp::Flow;

bool is_ascii(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

std::int64_t checked(bool overflow, const std::int64_t& value) {
  if (overflow) raise("OverflowError", "integer result exceeds 64 bits");
  return value;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  if (b == 0) raise("ZeroDivisionError", "integer division or modulo by zero");
  if (a == INT64_MIN && b == -1) raise("OverflowError", "integer result exceeds 64 bits");
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  if (b == 0) raise("ZeroDivisionError", "integer division or modulo by zero");
  if (b == -1) return 0;
  std::int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

double float_mod(double a, double b) {
  if (b == 0.0) raise("ZeroDivisionError", "float modulo");
  double r = std::fmod(a, b);
  if (r != 0.0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

std::int64_t int_pow(std::int64_t base, std::int64_t exp) {
  std::int64_t result = 1;
  while (exp > 0) {
    if (exp & 1) result = checked(__builtin_mul_overflow(result, base, &result), result);
    exp >>= 1;
    if (exp) base = checked(__builtin_mul_overflow(base, base, &base), base);
  }
  return result;
}

Value repeat(const Value& seq, std::int64_t times) {
  if (times < 0) times = 0;
  if (seq.is<std::string>()) {
    const auto& s = seq.as<std::string>();
    if (static_cast<double>(s.size()) * static_cast<double>(times) > 1e9) raise("MemoryError", "repeated string too large");
    std::string out;
    out.reserve(s.size() * static_cast<std::size_t>(times));
    for (std::int64_t i = 0; i < times; ++i) out += s;
    return out;
  }
  const auto& l = *seq.as<ListPtr>();
  if (static_cast<double>(l.items.size()) * static_cast<double>(times) > 1e8) raise("MemoryError", "repeated list too large");
  std::vector<Value> items;
  for (std::int64_t i = 0; i < times; ++i) items.insert(items.end(), l.items.begin(), l.items.end());
  return make_list(std::move(items), l.kind);
}

bool is_seq(const Value& v) { return v.is<std::string>() || v.is<ListPtr>(); }

std::int64_t normalize_index(std::int64_t i, std::int64_t n, const char* what) {
  if (i < 0) i += n;
  if (i < 0 || i >= n) raise("IndexError", std::string(what) + " index out of range");
  return i;
}

std::vector<std::int64_t> slice_indices(std::int64_t n, const Value& lower, const Value& upper, const Value& step_v) {
  const std::int64_t step = step_v.is<None>() ? 1 : to_int(step_v, "slice indices");
  if (step == 0) raise("ValueError", "slice step cannot be zero");
  const auto clamp = [&](const Value& v, std::int64_t fallback) {
    if (v.is<None>()) return fallback;
    std::int64_t x = to_int(v, "slice indices");
    if (x < 0) {
      x += n;
      if (x < 0) x = step < 0 ? -1 : 0;
    } else if (x >= n) {
      x = step < 0 ? n - 1 : n;
    }
    return x;
  };
  const std::int64_t start = clamp(lower, step > 0 ? 0 : n - 1);
  const std::int64_t stop = clamp(upper, step > 0 ? n : -1);
  std::vector<std::int64_t> out;
  if (step > 0) {
    for (std::int64_t i = start; i < stop; i += step) out.push_back(i);
  } else {
    for (std::int64_t i = start; i > stop; i += step) out.push_back(i);
  }
  return out;
}

Value make_exception(const std::string& type, const std::string& message) {
  auto e = std::make_shared<ExcObj>();
  e->type = type;
  e->message = message;
  e->instance = true;
  return e;
}

bool identical(const Value& a, const Value& b) {
  if (a.data.index() != b.data.index()) return false;
  if (a.is<None>() || a.is<bool>() || a.is<std::int64_t>() || a.is<double>() || a.is<std::string>()) return equals(a, b);
  return std::visit([&](const auto& x) -> bool {
    using T = std::decay_t<decltype(x)>;
    if constexpr (std::is_same_v<T, None> || std::is_same_v<T, bool> || std::is_same_v<T, std::int64_t> ||
                  std::is_same_v<T, double> || std::is_same_v<T, std::string>) {
      return false;
    } else {
      return x.get() == std::get<T>(b.data).get();
    }
  }, a.data);
}

struct DepthGuard {
  int& depth;
  ~DepthGuard() { --depth; }
};

}  // namespace

bool exception_matches(const std::string& raised, const std::string& handler) {
  if (handler == raised || handler == "Exception" || handler == "BaseException") return true;
  if (handler == "LookupError") return raised == "KeyError" || raised == "IndexError";
  if (handler == "ArithmeticError") return raised == "ZeroDivisionError" || raised == "OverflowError";
  if (handler == "RuntimeError") return raised == "RecursionError" || raised == "NotImplementedError";
  return false;
}

Interp::Interp() { install_builtins(*this); }

// ---------------------------------------------------------------------------------------------
// statements

Flow Interp::exec_block(const Block& block, const EnvPtr& env, Value& ret) {
  for (const auto& s : block) {
    const Flow flow = exec(*s, env, ret);
    if (flow != Flow::normal) return flow;
  }
  return Flow::normal;
}

Flow Interp::exec(const Stmt& s, const EnvPtr& env, Value& ret) {
  switch (s.kind) {
    case Stmt::expr: eval(*s.value, env); return Flow::normal;
    case Stmt::assign: {
      const Value v = eval(*s.value, env);
      for (const auto& t : s.targets) assign(*t, v, env);
      return Flow::normal;
    }
    case Stmt::aug_assign: {
      const Expr& t = *s.target;
      if (t.kind == Expr::Kind::name) {
        const Value cur = lookup(t.name, env);
        const Value rhs = eval(*s.value, env);
        if (s.op == "+" && cur.is<ListPtr>() && cur.as<ListPtr>()->kind == ListKind::list) {
          auto extra = items_of(rhs);
          auto& items = cur.as<ListPtr>()->items;
          items.insert(items.end(), extra.begin(), extra.end());
          return Flow::normal;
        }
        assign_name(t.name, binop(s.op, cur, rhs), env);
        return Flow::normal;
      }
      if (t.kind == Expr::Kind::subscript) {
        const Value obj = eval(*t.a, env);
        const Value index = eval(*t.b, env);
        const Value rhs = eval(*s.value, env);
        setitem(obj, index, binop(s.op, getitem(obj, index), rhs));
        return Flow::normal;
      }
      raise("AttributeError", "attribute assignment is not supported");
    }
    case Stmt::if_:
      if (truthy(eval(*s.value, env))) return exec_block(*s.body, env, ret);
      return exec_block(s.orelse, env, ret);
    case Stmt::while_: {
      while (truthy(eval(*s.value, env))) {
        const Flow flow = exec_block(*s.body, env, ret);
        if (flow == Flow::ret) return flow;
        if (flow == Flow::brk) return Flow::normal;
      }
      return exec_block(s.orelse, env, ret);
    }
    case Stmt::for_: {
      const Value iterable = eval(*s.value, env);
      const auto step = [&](const Value& item) {
        assign(*s.target, item, env);
        return exec_block(*s.body, env, ret);
      };
      if (iterable.is<std::shared_ptr<RangeObj>>()) {
        const auto r = *iterable.as<std::shared_ptr<RangeObj>>();
        const auto n = r.size();
        for (std::int64_t i = 0; i < n; ++i) {
          const Flow flow = step(Value(r.start + i * r.step));
          if (flow == Flow::ret) return flow;
          if (flow == Flow::brk) return Flow::normal;
        }
      } else {
        for (const auto& item : items_of(iterable)) {
          const Flow flow = step(item);
          if (flow == Flow::ret) return flow;
          if (flow == Flow::brk) return Flow::normal;
        }
      }
      return exec_block(s.orelse, env, ret);
    }
    case Stmt::def: {
      auto f = std::make_shared<FuncObj>();
      f->name = s.name;
      f->params = s.params;
      for (const auto& d : s.defaults) f->defaults.push_back(eval(*d, env));
      f->body = s.body;
      f->closure = env;
      Value fn = f;
      for (auto it = s.decorators.rbegin(); it != s.decorators.rend(); ++it) fn = call(eval(**it, env), {fn});
      assign_name(s.name, fn, env);
      return Flow::normal;
    }
    case Stmt::return_:
      ret = s.value ? eval(*s.value, env) : Value(None{});
      return Flow::ret;
    case Stmt::break_: return Flow::brk;
    case Stmt::continue_: return Flow::cont;
    case Stmt::pass: return Flow::normal;
    case Stmt::raise: {
      if (!s.value) {
        if (handling.empty()) raise("RuntimeError", "No active exception to reraise");
        const auto& e = *handling.back().as<std::shared_ptr<ExcObj>>();
        raise(e.type, e.message);
      }
      Value v = eval(*s.value, env);
      if (v.is<std::shared_ptr<ExcObj>>()) {
        const auto& e = *v.as<std::shared_ptr<ExcObj>>();
        raise(e.type, e.message);
      }
      raise("TypeError", "exceptions must derive from BaseException");
    }
    case Stmt::try_: return exec_try(s, env, ret);
    case Stmt::import: {
      for (const auto& [module, bound] : s.imports) {
        const Value m = import_module(module);
        if (s.from_names.empty()) {
          assign_name(bound, m, env);
          continue;
        }
        for (const auto& [attr, name] : s.from_names) assign_name(name, get_attr(m, attr), env);
      }
      return Flow::normal;
    }
    case Stmt::assert_:
      if (!truthy(eval(*s.value, env))) raise("AssertionError", s.message ? str(eval(*s.message, env)) : "");
      return Flow::normal;
    case Stmt::del: {
      for (const auto& t : s.targets) {
        if (t->kind == Expr::Kind::name) {
          if (!env->vars.erase(t->name)) raise("NameError", "name '" + t->name + "' is not defined");
        } else if (t->kind == Expr::Kind::subscript) {
          const Value obj = eval(*t->a, env);
          const Value index = eval(*t->b, env);
          if (obj.is<DictPtr>()) {
            if (!dict_erase(*obj.as<DictPtr>(), index)) raise("KeyError", repr(index));
          } else if (obj.is<ListPtr>() && obj.as<ListPtr>()->kind == ListKind::list) {
            auto& items = obj.as<ListPtr>()->items;
            const auto i = normalize_index(to_int(index, "list indices"), static_cast<std::int64_t>(items.size()), "list assignment");
            items.erase(items.begin() + i);
          } else {
            raise("TypeError", "'" + type_name(obj) + "' object doesn't support item deletion");
          }
        } else {
          raise("SyntaxError", "cannot delete expression");
        }
      }
      return Flow::normal;
    }
    case Stmt::global:
      for (const auto& name : s.params) env->outer_names.push_back(name);
      return Flow::normal;
  }
  return Flow::normal;
}

Flow Interp::exec_try(const Stmt& s, const EnvPtr& env, Value& ret) {
  const auto run_finally = [&](Flow& out) {
    if (s.finally.empty()) return false;
    Value r;
    const Flow f = exec_block(s.finally, env, r);
    if (f == Flow::normal) return false;
    if (f == Flow::ret) ret = r;
    out = f;
    return true;
  };
  Flow flow = Flow::normal;
  try {
    bool raised = false;
    try {
      flow = exec_block(*s.body, env, ret);
    } catch (const PyError& e) {
      raised = true;
      const ExceptClause* handler = nullptr;
      for (const auto& clause : s.handlers) {
        if (!clause.type) {
          handler = &clause;
          break;
        }
        const Value t = eval(*clause.type, env);
        std::vector<Value> types = t.is<ListPtr>() ? t.as<ListPtr>()->items : std::vector<Value>{t};
        const bool match = std::any_of(types.begin(), types.end(), [&](const Value& ty) {
          return ty.is<std::shared_ptr<ExcObj>>() && exception_matches(e.type(), ty.as<std::shared_ptr<ExcObj>>()->type);
        });
        if (match) {
          handler = &clause;
          break;
        }
      }
      if (!handler) throw;
      const Value exc = make_exception(e.type(), e.message());
      if (!handler->name.empty()) assign_name(handler->name, exc, env);
      handling.push_back(exc);
      try {
        flow = exec_block(handler->body, env, ret);
      } catch (...) {
        handling.pop_back();
        throw;
      }
      handling.pop_back();
    }
    if (!raised && flow == Flow::normal) flow = exec_block(s.orelse, env, ret);
  } catch (...) {
    Flow override = Flow::normal;
    if (run_finally(override)) return override;
    throw;
  }
  Flow override = Flow::normal;
  if (run_finally(override)) return override;
  return flow;
}

// ---------------------------------------------------------------------------------------------
// names and assignment

Value Interp::lookup(const std::string& name, const EnvPtr& env) {
  for (Env* e = env.get(); e; e = e->parent.get()) {
    const auto it = e->vars.find(name);
    if (it != e->vars.end()) return it->second;
  }
  const auto it = builtins.find(name);
  if (it != builtins.end()) return it->second;
  raise("NameError", "name '" + name + "' is not defined");
}

void Interp::assign_name(const std::string& name, const Value& value, const EnvPtr& env) {
  if (std::find(env->outer_names.begin(), env->outer_names.end(), name) != env->outer_names.end()) {
    for (Env* e = env->parent.get(); e; e = e->parent.get()) {
      const auto it = e->vars.find(name);
      if (it != e->vars.end()) {
        it->second = value;
        return;
      }
    }
    globals->vars[name] = value;
    return;
  }
  env->vars[name] = value;
}

void Interp::assign(const Expr& target, const Value& value, const EnvPtr& env) {
  switch (target.kind) {
    case Expr::Kind::name: assign_name(target.name, value, env); return;
    case Expr::Kind::tuple:
    case Expr::Kind::list: {
      const auto items = items_of(value);
      if (items.size() != target.items.size()) {
        raise("ValueError", items.size() < target.items.size()
                                ? "not enough values to unpack (expected " + std::to_string(target.items.size()) + ", got " + std::to_string(items.size()) + ")"
                                : "too many values to unpack (expected " + std::to_string(target.items.size()) + ")");
      }
      for (std::size_t i = 0; i < items.size(); ++i) assign(*target.items[i], items[i], env);
      return;
    }
    case Expr::Kind::subscript: {
      const Value obj = eval(*target.a, env);
      if (target.b->kind == Expr::Kind::slice) {
        if (!obj.is<ListPtr>() || obj.as<ListPtr>()->kind != ListKind::list) raise("TypeError", "slice assignment needs a list");
        const auto& sl = *target.b;
        const Value step = sl.c ? eval(*sl.c, env) : Value(None{});
        if (!step.is<None>() && to_int(step, "slice") != 1) raise("ValueError", "extended slice assignment is not supported");
        auto& items = obj.as<ListPtr>()->items;
        const auto n = static_cast<std::int64_t>(items.size());
        const auto bound = [&](const ExprPtr& e, std::int64_t fallback) {
          if (!e) return fallback;
          std::int64_t x = to_int(eval(*e, env), "slice indices");
          if (x < 0) x = std::max<std::int64_t>(0, x + n);
          return std::min(x, n);
        };
        const auto lo = bound(sl.a, 0);
        const auto hi = std::max(lo, bound(sl.b, n));
        auto replacement = items_of(value);
        items.erase(items.begin() + lo, items.begin() + hi);
        items.insert(items.begin() + lo, replacement.begin(), replacement.end());
        return;
      }
      setitem(obj, eval(*target.b, env), value);
      return;
    }
    default: raise("AttributeError", "cannot assign to this target");
  }
}

// ---------------------------------------------------------------------------------------------
// expressions

Value Interp::eval(const Expr& e, const EnvPtr& env) {
  switch (e.kind) {
    case Expr::Kind::constant: return e.constant;
    case Expr::Kind::name: return lookup(e.name, env);
    case Expr::Kind::tuple:
    case Expr::Kind::list: {
      std::vector<Value> items;
      items.reserve(e.items.size());
      for (const auto& item : e.items) items.push_back(eval(*item, env));
      return make_list(std::move(items), e.kind == Expr::Kind::tuple ? ListKind::tuple : ListKind::list);
    }
    case Expr::Kind::set: {
      auto d = make_dict(true);
      for (const auto& item : e.items) dict_set(*d, eval(*item, env), None{});
      return d;
    }
    case Expr::Kind::dict: {
      auto d = make_dict();
      for (const auto& [k, v] : e.pairs) {
        Value key = eval(*k, env);
        dict_set(*d, key, eval(*v, env));
      }
      return d;
    }
    case Expr::Kind::list_comp:
    case Expr::Kind::dict_comp:
    case Expr::Kind::set_comp: return eval_comprehension(e, env);
    case Expr::Kind::fstring: {
      std::string out;
      for (const auto& part : e.parts) {
        if (!part.expr) {
          out += part.literal;
          continue;
        }
        Value v = eval(*part.expr, env);
        if (part.conversion == 'r' || part.conversion == 'a') v = repr(v);
        if (part.conversion == 's') v = str(v);
        out += format_value(v, part.spec);
      }
      return out;
    }
    case Expr::Kind::unary: {
      const Value v = eval(*e.a, env);
      if (e.name == "not") return !truthy(v);
      if (e.name == "-") {
        if (v.is<double>()) return -v.as<double>();
        const auto i = to_int(v, "operand");
        if (i == INT64_MIN) raise("OverflowError", "integer result exceeds 64 bits");
        return -i;
      }
      if (e.name == "+") {
        if (v.is<double>()) return v;
        return to_int(v, "operand");
      }
      return ~to_int(v, "operand");
    }
    case Expr::Kind::binary: {
      const Value a = eval(*e.a, env);
      return binop(e.name, a, eval(*e.b, env));
    }
    case Expr::Kind::boolop: {
      Value a = eval(*e.a, env);
      if (e.name == "and") return truthy(a) ? eval(*e.b, env) : a;
      return truthy(a) ? a : eval(*e.b, env);
    }
    case Expr::Kind::compare: {
      Value left = eval(*e.items[0], env);
      for (std::size_t i = 0; i < e.ops.size(); ++i) {
        Value right = eval(*e.items[i + 1], env);
        const auto& op = e.ops[i];
        bool result = false;
        if (op == "==") {
          result = equals(left, right);
        } else if (op == "!=") {
          result = !equals(left, right);
        } else if (op == "<") {
          result = compare(left, right) < 0;
        } else if (op == "<=") {
          result = compare(left, right) <= 0;
        } else if (op == ">") {
          result = compare(left, right) > 0;
        } else if (op == ">=") {
          result = compare(left, right) >= 0;
        } else if (op == "in") {
          result = contains(right, left);
        } else if (op == "not in") {
          result = !contains(right, left);
        } else {
          const bool same = identical(left, right);
          result = op == "is" ? same : !same;
        }
        if (!result) return false;
        left = std::move(right);
      }
      return true;
    }
    case Expr::Kind::ifexp: return truthy(eval(*e.b, env)) ? eval(*e.a, env) : eval(*e.c, env);
    case Expr::Kind::call: {
      const Value callee = eval(*e.a, env);
      std::vector<Value> args;
      args.reserve(e.items.size());
      for (const auto& a : e.items) args.push_back(eval(*a, env));
      Kwargs kwargs;
      for (const auto& [k, v] : e.kwargs) kwargs.emplace_back(k, eval(*v, env));
      return call(callee, std::move(args), std::move(kwargs));
    }
    case Expr::Kind::attribute: return get_attr(eval(*e.a, env), e.name);
    case Expr::Kind::subscript: {
      const Value obj = eval(*e.a, env);
      if (e.b->kind == Expr::Kind::slice) {
        const auto& sl = *e.b;
        const auto part = [&](const ExprPtr& p) { return p ? eval(*p, env) : Value(None{}); };
        return slice(obj, part(sl.a), part(sl.b), part(sl.c));
      }
      return getitem(obj, eval(*e.b, env));
    }
    case Expr::Kind::slice: raise("SyntaxError", "slice outside subscript");
    case Expr::Kind::lambda: {
      auto f = std::make_shared<FuncObj>();
      f->name = "<lambda>";
      f->params = e.params;
      for (const auto& d : e.defaults) f->defaults.push_back(eval(*d, env));
      f->lambda_body = e.a;
      f->closure = env;
      return f;
    }
  }
  raise("SystemError", "unknown expression");
}

Value Interp::eval_comprehension(const Expr& e, const EnvPtr& env) {
  auto scope = std::make_shared<Env>();
  scope->parent = env;
  std::vector<Value> items;
  auto dict = make_dict(e.kind == Expr::Kind::set_comp);
  std::function<void(std::size_t)> loop = [&](std::size_t level) {
    if (level == e.clauses.size()) {
      if (e.kind == Expr::Kind::list_comp) {
        items.push_back(eval(*e.a, scope));
      } else if (e.kind == Expr::Kind::set_comp) {
        dict_set(*dict, eval(*e.a, scope), None{});
      } else {
        Value k = eval(*e.a, scope);
        dict_set(*dict, k, eval(*e.b, scope));
      }
      return;
    }
    const auto& clause = e.clauses[level];
    // The outermost iterable is evaluated in the enclosing scope.
    const Value iterable = eval(*clause.iter, level == 0 ? env : scope);
    const auto body = [&](const Value& item) {
      assign(*clause.target, item, scope);
      for (const auto& cond : clause.conditions) {
        if (!truthy(eval(*cond, scope))) return;
      }
      loop(level + 1);
    };
    if (iterable.is<std::shared_ptr<RangeObj>>()) {
      const auto r = *iterable.as<std::shared_ptr<RangeObj>>();
      for (std::int64_t i = 0; i < r.size(); ++i) body(Value(r.start + i * r.step));
    } else {
      for (const auto& item : items_of(iterable)) body(item);
    }
  };
  loop(0);
  if (e.kind == Expr::Kind::list_comp) return make_list(std::move(items));
  return dict;
}

// ---------------------------------------------------------------------------------------------
// calls

Value Interp::call(const Value& callee, std::vector<Value> args, Kwargs kwargs) {
  if (callee.is<std::shared_ptr<FuncObj>>()) return call_function(*callee.as<std::shared_ptr<FuncObj>>(), args, kwargs);
  if (callee.is<std::shared_ptr<BuiltinObj>>()) return callee.as<std::shared_ptr<BuiltinObj>>()->fn(*this, args, kwargs);
  if (callee.is<std::shared_ptr<MethodObj>>()) {
    const auto& m = *callee.as<std::shared_ptr<MethodObj>>();
    return call_method(m.self, m.name, args, kwargs);
  }
  if (callee.is<std::shared_ptr<ExcObj>>() && !callee.as<std::shared_ptr<ExcObj>>()->instance) {
    const auto& type = callee.as<std::shared_ptr<ExcObj>>()->type;
    std::string message;
    if (args.size() == 1) {
      message = type == "KeyError" ? repr(args[0]) : str(args[0]);
    } else if (args.size() > 1) {
      message = repr(make_list(args, ListKind::tuple));
    }
    return make_exception(type, message);
  }
  raise("TypeError", "'" + type_name(callee) + "' object is not callable");
}

Value Interp::call_function(const FuncObj& f, std::vector<Value>& args, Kwargs& kwargs) {
  ++depth;
  DepthGuard guard{depth};
  if (depth > options.recursion_limit) raise("RecursionError", "maximum recursion depth exceeded");
  const std::size_t n = f.params.size();
  if (args.size() > n) {
    raise("TypeError", f.name + "() takes " + std::to_string(n) + " positional arguments but " +
                           std::to_string(args.size()) + " were given");
  }
  auto env = std::make_shared<Env>();
  env->parent = f.closure;
  std::vector<bool> bound(n, false);
  for (std::size_t i = 0; i < args.size(); ++i) {
    env->vars[f.params[i]] = std::move(args[i]);
    bound[i] = true;
  }
  for (auto& [name, value] : kwargs) {
    const auto it = std::find(f.params.begin(), f.params.end(), name);
    if (it == f.params.end()) raise("TypeError", f.name + "() got an unexpected keyword argument '" + name + "'");
    const auto i = static_cast<std::size_t>(it - f.params.begin());
    if (bound[i]) raise("TypeError", f.name + "() got multiple values for argument '" + name + "'");
    env->vars[name] = std::move(value);
    bound[i] = true;
  }
  const std::size_t first_default = n - f.defaults.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (bound[i]) continue;
    if (i < first_default) raise("TypeError", f.name + "() missing required positional argument: '" + f.params[i] + "'");
    env->vars[f.params[i]] = f.defaults[i - first_default];
  }
  if (f.lambda_body) return eval(*f.lambda_body, env);
  Value ret;
  exec_block(*f.body, env, ret);
  return ret;
}

Value Interp::get_attr(const Value& obj, const std::string& name) {
  if (obj.is<std::shared_ptr<ModuleObj>>()) {
    const auto& m = *obj.as<std::shared_ptr<ModuleObj>>();
    const auto it = m.attrs.find(name);
    if (it == m.attrs.end()) raise("AttributeError", "module '" + m.name + "' has no attribute '" + name + "'");
    return it->second;
  }
  if (obj.is<std::shared_ptr<ExcObj>>() && obj.as<std::shared_ptr<ExcObj>>()->instance && name == "args") {
    const auto& e = *obj.as<std::shared_ptr<ExcObj>>();
    return make_list(e.message.empty() ? std::vector<Value>{} : std::vector<Value>{Value(e.message)}, ListKind::tuple);
  }
  if (obj.is<std::string>() || obj.is<ListPtr>() || obj.is<DictPtr>()) {
    auto m = std::make_shared<MethodObj>();
    m->self = obj;
    m->name = name;
    return m;
  }
  raise("AttributeError", "'" + type_name(obj) + "' object has no attribute '" + name + "'");
}

Value Interp::call_method(const Value& self, const std::string& name, std::vector<Value>& args, Kwargs& kwargs) {
  if (self.is<std::string>()) return string_method(*this, self.as<std::string>(), name, args, kwargs);
  if (self.is<ListPtr>()) return list_method(*this, self.as<ListPtr>(), name, args, kwargs);
  if (self.is<DictPtr>()) return dict_method(*this, self.as<DictPtr>(), name, args, kwargs);
  raise("AttributeError", "'" + type_name(self) + "' object has no attribute '" + name + "'");
}

// ---------------------------------------------------------------------------------------------
// operators

Value Interp::binop(const std::string& op, const Value& a, const Value& b) {
  const bool nums = is_number(a) && is_number(b);
  const bool floats = nums && (a.is<double>() || b.is<double>());
  const auto unsupported = [&]() -> Value {
    raise("TypeError", "unsupported operand type(s) for " + op + ": '" + type_name(a) + "' and '" + type_name(b) + "'");
  };
  if (op == "+") {
    if (floats) return to_double(a) + to_double(b);
    if (nums) {
      std::int64_t r;
      return checked(__builtin_add_overflow(to_int(a, ""), to_int(b, ""), &r), r);
    }
    if (a.is<std::string>() && b.is<std::string>()) return a.as<std::string>() + b.as<std::string>();
    if (a.is<ListPtr>() && b.is<ListPtr>() && a.as<ListPtr>()->kind == b.as<ListPtr>()->kind) {
      auto items = a.as<ListPtr>()->items;
      const auto& more = b.as<ListPtr>()->items;
      items.insert(items.end(), more.begin(), more.end());
      return make_list(std::move(items), a.as<ListPtr>()->kind);
    }
    return unsupported();
  }
  if (op == "-") {
    if (floats) return to_double(a) - to_double(b);
    if (nums) {
      std::int64_t r;
      return checked(__builtin_sub_overflow(to_int(a, ""), to_int(b, ""), &r), r);
    }
    if (a.is<DictPtr>() && b.is<DictPtr>() && a.as<DictPtr>()->is_set) {
      auto out = make_dict(true);
      for (const auto& [k, v] : a.as<DictPtr>()->entries) {
        if (!dict_find(*b.as<DictPtr>(), k)) dict_set(*out, k, None{});
      }
      return out;
    }
    return unsupported();
  }
  if (op == "*") {
    if (floats) return to_double(a) * to_double(b);
    if (nums) {
      std::int64_t r;
      return checked(__builtin_mul_overflow(to_int(a, ""), to_int(b, ""), &r), r);
    }
    if (is_seq(a) && (b.is<std::int64_t>() || b.is<bool>())) return repeat(a, to_int(b, ""));
    if (is_seq(b) && (a.is<std::int64_t>() || a.is<bool>())) return repeat(b, to_int(a, ""));
    return unsupported();
  }
  if (op == "/") {
    if (!nums) return unsupported();
    const double d = to_double(b);
    if (d == 0.0) raise("ZeroDivisionError", "division by zero");
    return to_double(a) / d;
  }
  if (op == "//") {
    if (floats) {
      const double x = to_double(a), y = to_double(b);
      if (y == 0.0) raise("ZeroDivisionError", "float floor division by zero");
      double mod = std::fmod(x, y);
      double div = (x - mod) / y;
      if (mod != 0.0 && ((y < 0) != (mod < 0))) div -= 1.0;
      double floored = std::floor(div);
      if (div - floored > 0.5) floored += 1.0;
      if (div == 0.0) floored = std::copysign(0.0, x / y);
      return floored;
    }
    if (nums) return floor_div(to_int(a, ""), to_int(b, ""));
    return unsupported();
  }
  if (op == "%") {
    if (a.is<std::string>()) return percent_format(a.as<std::string>(), b);
    if (floats) return float_mod(to_double(a), to_double(b));
    if (nums) return floor_mod(to_int(a, ""), to_int(b, ""));
    return unsupported();
  }
  if (op == "**") {
    if (!nums) return unsupported();
    if (!floats && to_int(b, "") >= 0) return int_pow(to_int(a, ""), to_int(b, ""));
    const double x = to_double(a), y = to_double(b);
    if (x == 0.0 && y < 0) raise("ZeroDivisionError", "0.0 cannot be raised to a negative power");
    if (x < 0 && y != std::floor(y)) raise("ValueError", "complex results are not supported");
    return std::pow(x, y);
  }
  if (op == "&" || op == "|" || op == "^") {
    if (a.is<DictPtr>() && b.is<DictPtr>() && a.as<DictPtr>()->is_set && b.as<DictPtr>()->is_set) {
      auto& x = *a.as<DictPtr>();
      auto& y = *b.as<DictPtr>();
      auto out = make_dict(true);
      if (op == "&") {
        for (const auto& [k, v] : x.entries) {
          if (dict_find(y, k)) dict_set(*out, k, None{});
        }
      } else if (op == "|") {
        for (const auto& [k, v] : x.entries) dict_set(*out, k, None{});
        for (const auto& [k, v] : y.entries) dict_set(*out, k, None{});
      } else {
        for (const auto& [k, v] : x.entries) {
          if (!dict_find(y, k)) dict_set(*out, k, None{});
        }
        for (const auto& [k, v] : y.entries) {
          if (!dict_find(x, k)) dict_set(*out, k, None{});
        }
      }
      return out;
    }
    if (a.is<DictPtr>() && b.is<DictPtr>() && op == "|") {
      auto out = make_dict();
      for (const auto& [k, v] : a.as<DictPtr>()->entries) dict_set(*out, k, v);
      for (const auto& [k, v] : b.as<DictPtr>()->entries) dict_set(*out, k, v);
      return out;
    }
    if (!nums || floats) return unsupported();
    const auto x = to_int(a, ""), y = to_int(b, "");
    const std::int64_t r = op == "&" ? (x & y) : op == "|" ? (x | y) : (x ^ y);
    if (a.is<bool>() && b.is<bool>()) return r != 0;
    return r;
  }
  if (op == "<<" || op == ">>") {
    if (!nums || floats) return unsupported();
    const auto x = to_int(a, ""), y = to_int(b, "");
    if (y < 0) raise("ValueError", "negative shift count");
    if (op == ">>") return y >= 64 ? (x < 0 ? -1 : 0) : (x >> y);
    if (x == 0) return std::int64_t{0};
    if (y >= 63) raise("OverflowError", "integer result exceeds 64 bits");
    const std::int64_t r = static_cast<std::int64_t>(static_cast<std::uint64_t>(x) << y);
    if ((r >> y) != x) raise("OverflowError", "integer result exceeds 64 bits");
    return r;
  }
  return unsupported();
}

bool Interp::contains(const Value& container, const Value& item) {
  if (container.is<std::string>()) {
    if (!item.is<std::string>()) raise("TypeError", "'in <string>' requires string as left operand");
    return container.as<std::string>().find(item.as<std::string>()) != std::string::npos;
  }
  if (container.is<ListPtr>()) {
    const auto& items = container.as<ListPtr>()->items;
    return std::any_of(items.begin(), items.end(), [&](const Value& v) { return equals(v, item); });
  }
  if (container.is<DictPtr>()) return dict_find(*container.as<DictPtr>(), item) != nullptr;
  if (container.is<std::shared_ptr<RangeObj>>()) {
    if (!is_number(item)) return false;
    if (item.is<double>() && item.as<double>() != std::floor(item.as<double>())) return false;
    const auto& r = *container.as<std::shared_ptr<RangeObj>>();
    const std::int64_t x = item.is<double>() ? static_cast<std::int64_t>(item.as<double>()) : to_int(item, "");
    if (r.step > 0 ? (x < r.start || x >= r.stop) : (x > r.start || x <= r.stop)) return false;
    return (x - r.start) % r.step == 0;
  }
  raise("TypeError", "argument of type '" + type_name(container) + "' is not iterable");
}

Value Interp::getitem(const Value& obj, const Value& index) {
  if (obj.is<ListPtr>()) {
    const auto& items = obj.as<ListPtr>()->items;
    const auto i = normalize_index(to_int(index, "list indices"), static_cast<std::int64_t>(items.size()),
                                   obj.as<ListPtr>()->kind == ListKind::tuple ? "tuple" : "list");
    return items[static_cast<std::size_t>(i)];
  }
  if (obj.is<std::string>()) {
    const auto& s = obj.as<std::string>();
    const auto raw = to_int(index, "string indices");
    if (is_ascii(s)) {
      const auto i = normalize_index(raw, static_cast<std::int64_t>(s.size()), "string");
      return std::string(1, s[static_cast<std::size_t>(i)]);
    }
    const auto cps = code_points(s);
    return cps[static_cast<std::size_t>(normalize_index(raw, static_cast<std::int64_t>(cps.size()), "string"))];
  }
  if (obj.is<DictPtr>()) {
    auto& d = *obj.as<DictPtr>();
    if (d.is_set) raise("TypeError", "'set' object is not subscriptable");
    if (const Value* v = dict_find(d, index)) return *v;
    if (!d.default_factory.is<None>()) {
      Value fresh = call(d.default_factory, {});
      dict_set(d, index, fresh);
      return fresh;
    }
    raise("KeyError", repr(index));
  }
  if (obj.is<std::shared_ptr<RangeObj>>()) {
    const auto& r = *obj.as<std::shared_ptr<RangeObj>>();
    const auto i = normalize_index(to_int(index, "range indices"), r.size(), "range object");
    return r.start + i * r.step;
  }
  raise("TypeError", "'" + type_name(obj) + "' object is not subscriptable");
}

void Interp::setitem(const Value& obj, const Value& index, const Value& value) {
  if (obj.is<ListPtr>() && obj.as<ListPtr>()->kind == ListKind::list) {
    auto& items = obj.as<ListPtr>()->items;
    const auto i = normalize_index(to_int(index, "list indices"), static_cast<std::int64_t>(items.size()), "list assignment");
    items[static_cast<std::size_t>(i)] = value;
    return;
  }
  if (obj.is<DictPtr>() && !obj.as<DictPtr>()->is_set) {
    dict_set(*obj.as<DictPtr>(), index, value);
    return;
  }
  raise("TypeError", "'" + type_name(obj) + "' object does not support item assignment");
}

Value Interp::slice(const Value& obj, const Value& lower, const Value& upper, const Value& step) {
  if (obj.is<std::string>()) {
    const auto& s = obj.as<std::string>();
    std::string out;
    if (is_ascii(s)) {
      for (const auto i : slice_indices(static_cast<std::int64_t>(s.size()), lower, upper, step)) out += s[static_cast<std::size_t>(i)];
    } else {
      const auto cps = code_points(s);
      for (const auto i : slice_indices(static_cast<std::int64_t>(cps.size()), lower, upper, step)) out += cps[static_cast<std::size_t>(i)];
    }
    return out;
  }
  if (obj.is<ListPtr>() || obj.is<std::shared_ptr<RangeObj>>()) {
    const auto items = items_of(obj);
    std::vector<Value> out;
    for (const auto i : slice_indices(static_cast<std::int64_t>(items.size()), lower, upper, step)) out.push_back(items[static_cast<std::size_t>(i)]);
    return make_list(std::move(out), obj.is<ListPtr>() ? obj.as<ListPtr>()->kind : ListKind::list);
  }
  raise("TypeError", "'" + type_name(obj) + "' object is not subscriptable");
}

std::vector<Value> Interp::sort_values(std::vector<Value> items, const Value& key, bool reverse) {
  std::vector<Value> keys;
  if (key.is<None>()) {
    keys = items;
  } else {
    keys.reserve(items.size());
    for (const auto& item : items) keys.push_back(call(key, {item}));
  }
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return reverse ? compare(keys[y], keys[x]) < 0 : compare(keys[x], keys[y]) < 0;
  });
  std::vector<Value> out;
  out.reserve(items.size());
  for (const auto i : order) out.push_back(std::move(items[i]));
  return out;
}

Value Interp::import_module(const std::string& name) {
  const auto root = name.substr(0, name.find('.'));
  return make_module(*this, root);
}

// ---------------------------------------------------------------------------------------------
// public facade

struct Interpreter::Impl {
  Interp interp;
};

Interpreter::Interpreter(Options options) : impl_(std::make_unique<Impl>()) { impl_->interp.options = options; }
Interpreter::~Interpreter() = default;

namespace {

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PyError&) {
    throw;
  } catch (const Unserializable&) {
    throw;
  } catch (const std::bad_alloc&) {
    throw PyError("MemoryError", "");
  } catch (const std::exception& e) {
    throw PyError("SystemError", e.what());
  }
}

}  // namespace

void Interpreter::exec(std::string_view source) {
  guarded([&] {
    auto& in = impl_->interp;
    auto block = parse_module(source);
    in.modules.push_back(block);
    in.globals->vars["__name__"] = Value("__main__");
    Value ret;
    in.exec_block(*block, in.globals, ret);
  });
}

bool Interpreter::has_function(std::string_view name) const {
  const auto& vars = impl_->interp.globals->vars;
  const auto it = vars.find(std::string(name));
  return it != vars.end() && (it->second.is<std::shared_ptr<FuncObj>>() || it->second.is<std::shared_ptr<BuiltinObj>>());
}

nlohmann::json Interpreter::call(std::string_view name, const nlohmann::json& args) {
  return guarded([&] {
    auto& in = impl_->interp;
    if (!args.is_array()) raise("TypeError", "arguments must be a list");
    std::vector<Value> values;
    for (const auto& a : args) values.push_back(from_json(a));
    const Value fn = in.lookup(std::string(name), in.globals);
    const Value result = in.call(fn, std::move(values));
    return to_json(result);
  });
}

}  // namespace minipy
