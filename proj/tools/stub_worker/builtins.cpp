#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "interp.hpp"

namespace minipy {

namespace {

using ListPtr = std::shared_ptr<ListObj>;
using DictPtr = std::shared_ptr<DictObj>;
using Args = std::vector<Value>;

Value builtin(std::string name, NativeFn fn) {
  auto b = std::make_shared<BuiltinObj>();
  b->name = std::move(name);
  b->fn = std::move(fn);
  return b;
}

Value exc_class(const std::string& type) {
  auto e = std::make_shared<ExcObj>();
  e->type = type;
  return e;
}

void arity(const std::string& name, const Args& args, std::size_t lo, std::size_t hi) {
  if (args.size() < lo || args.size() > hi) {
    raise("TypeError", name + "() takes " + (lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi)) +
                           " arguments (" + std::to_string(args.size()) + " given)");
  }
}

std::optional<Value> kwarg(Kwargs& kwargs, const std::string& name) {
  for (auto it = kwargs.begin(); it != kwargs.end(); ++it) {
    if (it->first == name) {
      Value v = std::move(it->second);
      kwargs.erase(it);
      return v;
    }
  }
  return std::nullopt;
}

void no_kwargs(const std::string& name, const Kwargs& kwargs) {
  if (!kwargs.empty()) raise("TypeError", name + "() got an unexpected keyword argument '" + kwargs.front().first + "'");
}

Value tuple(std::vector<Value> items) { return make_list(std::move(items), ListKind::tuple); }

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string strip(const std::string& s, const Value& chars, bool left, bool right) {
  const auto drop = [&](char c) {
    if (chars.is<None>()) return is_space(static_cast<unsigned char>(c));
    return chars.as<std::string>().find(c) != std::string::npos;
  };
  std::size_t b = 0, e = s.size();
  if (left) {
    while (b < e && drop(s[b])) ++b;
  }
  if (right) {
    while (e > b && drop(s[e - 1])) --e;
  }
  return s.substr(b, e - b);
}

std::int64_t parse_int(const std::string& text, int base) {
  std::string s = strip(text, None{}, true, true);
  std::string digits;
  bool negative = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  if (base == 0) {
    base = 10;
    if (s.size() > i + 1 && s[i] == '0' && std::isalpha(static_cast<unsigned char>(s[i + 1]))) {
      const char p = static_cast<char>(std::tolower(s[i + 1]));
      base = p == 'x' ? 16 : p == 'o' ? 8 : p == 'b' ? 2 : 10;
      i += 2;
    }
  } else if (s.size() > i + 1 && s[i] == '0') {
    const char p = static_cast<char>(std::tolower(s[i + 1]));
    if ((base == 16 && p == 'x') || (base == 8 && p == 'o') || (base == 2 && p == 'b')) i += 2;
  }
  for (; i < s.size(); ++i) {
    if (s[i] == '_' && !digits.empty() && i + 1 < s.size()) continue;
    digits += s[i];
  }
  std::int64_t value = 0;
  const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
  if (digits.empty() || r.ec != std::errc() || r.ptr != digits.data() + digits.size()) {
    if (r.ec == std::errc::result_out_of_range) raise("OverflowError", "int too large");
    raise("ValueError", "invalid literal for int() with base " + std::to_string(base) + ": " + repr(Value(text)));
  }
  return negative ? -value : value;
}

double parse_float(const std::string& text) {
  std::string s = strip(text, None{}, true, true);
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
  const bool neg = !lower.empty() && lower[0] == '-';
  const std::string body = !lower.empty() && (lower[0] == '-' || lower[0] == '+') ? lower.substr(1) : lower;
  if (body == "inf" || body == "infinity") return neg ? -INFINITY : INFINITY;
  if (body == "nan") return NAN;
  std::string cleaned;
  for (const char c : s) {
    if (c != '_') cleaned += c;
  }
  char* end = nullptr;
  const double d = std::strtod(cleaned.c_str(), &end);
  if (cleaned.empty() || end != cleaned.c_str() + cleaned.size()) raise("ValueError", "could not convert string to float: " + repr(Value(text)));
  return d;
}

std::int64_t int_of(const Value& v) {
  if (v.is<double>()) {
    const double d = v.as<double>();
    if (std::isnan(d)) raise("ValueError", "cannot convert float NaN to integer");
    if (std::isinf(d)) raise("OverflowError", "cannot convert float infinity to integer");
    if (std::fabs(d) >= 9.2233720368547758e18) raise("OverflowError", "int too large");
    return static_cast<std::int64_t>(std::trunc(d));
  }
  if (v.is<std::string>()) return parse_int(v.as<std::string>(), 10);
  return to_int(v, "int() argument");
}

Value min_max(Interp& in, const std::string& name, Args& args, Kwargs& kwargs, int sign) {
  const auto key = kwarg(kwargs, "key");
  const auto fallback = kwarg(kwargs, "default");
  no_kwargs(name, kwargs);
  if (args.empty()) raise("TypeError", name + " expected at least 1 argument, got 0");
  const std::vector<Value> items = args.size() == 1 ? items_of(args[0]) : args;
  if (items.empty()) {
    if (fallback) return *fallback;
    raise("ValueError", name + "() arg is an empty sequence");
  }
  const bool keyed = key && !key->is<None>();
  std::size_t best = 0;
  Value best_key = keyed ? in.call(*key, {items[0]}) : items[0];
  for (std::size_t i = 1; i < items.size(); ++i) {
    Value k = keyed ? in.call(*key, {items[i]}) : items[i];
    if (compare(k, best_key) * sign > 0) {
      best = i;
      best_key = std::move(k);
    }
  }
  return items[best];
}

Value python_round(const Value& x, const Value& digits) {
  if (digits.is<None>()) {
    if (!x.is<double>()) return to_int(x, "round()");
    return int_of(Value(std::nearbyint(x.as<double>())));
  }
  const auto n = to_int(digits, "round() digits");
  if (!x.is<double>()) {
    if (n >= 0) return to_int(x, "round()");
    const auto v = to_int(x, "round()");
    std::int64_t p = 1;
    for (std::int64_t i = 0; i < -n && p < INT64_MAX / 10; ++i) p *= 10;
    const double q = std::nearbyint(static_cast<double>(v) / static_cast<double>(p));
    return static_cast<std::int64_t>(q) * p;
  }
  const double d = x.as<double>();
  if (!std::isfinite(d) || n > 300) return d;
  if (n < 0) {
    const double p = std::pow(10.0, static_cast<double>(-n));
    return std::nearbyint(d / p) * p;
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", static_cast<int>(n), d);
  return std::strtod(buf, nullptr);
}

void heap_sift_down(std::vector<Value>& heap, std::size_t start, std::size_t pos) {
  Value item = heap[pos];
  while (pos > start) {
    const std::size_t parent = (pos - 1) >> 1;
    if (compare(item, heap[parent]) < 0) {
      heap[pos] = heap[parent];
      pos = parent;
      continue;
    }
    break;
  }
  heap[pos] = item;
}

void heap_sift_up(std::vector<Value>& heap, std::size_t pos) {
  const std::size_t end = heap.size();
  const std::size_t start = pos;
  Value item = heap[pos];
  std::size_t child = 2 * pos + 1;
  while (child < end) {
    const std::size_t right = child + 1;
    if (right < end && !(compare(heap[child], heap[right]) < 0)) child = right;
    heap[pos] = heap[child];
    pos = child;
    child = 2 * pos + 1;
  }
  heap[pos] = item;
  heap_sift_down(heap, start, pos);
}

std::vector<Value>& list_arg(const Value& v, const char* fn) {
  if (!v.is<ListPtr>() || v.as<ListPtr>()->kind != ListKind::list) raise("TypeError", std::string(fn) + " requires a list");
  return v.as<ListPtr>()->items;
}

void combos(const std::vector<Value>& pool, std::size_t r, std::size_t start, std::vector<Value>& cur, std::vector<Value>& out) {
  if (cur.size() == r) {
    out.push_back(tuple(cur));
    return;
  }
  for (std::size_t i = start; i < pool.size(); ++i) {
    cur.push_back(pool[i]);
    combos(pool, r, i + 1, cur, out);
    cur.pop_back();
  }
}

void perms(const std::vector<Value>& pool, std::size_t r, std::vector<bool>& used, std::vector<Value>& cur, std::vector<Value>& out) {
  if (cur.size() == r) {
    out.push_back(tuple(cur));
    return;
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    cur.push_back(pool[i]);
    perms(pool, r, used, cur, out);
    cur.pop_back();
    used[i] = false;
  }
}

void guard_size(double n) {
  if (n > 5e6) raise("MemoryError", "result too large");
}

}  // namespace

void install_builtins(Interp& in) {
  auto& b = in.builtins;
  for (const char* e : {"Exception", "BaseException", "ValueError", "TypeError", "KeyError", "IndexError",
                        "ZeroDivisionError", "RuntimeError", "AssertionError", "ArithmeticError", "LookupError",
                        "NotImplementedError", "OverflowError", "RecursionError", "StopIteration", "NameError",
                        "AttributeError", "MemoryError", "ImportError"}) {
    b[e] = exc_class(e);
  }
  b["print"] = builtin("print", [](Interp&, Args&, Kwargs&) -> Value { return None{}; });
  b["input"] = builtin("input", [](Interp&, Args&, Kwargs&) -> Value { raise("EOFError", "EOF when reading a line"); });
  b["len"] = builtin("len", [](Interp&, Args& a, Kwargs& kw) -> Value {
    no_kwargs("len", kw);
    arity("len", a, 1, 1);
    const Value& v = a[0];
    if (v.is<std::string>()) return static_cast<std::int64_t>(str_length(v.as<std::string>()));
    if (v.is<ListPtr>()) return static_cast<std::int64_t>(v.as<ListPtr>()->items.size());
    if (v.is<DictPtr>()) return static_cast<std::int64_t>(v.as<DictPtr>()->entries.size());
    if (v.is<std::shared_ptr<RangeObj>>()) return v.as<std::shared_ptr<RangeObj>>()->size();
    raise("TypeError", "object of type '" + type_name(v) + "' has no len()");
  });
  b["range"] = builtin("range", [](Interp&, Args& a, Kwargs& kw) -> Value {
    no_kwargs("range", kw);
    arity("range", a, 1, 3);
    auto r = std::make_shared<RangeObj>();
    if (a.size() == 1) {
      r->stop = to_int(a[0], "range() arguments");
    } else {
      r->start = to_int(a[0], "range() arguments");
      r->stop = to_int(a[1], "range() arguments");
      if (a.size() == 3) r->step = to_int(a[2], "range() arguments");
    }
    if (r->step == 0) raise("ValueError", "range() arg 3 must not be zero");
    return r;
  });
  b["str"] = builtin("str", [](Interp&, Args& a, Kwargs&) -> Value { return a.empty() ? std::string() : str(a[0]); });
  b["repr"] = builtin("repr", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("repr", a, 1, 1);
    return repr(a[0]);
  });
  b["int"] = builtin("int", [](Interp&, Args& a, Kwargs& kw) -> Value {
    const auto base = kwarg(kw, "base");
    if (a.empty()) return std::int64_t{0};
    if (a.size() == 2 || base) {
      const Value& bv = a.size() == 2 ? a[1] : *base;
      if (!a[0].is<std::string>()) raise("TypeError", "int() can't convert non-string with explicit base");
      return parse_int(a[0].as<std::string>(), static_cast<int>(to_int(bv, "base")));
    }
    return int_of(a[0]);
  });
  b["float"] = builtin("float", [](Interp&, Args& a, Kwargs&) -> Value {
    if (a.empty()) return 0.0;
    if (a[0].is<std::string>()) return parse_float(a[0].as<std::string>());
    return to_double(a[0]);
  });
  b["bool"] = builtin("bool", [](Interp&, Args& a, Kwargs&) -> Value { return !a.empty() && truthy(a[0]); });
  b["abs"] = builtin("abs", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("abs", a, 1, 1);
    if (a[0].is<double>()) return std::fabs(a[0].as<double>());
    const auto i = to_int(a[0], "abs()");
    if (i == INT64_MIN) raise("OverflowError", "integer result exceeds 64 bits");
    return i < 0 ? -i : i;
  });
  b["min"] = builtin("min", [](Interp& i, Args& a, Kwargs& kw) { return min_max(i, "min", a, kw, -1); });
  b["max"] = builtin("max", [](Interp& i, Args& a, Kwargs& kw) { return min_max(i, "max", a, kw, 1); });
  b["sum"] = builtin("sum", [](Interp& i, Args& a, Kwargs& kw) -> Value {
    const auto start_kw = kwarg(kw, "start");
    arity("sum", a, 1, 2);
    Value total = a.size() == 2 ? a[1] : start_kw ? *start_kw : Value(std::int64_t{0});
    if (total.is<std::string>()) raise("TypeError", "sum() can't sum strings [use ''.join(seq) instead]");
    if (a[0].is<std::shared_ptr<RangeObj>>()) {
      const auto r = *a[0].as<std::shared_ptr<RangeObj>>();
      for (std::int64_t k = 0; k < r.size(); ++k) total = i.binop("+", total, Value(r.start + k * r.step));
      return total;
    }
    for (const auto& v : items_of(a[0])) total = i.binop("+", total, v);
    return total;
  });
  b["sorted"] = builtin("sorted", [](Interp& i, Args& a, Kwargs& kw) -> Value {
    const auto key = kwarg(kw, "key");
    const auto reverse = kwarg(kw, "reverse");
    no_kwargs("sorted", kw);
    arity("sorted", a, 1, 1);
    return make_list(i.sort_values(items_of(a[0]), key ? *key : Value(None{}), reverse && truthy(*reverse)));
  });
  b["reversed"] = builtin("reversed", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("reversed", a, 1, 1);
    if (a[0].is<DictPtr>() && a[0].as<DictPtr>()->is_set) raise("TypeError", "'set' object is not reversible");
    auto items = items_of(a[0]);
    std::reverse(items.begin(), items.end());
    return make_list(std::move(items));
  });
  b["enumerate"] = builtin("enumerate", [](Interp&, Args& a, Kwargs& kw) -> Value {
    const auto start_kw = kwarg(kw, "start");
    arity("enumerate", a, 1, 2);
    std::int64_t n = a.size() == 2 ? to_int(a[1], "start") : start_kw ? to_int(*start_kw, "start") : 0;
    std::vector<Value> out;
    for (auto& v : items_of(a[0])) out.push_back(tuple({Value(n++), std::move(v)}));
    return make_list(std::move(out));
  });
  b["zip"] = builtin("zip", [](Interp&, Args& a, Kwargs& kw) -> Value {
    kwarg(kw, "strict");
    std::vector<std::vector<Value>> seqs;
    std::size_t n = a.empty() ? 0 : SIZE_MAX;
    for (const auto& v : a) {
      seqs.push_back(items_of(v));
      n = std::min(n, seqs.back().size());
    }
    std::vector<Value> out;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Value> row;
      for (const auto& s : seqs) row.push_back(s[k]);
      out.push_back(tuple(std::move(row)));
    }
    return make_list(std::move(out));
  });
  b["map"] = builtin("map", [](Interp& i, Args& a, Kwargs&) -> Value {
    if (a.size() < 2) raise("TypeError", "map() must have at least two arguments.");
    std::vector<std::vector<Value>> seqs;
    std::size_t n = SIZE_MAX;
    for (std::size_t k = 1; k < a.size(); ++k) {
      seqs.push_back(items_of(a[k]));
      n = std::min(n, seqs.back().size());
    }
    std::vector<Value> out;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Value> call_args;
      for (const auto& s : seqs) call_args.push_back(s[k]);
      out.push_back(i.call(a[0], std::move(call_args)));
    }
    return make_list(std::move(out));
  });
  b["filter"] = builtin("filter", [](Interp& i, Args& a, Kwargs&) -> Value {
    arity("filter", a, 2, 2);
    std::vector<Value> out;
    for (auto& v : items_of(a[1])) {
      if (a[0].is<None>() ? truthy(v) : truthy(i.call(a[0], {v}))) out.push_back(std::move(v));
    }
    return make_list(std::move(out));
  });
  b["any"] = builtin("any", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("any", a, 1, 1);
    const auto items = items_of(a[0]);
    return std::any_of(items.begin(), items.end(), truthy);
  });
  b["all"] = builtin("all", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("all", a, 1, 1);
    const auto items = items_of(a[0]);
    return std::all_of(items.begin(), items.end(), truthy);
  });
  b["list"] = builtin("list", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("list", a, 0, 1);
    return make_list(a.empty() ? std::vector<Value>{} : items_of(a[0]));
  });
  b["tuple"] = builtin("tuple", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("tuple", a, 0, 1);
    return tuple(a.empty() ? std::vector<Value>{} : items_of(a[0]));
  });
  b["set"] = builtin("set", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("set", a, 0, 1);
    auto d = make_dict(true);
    if (!a.empty()) {
      for (const auto& v : items_of(a[0])) dict_set(*d, v, None{});
    }
    return d;
  });
  b["frozenset"] = b["set"];
  b["dict"] = builtin("dict", [](Interp&, Args& a, Kwargs& kw) -> Value {
    arity("dict", a, 0, 1);
    auto d = make_dict();
    if (!a.empty()) {
      if (a[0].is<DictPtr>() && !a[0].as<DictPtr>()->is_set) {
        for (const auto& [k, v] : a[0].as<DictPtr>()->entries) dict_set(*d, k, v);
      } else {
        for (const auto& pair : items_of(a[0])) {
          const auto kv = items_of(pair);
          if (kv.size() != 2) raise("ValueError", "dictionary update sequence element has length " + std::to_string(kv.size()) + "; 2 is required");
          dict_set(*d, kv[0], kv[1]);
        }
      }
    }
    for (auto& [k, v] : kw) dict_set(*d, Value(k), v);
    return d;
  });
  b["isinstance"] = builtin("isinstance", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("isinstance", a, 2, 2);
    std::vector<Value> types = a[1].is<ListPtr>() ? a[1].as<ListPtr>()->items : std::vector<Value>{a[1]};
    const auto actual = type_name(a[0]);
    for (const auto& t : types) {
      if (t.is<std::shared_ptr<BuiltinObj>>()) {
        const auto& n = t.as<std::shared_ptr<BuiltinObj>>()->name;
        if (n == actual || (n == "int" && actual == "bool") || (n == "frozenset" && actual == "set")) return true;
      } else if (t.is<std::shared_ptr<ExcObj>>() && a[0].is<std::shared_ptr<ExcObj>>() && a[0].as<std::shared_ptr<ExcObj>>()->instance) {
        if (exception_matches(actual, t.as<std::shared_ptr<ExcObj>>()->type)) return true;
      }
    }
    return false;
  });
  b["type"] = builtin("type", [](Interp& i, Args& a, Kwargs&) -> Value {
    arity("type", a, 1, 1);
    const auto name = type_name(a[0]);
    const auto it = i.builtins.find(name);
    if (it != i.builtins.end()) return it->second;
    return exc_class(name);
  });
  b["round"] = builtin("round", [](Interp&, Args& a, Kwargs& kw) -> Value {
    const auto nd = kwarg(kw, "ndigits");
    arity("round", a, 1, 2);
    return python_round(a[0], a.size() == 2 ? a[1] : nd ? *nd : Value(None{}));
  });
  b["divmod"] = builtin("divmod", [](Interp& i, Args& a, Kwargs&) -> Value {
    arity("divmod", a, 2, 2);
    return tuple({i.binop("//", a[0], a[1]), i.binop("%", a[0], a[1])});
  });
  b["pow"] = builtin("pow", [](Interp& i, Args& a, Kwargs&) -> Value {
    arity("pow", a, 2, 3);
    if (a.size() == 2) return i.binop("**", a[0], a[1]);
    auto base = to_int(a[0], "pow()"), exp = to_int(a[1], "pow()"), mod = to_int(a[2], "pow()");
    if (mod == 0) raise("ValueError", "pow() 3rd argument cannot be 0");
    if (exp < 0) raise("ValueError", "negative exponents with a modulus are not supported");
    __int128 result = 1 % mod, b2 = ((base % mod) + mod) % mod;
    while (exp > 0) {
      if (exp & 1) result = (result * b2) % mod;
      b2 = (b2 * b2) % mod;
      exp >>= 1;
    }
    std::int64_t r = static_cast<std::int64_t>(result);
    if (r != 0 && ((r < 0) != (mod < 0))) r += mod;
    return r;
  });
  b["ord"] = builtin("ord", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("ord", a, 1, 1);
    if (!a[0].is<std::string>() || str_length(a[0].as<std::string>()) != 1) raise("TypeError", "ord() expected a character");
    const auto& s = a[0].as<std::string>();
    const auto c = static_cast<unsigned char>(s[0]);
    if (c < 0x80) return static_cast<std::int64_t>(c);
    std::uint32_t cp = c >= 0xF0 ? c & 0x07 : c >= 0xE0 ? c & 0x0F : c & 0x1F;
    for (std::size_t k = 1; k < s.size(); ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[k]) & 0x3F);
    return static_cast<std::int64_t>(cp);
  });
  b["chr"] = builtin("chr", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("chr", a, 1, 1);
    const auto cp = to_int(a[0], "chr()");
    if (cp < 0 || cp > 0x10FFFF) raise("ValueError", "chr() arg not in range(0x110000)");
    std::string out;
    const auto u = static_cast<std::uint32_t>(cp);
    if (u < 0x80) {
      out += static_cast<char>(u);
    } else if (u < 0x800) {
      out += static_cast<char>(0xC0 | (u >> 6));
      out += static_cast<char>(0x80 | (u & 0x3F));
    } else if (u < 0x10000) {
      out += static_cast<char>(0xE0 | (u >> 12));
      out += static_cast<char>(0x80 | ((u >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (u & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (u >> 18));
      out += static_cast<char>(0x80 | ((u >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((u >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (u & 0x3F));
    }
    return out;
  });
  b["hash"] = builtin("hash", [](Interp&, Args& a, Kwargs&) -> Value {
    arity("hash", a, 1, 1);
    return static_cast<std::int64_t>(std::hash<std::string>{}(key_of(a[0])) >> 1);
  });
}

// ---------------------------------------------------------------------------------------------
// methods

Value string_method(Interp& in, const std::string& s, const std::string& name, Args& a, Kwargs& kw) {
  const auto str_arg = [&](std::size_t i) -> const std::string& {
    if (i >= a.size() || !a[i].is<std::string>()) raise("TypeError", name + "() argument must be str");
    return a[i].as<std::string>();
  };
  if (name == "join") {
    arity(name, a, 1, 1);
    std::string out;
    bool first = true;
    for (const auto& item : items_of(a[0])) {
      if (!item.is<std::string>()) raise("TypeError", "sequence item: expected str instance, " + type_name(item) + " found");
      if (!first) out += s;
      out += item.as<std::string>();
      first = false;
    }
    return out;
  }
  if (name == "split" || name == "rsplit") {
    const auto sep_kw = kwarg(kw, "sep");
    const auto max_kw = kwarg(kw, "maxsplit");
    const Value sep = !a.empty() ? a[0] : sep_kw ? *sep_kw : Value(None{});
    std::int64_t maxsplit = a.size() > 1 ? to_int(a[1], "maxsplit") : max_kw ? to_int(*max_kw, "maxsplit") : -1;
    std::vector<Value> out;
    if (sep.is<None>()) {
      std::size_t i = 0;
      while (true) {
        while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
        if (i >= s.size()) break;
        if (maxsplit == 0) {
          out.emplace_back(strip(s.substr(i), None{}, false, true));
          break;
        }
        std::size_t j = i;
        while (j < s.size() && !is_space(static_cast<unsigned char>(s[j]))) ++j;
        out.emplace_back(s.substr(i, j - i));
        if (maxsplit > 0) --maxsplit;
        i = j;
      }
      return make_list(std::move(out));
    }
    const auto& d = sep.as<std::string>();
    if (d.empty()) raise("ValueError", "empty separator");
    std::size_t start = 0;
    while (true) {
      const auto pos = maxsplit == 0 ? std::string::npos : s.find(d, start);
      if (pos == std::string::npos) {
        out.emplace_back(s.substr(start));
        break;
      }
      out.emplace_back(s.substr(start, pos - start));
      start = pos + d.size();
      if (maxsplit > 0) --maxsplit;
    }
    return make_list(std::move(out));
  }
  if (name == "splitlines") {
    std::vector<Value> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\n' || s[i] == '\r') {
        out.emplace_back(s.substr(start, i - start));
        if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
        start = i + 1;
      }
    }
    if (start < s.size()) out.emplace_back(s.substr(start));
    return make_list(std::move(out));
  }
  if (name == "strip" || name == "lstrip" || name == "rstrip") {
    arity(name, a, 0, 1);
    const Value chars = a.empty() ? Value(None{}) : a[0];
    return strip(s, chars, name != "rstrip", name != "lstrip");
  }
  if (name == "upper" || name == "lower" || name == "swapcase") {
    std::string out = s;
    for (auto& c : out) {
      if (name == "upper") c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      else if (name == "lower") c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      else c = std::isupper(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
  }
  if (name == "title" || name == "capitalize") {
    std::string out = s;
    bool start = true;
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto c = static_cast<unsigned char>(out[i]);
      if (name == "capitalize") {
        out[i] = static_cast<char>(i == 0 ? std::toupper(c) : std::tolower(c));
        continue;
      }
      if (std::isalpha(c)) {
        out[i] = static_cast<char>(start ? std::toupper(c) : std::tolower(c));
        start = false;
      } else {
        start = true;
      }
    }
    return out;
  }
  if (name == "replace") {
    arity(name, a, 2, 3);
    const auto& from = str_arg(0);
    const auto& to = str_arg(1);
    std::int64_t count = a.size() == 3 ? to_int(a[2], "count") : -1;
    std::string out;
    if (from.empty()) {
      for (const auto& cp : code_points(s)) {
        if (count != 0) {
          out += to;
          if (count > 0) --count;
        }
        out += cp;
      }
      if (count != 0) out += to;
      return out;
    }
    std::size_t start = 0;
    while (count != 0) {
      const auto pos = s.find(from, start);
      if (pos == std::string::npos) break;
      out += s.substr(start, pos - start) + to;
      start = pos + from.size();
      if (count > 0) --count;
    }
    return out + s.substr(start);
  }
  if (name == "startswith" || name == "endswith") {
    arity(name, a, 1, 1);
    std::vector<Value> options = a[0].is<ListPtr>() ? a[0].as<ListPtr>()->items : std::vector<Value>{a[0]};
    for (const auto& o : options) {
      if (!o.is<std::string>()) raise("TypeError", name + " first arg must be str or a tuple of str");
      const auto& p = o.as<std::string>();
      if (name == "startswith" ? s.starts_with(p) : s.ends_with(p)) return true;
    }
    return false;
  }
  if (name == "find" || name == "index" || name == "rfind" || name == "rindex") {
    arity(name, a, 1, 1);
    const auto& needle = str_arg(0);
    const auto pos = name[0] == 'r' ? s.rfind(needle) : s.find(needle);
    if (pos == std::string::npos) {
      if (name.ends_with("index")) raise("ValueError", "substring not found");
      return std::int64_t{-1};
    }
    return static_cast<std::int64_t>(str_length(s.substr(0, pos)));
  }
  if (name == "count") {
    arity(name, a, 1, 1);
    const auto& needle = str_arg(0);
    if (needle.empty()) return static_cast<std::int64_t>(str_length(s) + 1);
    std::int64_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + needle.size())) ++n;
    return n;
  }
  if (name == "isdigit" || name == "isnumeric" || name == "isdecimal" || name == "isalpha" || name == "isalnum" ||
      name == "isspace" || name == "isupper" || name == "islower") {
    if (s.empty()) return false;
    bool cased = false;
    for (const unsigned char c : s) {
      bool ok = true;
      if (name == "isdigit" || name == "isnumeric" || name == "isdecimal") ok = std::isdigit(c);
      else if (name == "isalpha") ok = std::isalpha(c) || c >= 0x80;
      else if (name == "isalnum") ok = std::isalnum(c) || c >= 0x80;
      else if (name == "isspace") ok = is_space(c);
      else if (name == "isupper") {
        ok = !std::islower(c);
        cased = cased || std::isupper(c);
      } else {
        ok = !std::isupper(c);
        cased = cased || std::islower(c);
      }
      if (!ok) return false;
    }
    return name == "isupper" || name == "islower" ? cased : true;
  }
  if (name == "zfill") {
    arity(name, a, 1, 1);
    const auto width = static_cast<std::size_t>(std::max<std::int64_t>(0, to_int(a[0], "width")));
    const auto len = str_length(s);
    if (len >= width) return s;
    const bool sign = !s.empty() && (s[0] == '-' || s[0] == '+');
    return (sign ? s.substr(0, 1) : "") + std::string(width - len, '0') + (sign ? s.substr(1) : s);
  }
  if (name == "ljust" || name == "rjust" || name == "center") {
    arity(name, a, 1, 2);
    const auto width = static_cast<std::size_t>(std::max<std::int64_t>(0, to_int(a[0], "width")));
    const std::string fill = a.size() == 2 ? str_arg(1) : " ";
    const auto len = str_length(s);
    if (len >= width) return s;
    const auto pad = width - len;
    const auto rep = [&](std::size_t n) {
      std::string out;
      for (std::size_t i = 0; i < n; ++i) out += fill;
      return out;
    };
    if (name == "ljust") return s + rep(pad);
    if (name == "rjust") return rep(pad) + s;
    const std::size_t left = pad / 2 + (pad & width & 1);
    return rep(left) + s + rep(pad - left);
  }
  if (name == "partition" || name == "rpartition") {
    arity(name, a, 1, 1);
    const auto& sep = str_arg(0);
    const auto pos = name == "partition" ? s.find(sep) : s.rfind(sep);
    if (pos == std::string::npos) {
      return name == "partition" ? tuple({Value(s), Value(""), Value("")}) : tuple({Value(""), Value(""), Value(s)});
    }
    return tuple({Value(s.substr(0, pos)), Value(sep), Value(s.substr(pos + sep.size()))});
  }
  if (name == "format") {
    std::string out;
    std::size_t auto_index = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      if (c == '{' && i + 1 < s.size() && s[i + 1] == '{') {
        out += '{';
        ++i;
        continue;
      }
      if (c == '}' && i + 1 < s.size() && s[i + 1] == '}') {
        out += '}';
        ++i;
        continue;
      }
      if (c != '{') {
        out += c;
        continue;
      }
      const auto close = s.find('}', i);
      if (close == std::string::npos) raise("ValueError", "Single '{' encountered in format string");
      std::string field = s.substr(i + 1, close - i - 1);
      std::string spec;
      char conversion = 0;
      if (const auto colon = field.find(':'); colon != std::string::npos) {
        spec = field.substr(colon + 1);
        field = field.substr(0, colon);
      }
      if (const auto bang = field.find('!'); bang != std::string::npos && bang + 1 < field.size()) {
        conversion = field[bang + 1];
        field = field.substr(0, bang);
      }
      Value v;
      if (field.empty()) {
        if (auto_index >= a.size()) raise("IndexError", "Replacement index " + std::to_string(auto_index) + " out of range");
        v = a[auto_index++];
      } else if (std::all_of(field.begin(), field.end(), ::isdigit)) {
        const auto idx = std::stoul(field);
        if (idx >= a.size()) raise("IndexError", "Replacement index " + field + " out of range");
        v = a[idx];
      } else {
        const auto it = std::find_if(kw.begin(), kw.end(), [&](const auto& p) { return p.first == field; });
        if (it == kw.end()) raise("KeyError", repr(Value(field)));
        v = it->second;
      }
      if (conversion == 'r') v = repr(v);
      if (conversion == 's') v = str(v);
      out += format_value(v, spec);
      i = close;
    }
    return out;
  }
  if (name == "encode") return s;
  (void)in;
  raise("AttributeError", "'str' object has no attribute '" + name + "'");
}

Value list_method(Interp& in, const ListPtr& l, const std::string& name, Args& a, Kwargs& kw) {
  auto& items = l->items;
  const bool mutable_list = l->kind == ListKind::list;
  const auto n = static_cast<std::int64_t>(items.size());
  if (name == "index" || name == "count") {
    arity(name, a, 1, 1);
    std::int64_t count = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!equals(items[i], a[0])) continue;
      if (name == "index") return static_cast<std::int64_t>(i);
      ++count;
    }
    if (name == "index") raise("ValueError", repr(a[0]) + " is not in list");
    return count;
  }
  if (!mutable_list) raise("AttributeError", "'tuple' object has no attribute '" + name + "'");
  if (name == "append") {
    arity(name, a, 1, 1);
    items.push_back(a[0]);
    return None{};
  }
  if (name == "appendleft") {
    arity(name, a, 1, 1);
    items.insert(items.begin(), a[0]);
    return None{};
  }
  if (name == "extend") {
    arity(name, a, 1, 1);
    auto more = items_of(a[0]);
    items.insert(items.end(), more.begin(), more.end());
    return None{};
  }
  if (name == "pop" || name == "popleft") {
    arity(name, a, 0, name == "pop" ? 1 : 0);
    if (items.empty()) raise("IndexError", "pop from empty list");
    std::int64_t i = name == "popleft" ? 0 : a.empty() ? n - 1 : to_int(a[0], "index");
    if (i < 0) i += n;
    if (i < 0 || i >= n) raise("IndexError", "pop index out of range");
    Value v = items[static_cast<std::size_t>(i)];
    items.erase(items.begin() + i);
    return v;
  }
  if (name == "insert") {
    arity(name, a, 2, 2);
    std::int64_t i = to_int(a[0], "index");
    if (i < 0) i = std::max<std::int64_t>(0, i + n);
    i = std::min(i, n);
    items.insert(items.begin() + i, a[1]);
    return None{};
  }
  if (name == "remove") {
    arity(name, a, 1, 1);
    for (auto it = items.begin(); it != items.end(); ++it) {
      if (equals(*it, a[0])) {
        items.erase(it);
        return None{};
      }
    }
    raise("ValueError", "list.remove(x): x not in list");
  }
  if (name == "sort") {
    const auto key = kwarg(kw, "key");
    const auto reverse = kwarg(kw, "reverse");
    no_kwargs(name, kw);
    items = in.sort_values(std::move(items), key ? *key : Value(None{}), reverse && truthy(*reverse));
    return None{};
  }
  if (name == "reverse") {
    std::reverse(items.begin(), items.end());
    return None{};
  }
  if (name == "copy") return make_list(items);
  if (name == "clear") {
    items.clear();
    return None{};
  }
  raise("AttributeError", "'list' object has no attribute '" + name + "'");
}

Value dict_method(Interp& in, const DictPtr& d, const std::string& name, Args& a, Kwargs& kw) {
  if (d->is_set) {
    if (name == "add") {
      arity(name, a, 1, 1);
      dict_set(*d, a[0], None{});
      return None{};
    }
    if (name == "discard" || name == "remove") {
      arity(name, a, 1, 1);
      if (!dict_erase(*d, a[0]) && name == "remove") raise("KeyError", repr(a[0]));
      return None{};
    }
    if (name == "pop") {
      if (d->entries.empty()) raise("KeyError", "'pop from an empty set'");
      Value v = d->entries.front().first;
      dict_erase(*d, v);
      return v;
    }
    if (name == "union" || name == "intersection" || name == "difference" || name == "symmetric_difference") {
      Value acc = d;
      const std::string op = name == "union" ? "|" : name == "intersection" ? "&" : name == "difference" ? "-" : "^";
      for (const auto& other : a) {
        auto s = make_dict(true);
        for (const auto& v : items_of(other)) dict_set(*s, v, None{});
        acc = in.binop(op, acc, s);
      }
      if (a.empty()) {
        auto copy = make_dict(true);
        for (const auto& [k, v] : d->entries) dict_set(*copy, k, None{});
        return copy;
      }
      return acc;
    }
    if (name == "update") {
      for (const auto& other : a) {
        for (const auto& v : items_of(other)) dict_set(*d, v, None{});
      }
      return None{};
    }
    if (name == "issubset" || name == "issuperset" || name == "isdisjoint") {
      arity(name, a, 1, 1);
      auto other = make_dict(true);
      for (const auto& v : items_of(a[0])) dict_set(*other, v, None{});
      if (name == "issubset") {
        return std::all_of(d->entries.begin(), d->entries.end(), [&](const auto& e) { return dict_find(*other, e.first) != nullptr; });
      }
      if (name == "issuperset") {
        return std::all_of(other->entries.begin(), other->entries.end(), [&](const auto& e) { return dict_find(*d, e.first) != nullptr; });
      }
      return std::none_of(d->entries.begin(), d->entries.end(), [&](const auto& e) { return dict_find(*other, e.first) != nullptr; });
    }
    if (name == "copy") {
      auto copy = make_dict(true);
      for (const auto& [k, v] : d->entries) dict_set(*copy, k, None{});
      return copy;
    }
    if (name == "clear") {
      d->entries.clear();
      d->index.clear();
      return None{};
    }
    raise("AttributeError", "'set' object has no attribute '" + name + "'");
  }
  if (name == "get") {
    arity(name, a, 1, 2);
    if (const Value* v = dict_find(*d, a[0])) return *v;
    return a.size() == 2 ? a[1] : Value(None{});
  }
  if (name == "keys" || name == "values" || name == "items") {
    std::vector<Value> out;
    for (const auto& [k, v] : d->entries) {
      if (name == "keys") out.push_back(k);
      else if (name == "values") out.push_back(v);
      else out.push_back(tuple({k, v}));
    }
    return make_list(std::move(out));
  }
  if (name == "setdefault") {
    arity(name, a, 1, 2);
    if (const Value* v = dict_find(*d, a[0])) return *v;
    Value fresh = a.size() == 2 ? a[1] : Value(None{});
    dict_set(*d, a[0], fresh);
    return fresh;
  }
  if (name == "pop") {
    arity(name, a, 1, 2);
    if (const Value* v = dict_find(*d, a[0])) {
      Value out = *v;
      dict_erase(*d, a[0]);
      return out;
    }
    if (a.size() == 2) return a[1];
    raise("KeyError", repr(a[0]));
  }
  if (name == "popitem") {
    if (d->entries.empty()) raise("KeyError", "'popitem(): dictionary is empty'");
    auto last = d->entries.back();
    dict_erase(*d, last.first);
    return tuple({last.first, last.second});
  }
  if (name == "update") {
    for (const auto& other : a) {
      if (other.is<DictPtr>()) {
        for (const auto& [k, v] : other.as<DictPtr>()->entries) dict_set(*d, k, v);
      } else {
        for (const auto& pair : items_of(other)) {
          const auto kv = items_of(pair);
          if (kv.size() != 2) raise("ValueError", "dictionary update sequence element must have length 2");
          dict_set(*d, kv[0], kv[1]);
        }
      }
    }
    for (auto& [k, v] : kw) dict_set(*d, Value(k), v);
    return None{};
  }
  if (name == "copy") {
    auto copy = make_dict();
    copy->default_factory = d->default_factory;
    copy->counter = d->counter;
    for (const auto& [k, v] : d->entries) dict_set(*copy, k, v);
    return copy;
  }
  if (name == "clear") {
    d->entries.clear();
    d->index.clear();
    return None{};
  }
  if (name == "most_common" && d->counter) {
    arity(name, a, 0, 1);
    std::vector<Value> pairs;
    for (const auto& [k, v] : d->entries) pairs.push_back(tuple({k, v}));
    std::stable_sort(pairs.begin(), pairs.end(), [](const Value& x, const Value& y) {
      return compare(x.as<ListPtr>()->items[1], y.as<ListPtr>()->items[1]) > 0;
    });
    if (!a.empty() && !a[0].is<None>()) {
      const auto k = static_cast<std::size_t>(std::max<std::int64_t>(0, to_int(a[0], "n")));
      if (pairs.size() > k) pairs.resize(k);
    }
    return make_list(std::move(pairs));
  }
  raise("AttributeError", "'dict' object has no attribute '" + name + "'");
}

// ---------------------------------------------------------------------------------------------
// modules

Value make_module(Interp& in, const std::string& name) {
  auto m = std::make_shared<ModuleObj>();
  m->name = name;
  auto& at = m->attrs;
  const auto unary_math = [&](const char* fn, double (*f)(double)) {
    at[fn] = builtin(fn, [f, fn](Interp&, Args& a, Kwargs&) -> Value {
      arity(fn, a, 1, 1);
      const double r = f(to_double(a[0]));
      if (std::isnan(r) && !std::isnan(to_double(a[0]))) raise("ValueError", "math domain error");
      return r;
    });
  };
  if (name == "math") {
    at["pi"] = M_PI;
    at["e"] = M_E;
    at["tau"] = 2 * M_PI;
    at["inf"] = INFINITY;
    at["nan"] = NAN;
    unary_math("sqrt", [](double x) { return std::sqrt(x); });
    unary_math("exp", [](double x) { return std::exp(x); });
    unary_math("log2", [](double x) { return x <= 0 ? NAN : std::log2(x); });
    unary_math("log10", [](double x) { return x <= 0 ? NAN : std::log10(x); });
    unary_math("sin", [](double x) { return std::sin(x); });
    unary_math("cos", [](double x) { return std::cos(x); });
    unary_math("tan", [](double x) { return std::tan(x); });
    unary_math("atan", [](double x) { return std::atan(x); });
    unary_math("fabs", [](double x) { return std::fabs(x); });
    at["log"] = builtin("log", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("log", a, 1, 2);
      const double x = to_double(a[0]);
      if (x <= 0) raise("ValueError", "math domain error");
      return a.size() == 2 ? std::log(x) / std::log(to_double(a[1])) : std::log(x);
    });
    at["atan2"] = builtin("atan2", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("atan2", a, 2, 2);
      return std::atan2(to_double(a[0]), to_double(a[1]));
    });
    at["hypot"] = builtin("hypot", [](Interp&, Args& a, Kwargs&) -> Value {
      double acc = 0;
      for (const auto& v : a) acc = std::hypot(acc, to_double(v));
      return acc;
    });
    at["pow"] = builtin("pow", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("pow", a, 2, 2);
      return std::pow(to_double(a[0]), to_double(a[1]));
    });
    for (const char* fn : {"floor", "ceil", "trunc"}) {
      const std::string f = fn;
      at[fn] = builtin(fn, [f](Interp&, Args& a, Kwargs&) -> Value {
        arity(f, a, 1, 1);
        if (!a[0].is<double>()) return to_int(a[0], f.c_str());
        const double x = a[0].as<double>();
        return int_of(Value(f == "floor" ? std::floor(x) : f == "ceil" ? std::ceil(x) : std::trunc(x)));
      });
    }
    at["gcd"] = builtin("gcd", [](Interp&, Args& a, Kwargs&) -> Value {
      std::int64_t g = 0;
      for (const auto& v : a) g = std::gcd(g, to_int(v, "gcd()"));
      return g < 0 ? -g : g;
    });
    at["lcm"] = builtin("lcm", [](Interp&, Args& a, Kwargs&) -> Value {
      std::int64_t l = 1;
      for (const auto& v : a) {
        const auto x = to_int(v, "lcm()");
        if (x == 0) return std::int64_t{0};
        const auto g = std::gcd(l, x);
        std::int64_t r;
        if (__builtin_mul_overflow(l / g, x < 0 ? -x : x, &r)) raise("OverflowError", "integer result exceeds 64 bits");
        l = r;
      }
      return l;
    });
    at["isqrt"] = builtin("isqrt", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("isqrt", a, 1, 1);
      const auto n = to_int(a[0], "isqrt()");
      if (n < 0) raise("ValueError", "isqrt() argument must be nonnegative");
      auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
      while (r > 0 && static_cast<__int128>(r) * r > n) --r;
      while (static_cast<__int128>(r + 1) * (r + 1) <= n) ++r;
      return r;
    });
    at["factorial"] = builtin("factorial", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("factorial", a, 1, 1);
      const auto n = to_int(a[0], "factorial()");
      if (n < 0) raise("ValueError", "factorial() not defined for negative values");
      std::int64_t r = 1;
      for (std::int64_t i = 2; i <= n; ++i) {
        if (__builtin_mul_overflow(r, i, &r)) raise("OverflowError", "integer result exceeds 64 bits");
      }
      return r;
    });
    at["comb"] = builtin("comb", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("comb", a, 2, 2);
      const auto n = to_int(a[0], "comb()"), k = to_int(a[1], "comb()");
      if (n < 0 || k < 0) raise("ValueError", "comb() arguments must be non-negative");
      if (k > n) return std::int64_t{0};
      __int128 r = 1;
      const auto kk = std::min(k, n - k);
      for (std::int64_t i = 1; i <= kk; ++i) {
        r = r * (n - kk + i) / i;
        if (r > INT64_MAX) raise("OverflowError", "integer result exceeds 64 bits");
      }
      return static_cast<std::int64_t>(r);
    });
    at["perm"] = builtin("perm", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("perm", a, 1, 2);
      const auto n = to_int(a[0], "perm()");
      const auto k = a.size() == 2 ? to_int(a[1], "perm()") : n;
      if (k > n) return std::int64_t{0};
      std::int64_t r = 1;
      for (std::int64_t i = n - k + 1; i <= n; ++i) {
        if (__builtin_mul_overflow(r, i, &r)) raise("OverflowError", "integer result exceeds 64 bits");
      }
      return r;
    });
    at["isclose"] = builtin("isclose", [](Interp&, Args& a, Kwargs& kw) -> Value {
      arity("isclose", a, 2, 2);
      const auto rel = kwarg(kw, "rel_tol");
      const auto abs_tol = kwarg(kw, "abs_tol");
      const double x = to_double(a[0]), y = to_double(a[1]);
      const double rt = rel ? to_double(*rel) : 1e-9, at2 = abs_tol ? to_double(*abs_tol) : 0.0;
      if (x == y) return true;
      return std::fabs(x - y) <= std::max(rt * std::max(std::fabs(x), std::fabs(y)), at2);
    });
    at["isinf"] = builtin("isinf", [](Interp&, Args& a, Kwargs&) -> Value { return std::isinf(to_double(a.at(0))); });
    at["isnan"] = builtin("isnan", [](Interp&, Args& a, Kwargs&) -> Value { return std::isnan(to_double(a.at(0))); });
    return m;
  }
  if (name == "logging") {
    const Value noop = builtin("noop", [](Interp&, Args&, Kwargs&) -> Value { return None{}; });
    auto logger = std::make_shared<ModuleObj>();
    logger->name = "Logger";
    for (const char* fn : {"debug", "info", "warning", "warn", "error", "critical", "exception", "log", "setLevel",
                           "addHandler", "removeHandler", "setFormatter", "basicConfig", "disable"}) {
      logger->attrs[fn] = noop;
      at[fn] = noop;
    }
    const Value logger_value = logger;
    const Value factory = builtin("getLogger", [logger_value](Interp&, Args&, Kwargs&) -> Value { return logger_value; });
    at["getLogger"] = factory;
    at["StreamHandler"] = factory;
    at["NullHandler"] = factory;
    at["FileHandler"] = factory;
    at["Formatter"] = factory;
    logger->attrs["handlers"] = make_list();
    at["DEBUG"] = 10;
    at["INFO"] = 20;
    at["WARNING"] = 30;
    at["ERROR"] = 40;
    at["CRITICAL"] = 50;
    at["NOTSET"] = 0;
    return m;
  }
  if (name == "collections") {
    at["defaultdict"] = builtin("defaultdict", [](Interp&, Args& a, Kwargs&) -> Value {
      auto d = make_dict();
      if (!a.empty()) d->default_factory = a[0];
      if (a.size() > 1 && a[1].is<DictPtr>()) {
        for (const auto& [k, v] : a[1].as<DictPtr>()->entries) dict_set(*d, k, v);
      }
      return d;
    });
    at["Counter"] = builtin("Counter", [](Interp& i, Args& a, Kwargs&) -> Value {
      auto d = make_dict();
      d->counter = true;
      d->default_factory = i.builtins.at("int");
      if (!a.empty()) {
        if (a[0].is<DictPtr>() && !a[0].as<DictPtr>()->is_set) {
          for (const auto& [k, v] : a[0].as<DictPtr>()->entries) dict_set(*d, k, v);
        } else {
          for (const auto& v : items_of(a[0])) {
            const Value* cur = dict_find(*d, v);
            dict_set(*d, v, Value((cur ? to_int(*cur, "count") : 0) + 1));
          }
        }
      }
      return d;
    });
    at["deque"] = builtin("deque", [](Interp&, Args& a, Kwargs&) -> Value {
      return make_list(a.empty() ? std::vector<Value>{} : items_of(a[0]));
    });
    at["OrderedDict"] = in.builtins.at("dict");
    return m;
  }
  if (name == "heapq") {
    at["heappush"] = builtin("heappush", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("heappush", a, 2, 2);
      auto& heap = list_arg(a[0], "heappush");
      heap.push_back(a[1]);
      heap_sift_down(heap, 0, heap.size() - 1);
      return None{};
    });
    at["heappop"] = builtin("heappop", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("heappop", a, 1, 1);
      auto& heap = list_arg(a[0], "heappop");
      if (heap.empty()) raise("IndexError", "index out of range");
      Value last = heap.back();
      heap.pop_back();
      if (heap.empty()) return last;
      Value top = heap[0];
      heap[0] = last;
      heap_sift_up(heap, 0);
      return top;
    });
    at["heapify"] = builtin("heapify", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("heapify", a, 1, 1);
      auto& heap = list_arg(a[0], "heapify");
      for (std::size_t i = heap.size() / 2; i-- > 0;) heap_sift_up(heap, i);
      return None{};
    });
    at["heappushpop"] = builtin("heappushpop", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("heappushpop", a, 2, 2);
      auto& heap = list_arg(a[0], "heappushpop");
      Value item = a[1];
      if (!heap.empty() && compare(heap[0], item) < 0) {
        std::swap(item, heap[0]);
        heap_sift_up(heap, 0);
      }
      return item;
    });
    for (const char* fn : {"nsmallest", "nlargest"}) {
      const bool largest = std::string(fn) == "nlargest";
      at[fn] = builtin(fn, [largest](Interp& i, Args& a, Kwargs& kw) -> Value {
        const auto key = kwarg(kw, "key");
        arity(largest ? "nlargest" : "nsmallest", a, 2, 2);
        auto sorted = i.sort_values(items_of(a[1]), key ? *key : Value(None{}), largest);
        const auto k = static_cast<std::size_t>(std::max<std::int64_t>(0, to_int(a[0], "n")));
        if (sorted.size() > k) sorted.resize(k);
        return make_list(std::move(sorted));
      });
    }
    return m;
  }
  if (name == "functools") {
    const Value identity = builtin("cache", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("cache", a, 1, 1);
      return a[0];
    });
    at["cache"] = identity;
    at["lru_cache"] = builtin("lru_cache", [identity](Interp&, Args& a, Kwargs&) -> Value {
      if (a.size() == 1 && (a[0].is<std::shared_ptr<FuncObj>>() || a[0].is<std::shared_ptr<BuiltinObj>>())) return a[0];
      return identity;
    });
    at["reduce"] = builtin("reduce", [](Interp& i, Args& a, Kwargs&) -> Value {
      arity("reduce", a, 2, 3);
      auto items = items_of(a[1]);
      std::size_t start = 0;
      Value acc;
      if (a.size() == 3) {
        acc = a[2];
      } else {
        if (items.empty()) raise("TypeError", "reduce() of empty iterable with no initial value");
        acc = items[0];
        start = 1;
      }
      for (std::size_t k = start; k < items.size(); ++k) acc = i.call(a[0], {acc, items[k]});
      return acc;
    });
    return m;
  }
  if (name == "itertools") {
    at["permutations"] = builtin("permutations", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("permutations", a, 1, 2);
      const auto pool = items_of(a[0]);
      const auto r = a.size() == 2 && !a[1].is<None>() ? static_cast<std::size_t>(to_int(a[1], "r")) : pool.size();
      if (r > pool.size()) return make_list();
      double count = 1;
      for (std::size_t k = 0; k < r; ++k) count *= static_cast<double>(pool.size() - k);
      guard_size(count);
      std::vector<Value> out, cur;
      std::vector<bool> used(pool.size(), false);
      perms(pool, r, used, cur, out);
      return make_list(std::move(out));
    });
    at["combinations"] = builtin("combinations", [](Interp&, Args& a, Kwargs&) -> Value {
      arity("combinations", a, 2, 2);
      const auto pool = items_of(a[0]);
      const auto r = static_cast<std::size_t>(to_int(a[1], "r"));
      if (r > pool.size()) return make_list();
      double count = 1;
      for (std::size_t k = 0; k < r; ++k) count = count * static_cast<double>(pool.size() - k) / static_cast<double>(k + 1);
      guard_size(count);
      std::vector<Value> out, cur;
      combos(pool, r, 0, cur, out);
      return make_list(std::move(out));
    });
    at["product"] = builtin("product", [](Interp&, Args& a, Kwargs& kw) -> Value {
      const auto rep = kwarg(kw, "repeat");
      const auto times = rep ? to_int(*rep, "repeat") : 1;
      std::vector<std::vector<Value>> pools;
      for (std::int64_t t = 0; t < times; ++t) {
        for (const auto& v : a) pools.push_back(items_of(v));
      }
      double count = 1;
      for (const auto& p : pools) count *= static_cast<double>(p.size());
      guard_size(count);
      std::vector<std::vector<Value>> acc{{}};
      for (const auto& p : pools) {
        std::vector<std::vector<Value>> next;
        for (const auto& prefix : acc) {
          for (const auto& v : p) {
            auto row = prefix;
            row.push_back(v);
            next.push_back(std::move(row));
          }
        }
        acc = std::move(next);
      }
      std::vector<Value> out;
      for (auto& row : acc) out.push_back(tuple(std::move(row)));
      return make_list(std::move(out));
    });
    at["accumulate"] = builtin("accumulate", [](Interp& i, Args& a, Kwargs& kw) -> Value {
      const auto initial = kwarg(kw, "initial");
      arity("accumulate", a, 1, 2);
      std::vector<Value> out;
      Value acc;
      bool have = false;
      if (initial && !initial->is<None>()) {
        acc = *initial;
        have = true;
        out.push_back(acc);
      }
      for (const auto& v : items_of(a[0])) {
        acc = have ? (a.size() == 2 ? i.call(a[1], {acc, v}) : i.binop("+", acc, v)) : v;
        have = true;
        out.push_back(acc);
      }
      return make_list(std::move(out));
    });
    return m;
  }
  if (name == "bisect") {
    for (const char* fn : {"bisect_left", "bisect_right", "bisect", "insort", "insort_left", "insort_right"}) {
      const std::string f = fn;
      at[fn] = builtin(fn, [f](Interp& i, Args& a, Kwargs& kw) -> Value {
        const auto key = kwarg(kw, "key");
        arity(f, a, 2, 4);
        const auto& items = a[0].is<ListPtr>() ? a[0].as<ListPtr>()->items : list_arg(a[0], f.c_str());
        std::size_t lo = a.size() > 2 ? static_cast<std::size_t>(to_int(a[2], "lo")) : 0;
        std::size_t hi = a.size() > 3 ? static_cast<std::size_t>(to_int(a[3], "hi")) : items.size();
        const bool left = f.ends_with("left");
        const Value x = a[1];
        while (lo < hi) {
          const std::size_t mid = (lo + hi) / 2;
          const Value probe = key && !key->is<None>() ? i.call(*key, {items[mid]}) : items[mid];
          const bool go_right = left ? compare(probe, x) < 0 : !(compare(x, probe) < 0);
          if (go_right) lo = mid + 1;
          else hi = mid;
        }
        if (f.starts_with("insort")) {
          auto& target = list_arg(a[0], f.c_str());
          target.insert(target.begin() + static_cast<std::ptrdiff_t>(lo), x);
          return None{};
        }
        return static_cast<std::int64_t>(lo);
      });
    }
    return m;
  }
  if (name == "sys") {
    at["maxsize"] = INT64_MAX;
    at["setrecursionlimit"] = builtin("setrecursionlimit", [](Interp& i, Args& a, Kwargs&) -> Value {
      arity("setrecursionlimit", a, 1, 1);
      i.options.recursion_limit = static_cast<int>(std::clamp<std::int64_t>(to_int(a[0], "limit"), 1, 20000));
      return None{};
    });
    at["getrecursionlimit"] = builtin("getrecursionlimit", [](Interp& i, Args&, Kwargs&) -> Value {
      return static_cast<std::int64_t>(i.options.recursion_limit);
    });
    return m;
  }
  if (name == "typing") {
    for (const char* t : {"List", "Dict", "Tuple", "Set", "Optional", "Any", "Union", "Callable", "Iterable",
                          "Sequence", "Mapping", "FrozenSet", "Deque", "DefaultDict"}) {
      at[t] = None{};
    }
    return m;
  }
  if (name == "string") {
    at["ascii_lowercase"] = "abcdefghijklmnopqrstuvwxyz";
    at["ascii_uppercase"] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    at["ascii_letters"] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
    at["digits"] = "0123456789";
    at["hexdigits"] = "0123456789abcdefABCDEF";
    at["punctuation"] = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
    at["whitespace"] = " \t\n\r\x0b\x0c";
    return m;
  }
  raise("ImportError", "No module named '" + name + "'");
}

}  // namespace minipy
