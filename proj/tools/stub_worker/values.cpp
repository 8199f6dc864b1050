#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "runtime.hpp"

namespace minipy {

void raise(const std::string& type, const std::string& message) { throw PyError(type, message); }

std::string type_name(const Value& v) {
  struct Visitor {
    std::string operator()(None) const { return "NoneType"; }
    std::string operator()(bool) const { return "bool"; }
    std::string operator()(std::int64_t) const { return "int"; }
    std::string operator()(double) const { return "float"; }
    std::string operator()(const std::string&) const { return "str"; }
    std::string operator()(const std::shared_ptr<ListObj>& l) const { return l->kind == ListKind::tuple ? "tuple" : "list"; }
    std::string operator()(const std::shared_ptr<DictObj>& d) const { return d->is_set ? "set" : "dict"; }
    std::string operator()(const std::shared_ptr<FuncObj>&) const { return "function"; }
    std::string operator()(const std::shared_ptr<BuiltinObj>&) const { return "builtin_function_or_method"; }
    std::string operator()(const std::shared_ptr<MethodObj>&) const { return "method"; }
    std::string operator()(const std::shared_ptr<ExcObj>& e) const { return e->instance ? e->type : "type"; }
    std::string operator()(const std::shared_ptr<ModuleObj>&) const { return "module"; }
    std::string operator()(const std::shared_ptr<RangeObj>&) const { return "range"; }
  };
  return std::visit(Visitor{}, v.data);
}

bool truthy(const Value& v) {
  if (v.is<None>()) return false;
  if (v.is<bool>()) return v.as<bool>();
  if (v.is<std::int64_t>()) return v.as<std::int64_t>() != 0;
  if (v.is<double>()) return v.as<double>() != 0.0;
  if (v.is<std::string>()) return !v.as<std::string>().empty();
  if (v.is<std::shared_ptr<ListObj>>()) return !v.as<std::shared_ptr<ListObj>>()->items.empty();
  if (v.is<std::shared_ptr<DictObj>>()) return !v.as<std::shared_ptr<DictObj>>()->entries.empty();
  if (v.is<std::shared_ptr<RangeObj>>()) return v.as<std::shared_ptr<RangeObj>>()->size() != 0;
  return true;
}

bool is_number(const Value& v) { return v.is<bool>() || v.is<std::int64_t>() || v.is<double>(); }

double to_double(const Value& v) {
  if (v.is<bool>()) return v.as<bool>() ? 1.0 : 0.0;
  if (v.is<std::int64_t>()) return static_cast<double>(v.as<std::int64_t>());
  if (v.is<double>()) return v.as<double>();
  raise("TypeError", "must be real number, not " + type_name(v));
}

std::int64_t to_int(const Value& v, const char* what) {
  if (v.is<bool>()) return v.as<bool>() ? 1 : 0;
  if (v.is<std::int64_t>()) return v.as<std::int64_t>();
  raise("TypeError", std::string(what) + " must be integers, not " + type_name(v));
}

std::string float_repr(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  if (d == 0.0) return std::signbit(d) ? "-0.0" : "0.0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::scientific);
  const std::string sci(buf, r.ptr);
  const bool negative = sci[0] == '-';
  const auto e_pos = sci.find('e');
  std::string digits;
  for (std::size_t i = negative ? 1 : 0; i < e_pos; ++i) {
    if (sci[i] != '.') digits += sci[i];
  }
  const int exponent = std::stoi(sci.substr(e_pos + 1));
  std::string out = negative ? "-" : "";
  if (exponent >= -4 && exponent < 16) {
    if (exponent >= 0) {
      const auto int_len = static_cast<std::size_t>(exponent + 1);
      if (digits.size() <= int_len) {
        out += digits + std::string(int_len - digits.size(), '0') + ".0";
      } else {
        out += digits.substr(0, int_len) + "." + digits.substr(int_len);
      }
    } else {
      out += "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + digits;
    }
    return out;
  }
  out += digits.substr(0, 1);
  if (digits.size() > 1) out += "." + digits.substr(1);
  char exp_buf[16];
  std::snprintf(exp_buf, sizeof exp_buf, "e%c%02d", exponent < 0 ? '-' : '+', std::abs(exponent));
  return out + exp_buf;
}

namespace {

std::string quote_string(const std::string& s) {
  const bool has_single = s.find('\'') != std::string::npos;
  const bool has_double = s.find('"') != std::string::npos;
  const char q = has_single && !has_double ? '"' : '\'';
  std::string out(1, q);
  for (const unsigned char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c == static_cast<unsigned char>(q)) {
          out += '\\';
          out += static_cast<char>(c);
        } else if (c < 0x20 || c == 0x7F) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + q;
}

std::string join_reprs(const std::vector<Value>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += repr(items[i]);
  }
  return out;
}

}  // namespace

std::string repr(const Value& v) {
  if (v.is<None>()) return "None";
  if (v.is<bool>()) return v.as<bool>() ? "True" : "False";
  if (v.is<std::int64_t>()) return std::to_string(v.as<std::int64_t>());
  if (v.is<double>()) return float_repr(v.as<double>());
  if (v.is<std::string>()) return quote_string(v.as<std::string>());
  if (v.is<std::shared_ptr<ListObj>>()) {
    const auto& l = *v.as<std::shared_ptr<ListObj>>();
    if (l.kind == ListKind::tuple) return "(" + join_reprs(l.items) + (l.items.size() == 1 ? ",)" : ")");
    return "[" + join_reprs(l.items) + "]";
  }
  if (v.is<std::shared_ptr<DictObj>>()) {
    const auto& d = *v.as<std::shared_ptr<DictObj>>();
    std::string out;
    for (std::size_t i = 0; i < d.entries.size(); ++i) {
      if (i) out += ", ";
      out += repr(d.entries[i].first);
      if (!d.is_set) out += ": " + repr(d.entries[i].second);
    }
    if (d.is_set) return d.entries.empty() ? "set()" : "{" + out + "}";
    return "{" + out + "}";
  }
  if (v.is<std::shared_ptr<FuncObj>>()) return "<function " + v.as<std::shared_ptr<FuncObj>>()->name + ">";
  if (v.is<std::shared_ptr<BuiltinObj>>()) return "<built-in function " + v.as<std::shared_ptr<BuiltinObj>>()->name + ">";
  if (v.is<std::shared_ptr<MethodObj>>()) return "<method " + v.as<std::shared_ptr<MethodObj>>()->name + ">";
  if (v.is<std::shared_ptr<ExcObj>>()) {
    const auto& e = *v.as<std::shared_ptr<ExcObj>>();
    if (!e.instance) return "<class '" + e.type + "'>";
    return e.type + "(" + (e.message.empty() ? "" : quote_string(e.message)) + ")";
  }
  if (v.is<std::shared_ptr<ModuleObj>>()) return "<module '" + v.as<std::shared_ptr<ModuleObj>>()->name + "'>";
  const auto& r = *v.as<std::shared_ptr<RangeObj>>();
  return "range(" + std::to_string(r.start) + ", " + std::to_string(r.stop) +
         (r.step != 1 ? ", " + std::to_string(r.step) : "") + ")";
}

std::string str(const Value& v) {
  if (v.is<std::string>()) return v.as<std::string>();
  if (v.is<std::shared_ptr<ExcObj>>() && v.as<std::shared_ptr<ExcObj>>()->instance) {
    return v.as<std::shared_ptr<ExcObj>>()->message;
  }
  return repr(v);
}

bool equals(const Value& a, const Value& b) {
  if (is_number(a) && is_number(b)) {
    if (a.is<double>() || b.is<double>()) return to_double(a) == to_double(b);
    return to_int(a, "") == to_int(b, "");
  }
  if (a.data.index() != b.data.index()) return false;
  if (a.is<None>()) return true;
  if (a.is<std::string>()) return a.as<std::string>() == b.as<std::string>();
  if (a.is<std::shared_ptr<ListObj>>()) {
    const auto& x = *a.as<std::shared_ptr<ListObj>>();
    const auto& y = *b.as<std::shared_ptr<ListObj>>();
    if (x.kind != y.kind || x.items.size() != y.items.size()) return false;
    for (std::size_t i = 0; i < x.items.size(); ++i) {
      if (!equals(x.items[i], y.items[i])) return false;
    }
    return true;
  }
  if (a.is<std::shared_ptr<DictObj>>()) {
    auto& x = *a.as<std::shared_ptr<DictObj>>();
    auto& y = *b.as<std::shared_ptr<DictObj>>();
    if (x.is_set != y.is_set || x.entries.size() != y.entries.size()) return false;
    for (const auto& [k, val] : x.entries) {
      const Value* other = dict_find(y, k);
      if (!other) return false;
      if (!x.is_set && !equals(val, *other)) return false;
    }
    return true;
  }
  if (a.is<std::shared_ptr<RangeObj>>()) {
    const auto& x = *a.as<std::shared_ptr<RangeObj>>();
    const auto& y = *b.as<std::shared_ptr<RangeObj>>();
    return x.start == y.start && x.stop == y.stop && x.step == y.step;
  }
  if (a.is<std::shared_ptr<ExcObj>>()) {
    const auto& x = a.as<std::shared_ptr<ExcObj>>();
    const auto& y = b.as<std::shared_ptr<ExcObj>>();
    return x == y || (!x->instance && !y->instance && x->type == y->type);
  }
  return std::visit([&](const auto& x) -> bool {
    using T = std::decay_t<decltype(x)>;
    if constexpr (std::is_same_v<T, std::shared_ptr<FuncObj>> || std::is_same_v<T, std::shared_ptr<BuiltinObj>> ||
                  std::is_same_v<T, std::shared_ptr<MethodObj>> || std::is_same_v<T, std::shared_ptr<ModuleObj>>) {
      return x == std::get<T>(b.data);
    } else {
      return false;
    }
  }, a.data);
}

int compare(const Value& a, const Value& b) {
  if (is_number(a) && is_number(b)) {
    if (a.is<double>() || b.is<double>()) {
      const double x = to_double(a), y = to_double(b);
      return x < y ? -1 : x > y ? 1 : 0;
    }
    const auto x = to_int(a, ""), y = to_int(b, "");
    return x < y ? -1 : x > y ? 1 : 0;
  }
  if (a.is<std::string>() && b.is<std::string>()) {
    const int c = a.as<std::string>().compare(b.as<std::string>());
    return c < 0 ? -1 : c > 0 ? 1 : 0;
  }
  if (a.is<std::shared_ptr<ListObj>>() && b.is<std::shared_ptr<ListObj>>()) {
    const auto& x = *a.as<std::shared_ptr<ListObj>>();
    const auto& y = *b.as<std::shared_ptr<ListObj>>();
    if (x.kind == y.kind) {
      const std::size_t n = std::min(x.items.size(), y.items.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (equals(x.items[i], y.items[i])) continue;
        return compare(x.items[i], y.items[i]);
      }
      return x.items.size() < y.items.size() ? -1 : x.items.size() > y.items.size() ? 1 : 0;
    }
  }
  raise("TypeError", "'<' not supported between instances of '" + type_name(a) + "' and '" + type_name(b) + "'");
}

namespace {
template <class T>
struct is_shared : std::false_type {};
template <class T>
struct is_shared<std::shared_ptr<T>> : std::true_type {};
}  // namespace

std::string key_of(const Value& v) {
  if (v.is<None>()) return "N";
  if (v.is<bool>()) return v.as<bool>() ? "i1" : "i0";
  if (v.is<std::int64_t>()) return "i" + std::to_string(v.as<std::int64_t>());
  if (v.is<double>()) {
    const double d = v.as<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.2e18) return "i" + std::to_string(static_cast<std::int64_t>(d));
    return "f" + float_repr(d);
  }
  if (v.is<std::string>()) return "s" + v.as<std::string>();
  if (v.is<std::shared_ptr<ListObj>>() && v.as<std::shared_ptr<ListObj>>()->kind == ListKind::tuple) {
    std::string out = "t(";
    for (const auto& item : v.as<std::shared_ptr<ListObj>>()->items) {
      const auto k = key_of(item);
      out += std::to_string(k.size()) + ":" + k;
    }
    return out + ")";
  }
  if (v.is<std::shared_ptr<ListObj>>() || v.is<std::shared_ptr<DictObj>>()) {
    raise("TypeError", "unhashable type: '" + type_name(v) + "'");
  }
  if (v.is<std::shared_ptr<ExcObj>>() && !v.as<std::shared_ptr<ExcObj>>()->instance) {
    return "e" + v.as<std::shared_ptr<ExcObj>>()->type;
  }
  char buf[32] = "p?";
  std::visit([&](const auto& x) {
    using T = std::decay_t<decltype(x)>;
    if constexpr (is_shared<T>::value) {
      std::snprintf(buf, sizeof buf, "p%p", static_cast<const void*>(x.get()));
    }
  }, v.data);
  return buf;
}

std::shared_ptr<ListObj> make_list(std::vector<Value> items, ListKind kind) {
  auto l = std::make_shared<ListObj>();
  l->items = std::move(items);
  l->kind = kind;
  return l;
}

std::shared_ptr<DictObj> make_dict(bool is_set) {
  auto d = std::make_shared<DictObj>();
  d->is_set = is_set;
  return d;
}

Value* dict_find(DictObj& d, const Value& key) {
  const auto it = d.index.find(key_of(key));
  return it == d.index.end() ? nullptr : &d.entries[it->second].second;
}

void dict_set(DictObj& d, const Value& key, Value value) {
  auto k = key_of(key);
  const auto it = d.index.find(k);
  if (it != d.index.end()) {
    d.entries[it->second].second = std::move(value);
    return;
  }
  d.index.emplace(std::move(k), d.entries.size());
  d.entries.emplace_back(key, std::move(value));
}

bool dict_erase(DictObj& d, const Value& key) {
  const auto it = d.index.find(key_of(key));
  if (it == d.index.end()) return false;
  const std::size_t pos = it->second;
  d.entries.erase(d.entries.begin() + static_cast<std::ptrdiff_t>(pos));
  d.index.erase(it);
  for (auto& [k, i] : d.index) {
    if (i > pos) --i;
  }
  return true;
}

std::vector<std::string> code_points(const std::string& s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
    if (i + len > s.size()) len = 1;
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::size_t str_length(const std::string& s) {
  std::size_t n = 0;
  for (const unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::vector<Value> items_of(const Value& v) {
  if (v.is<std::shared_ptr<ListObj>>()) return v.as<std::shared_ptr<ListObj>>()->items;
  if (v.is<std::string>()) {
    std::vector<Value> out;
    for (auto& cp : code_points(v.as<std::string>())) out.emplace_back(std::move(cp));
    return out;
  }
  if (v.is<std::shared_ptr<DictObj>>()) {
    std::vector<Value> out;
    for (const auto& [k, val] : v.as<std::shared_ptr<DictObj>>()->entries) out.push_back(k);
    return out;
  }
  if (v.is<std::shared_ptr<RangeObj>>()) {
    const auto& r = *v.as<std::shared_ptr<RangeObj>>();
    if (r.size() > 50'000'000) raise("MemoryError", "range too large to materialize");
    std::vector<Value> out;
    out.reserve(static_cast<std::size_t>(r.size()));
    for (std::int64_t i = 0; i < r.size(); ++i) out.emplace_back(r.start + i * r.step);
    return out;
  }
  raise("TypeError", "'" + type_name(v) + "' object is not iterable");
}

// ---------------------------------------------------------------------------------------------
// formatting

namespace {

struct Spec {
  char fill = ' ';
  char align = 0;
  char sign = '-';
  bool grouping = false;
  std::size_t width = 0;
  int precision = -1;
  char type = 0;
};

Spec parse_spec(const std::string& s) {
  Spec spec;
  std::size_t i = 0;
  const auto is_align = [](char c) { return c == '<' || c == '>' || c == '^' || c == '='; };
  if (s.size() >= 2 && is_align(s[1])) {
    spec.fill = s[0];
    spec.align = s[1];
    i = 2;
  } else if (!s.empty() && is_align(s[0])) {
    spec.align = s[0];
    i = 1;
  }
  if (i < s.size() && (s[i] == '+' || s[i] == '-' || s[i] == ' ')) spec.sign = s[i++];
  if (i < s.size() && s[i] == '#') ++i;
  if (i < s.size() && s[i] == '0') {
    if (!spec.align) {
      spec.fill = '0';
      spec.align = '=';
    }
    ++i;
  }
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) spec.width = spec.width * 10 + static_cast<std::size_t>(s[i++] - '0');
  if (i < s.size() && (s[i] == ',' || s[i] == '_')) {
    spec.grouping = true;
    ++i;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    spec.precision = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) spec.precision = spec.precision * 10 + (s[i++] - '0');
  }
  if (i < s.size()) spec.type = s[i++];
  if (i != s.size()) raise("ValueError", "Invalid format specifier '" + s + "'");
  return spec;
}

std::string group_thousands(const std::string& digits) {
  const auto dot = digits.find('.');
  std::string int_part = digits.substr(0, dot);
  const std::string rest = dot == std::string::npos ? "" : digits.substr(dot);
  std::string out;
  int count = 0;
  for (auto it = int_part.rbegin(); it != int_part.rend(); ++it) {
    if (count && count % 3 == 0) out += ',';
    out += *it;
    ++count;
  }
  std::reverse(out.begin(), out.end());
  return out + rest;
}

std::string pad(std::string sign, std::string body, const Spec& spec, char default_align) {
  const char align = spec.align ? spec.align : default_align;
  const std::size_t len = str_length(sign) + str_length(body);
  if (len >= spec.width) return sign + body;
  const std::size_t fill = spec.width - len;
  const std::string f(fill, spec.fill);
  switch (align) {
    case '<': return sign + body + f;
    case '^': return std::string(fill / 2, spec.fill) + sign + body + std::string(fill - fill / 2, spec.fill);
    case '=': return sign + f + body;
    default: return f + sign + body;
  }
}

std::string fixed(double d, int precision, char type) {
  char buf[512];
  const char fmt[] = {'%', '.', '*', type, '\0'};
  std::snprintf(buf, sizeof buf, fmt, precision, d);
  return buf;
}

}  // namespace

std::string format_value(const Value& v, const std::string& spec_text) {
  if (spec_text.empty()) return str(v);
  const Spec spec = parse_spec(spec_text);
  if (v.is<std::string>()) {
    if (spec.type && spec.type != 's') raise("ValueError", "Unknown format code '" + std::string(1, spec.type) + "' for str");
    std::string s = v.as<std::string>();
    if (spec.precision >= 0) {
      const auto cps = code_points(s);
      if (cps.size() > static_cast<std::size_t>(spec.precision)) {
        s.clear();
        for (int i = 0; i < spec.precision; ++i) s += cps[static_cast<std::size_t>(i)];
      }
    }
    return pad("", s, spec, '<');
  }
  if (!is_number(v)) {
    if (spec.type && spec.type != 's') raise("TypeError", "unsupported format string passed to " + type_name(v));
    return pad("", str(v), spec, '<');
  }
  char type = spec.type;
  const bool integral = !v.is<double>();
  if (!type) type = integral ? 'd' : (spec.precision >= 0 ? 'g' : 0);
  std::string body;
  bool negative = false;
  if (type == 'd' || type == 'x' || type == 'X' || type == 'o' || type == 'b' || type == 'n') {
    if (!integral) raise("ValueError", "Unknown format code '" + std::string(1, type) + "' for object of type 'float'");
    const auto i = to_int(v, "");
    negative = i < 0;
    const auto mag = negative ? static_cast<std::uint64_t>(-(i + 1)) + 1 : static_cast<std::uint64_t>(i);
    const int base = type == 'x' || type == 'X' ? 16 : type == 'o' ? 8 : type == 'b' ? 2 : 10;
    char buf[72];
    const auto r = std::to_chars(buf, buf + sizeof buf, mag, base);
    body.assign(buf, r.ptr);
    if (type == 'X') std::transform(body.begin(), body.end(), body.begin(), ::toupper);
  } else if (type == 0) {
    const double d = v.as<double>();
    negative = std::signbit(d) && !std::isnan(d);
    body = float_repr(std::fabs(d));
  } else if (type == 'f' || type == 'F' || type == 'e' || type == 'E' || type == 'g' || type == 'G' || type == '%') {
    double d = to_double(v);
    if (type == '%') d *= 100.0;
    negative = std::signbit(d) && !std::isnan(d);
    const int precision = spec.precision >= 0 ? spec.precision : 6;
    const char c = type == '%' ? 'f' : type;
    if (std::isinf(d)) {
      body = std::isupper(static_cast<unsigned char>(c)) ? "INF" : "inf";
    } else if (std::isnan(d)) {
      body = std::isupper(static_cast<unsigned char>(c)) ? "NAN" : "nan";
    } else {
      body = fixed(std::fabs(d), (c == 'g' || c == 'G') && precision == 0 ? 1 : precision, c);
    }
    if (type == '%') body += '%';
  } else {
    raise("ValueError", "Unknown format code '" + std::string(1, type) + "'");
  }
  if (spec.grouping) body = group_thousands(body);
  std::string sign = negative ? "-" : spec.sign == '+' ? "+" : spec.sign == ' ' ? " " : "";
  return pad(sign, body, spec, '>');
}

std::string percent_format(const std::string& fmt, const Value& args) {
  std::vector<Value> values;
  if (args.is<std::shared_ptr<ListObj>>() && args.as<std::shared_ptr<ListObj>>()->kind == ListKind::tuple) {
    values = args.as<std::shared_ptr<ListObj>>()->items;
  } else {
    values.push_back(args);
  }
  std::string out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') {
      out += fmt[i];
      continue;
    }
    std::size_t j = i + 1;
    std::string spec;
    while (j < fmt.size() && std::strchr("-+ 0#.0123456789", fmt[j]) && fmt[j]) spec += fmt[j++];
    if (j >= fmt.size()) raise("ValueError", "incomplete format");
    const char type = fmt[j];
    i = j;
    if (type == '%') {
      out += '%';
      continue;
    }
    if (next >= values.size()) raise("TypeError", "not enough arguments for format string");
    const Value& v = values[next++];
    std::string py_spec = spec;
    if (!py_spec.empty() && py_spec[0] == '-') py_spec = "<" + py_spec.substr(1);
    switch (type) {
      case 's': out += format_value(Value(str(v)), py_spec); break;
      case 'r': out += format_value(Value(repr(v)), py_spec); break;
      case 'd':
      case 'i': {
        const Value as_int = v.is<double>() ? Value(static_cast<std::int64_t>(v.as<double>())) : v;
        out += format_value(as_int, py_spec + "d");
        break;
      }
      case 'f':
      case 'F':
      case 'e':
      case 'E':
      case 'g':
      case 'G':
        out += format_value(Value(to_double(v)), py_spec + type);
        break;
      case 'x':
      case 'X':
      case 'o':
        out += format_value(v, py_spec + type);
        break;
      default: raise("ValueError", std::string("unsupported format character '") + type + "'");
    }
  }
  if (next != values.size()) raise("TypeError", "not all arguments converted during string formatting");
  return out;
}

// ---------------------------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const Value& v) {
  if (v.is<None>()) return nullptr;
  if (v.is<bool>()) return v.as<bool>();
  if (v.is<std::int64_t>()) return v.as<std::int64_t>();
  if (v.is<double>()) {
    if (!std::isfinite(v.as<double>())) throw Unserializable("Out of range float values are not JSON compliant");
    return v.as<double>();
  }
  if (v.is<std::string>()) return v.as<std::string>();
  if (v.is<std::shared_ptr<ListObj>>()) {
    auto out = nlohmann::json::array();
    for (const auto& item : v.as<std::shared_ptr<ListObj>>()->items) out.push_back(to_json(item));
    return out;
  }
  if (v.is<std::shared_ptr<DictObj>>() && !v.as<std::shared_ptr<DictObj>>()->is_set) {
    auto out = nlohmann::json::object();
    for (const auto& [k, val] : v.as<std::shared_ptr<DictObj>>()->entries) {
      std::string key;
      if (k.is<std::string>()) {
        key = k.as<std::string>();
      } else if (k.is<bool>()) {
        key = k.as<bool>() ? "true" : "false";
      } else if (k.is<None>()) {
        key = "null";
      } else if (k.is<std::int64_t>() || k.is<double>()) {
        key = repr(k);
      } else {
        throw Unserializable("keys must be str, int, float, bool or None, not " + type_name(k));
      }
      out[key] = to_json(val);
    }
    return out;
  }
  throw Unserializable("Object of type " + type_name(v) + " is not JSON serializable");
}

Value from_json(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return None{};
    case nlohmann::json::value_t::boolean: return j.get<bool>();
    case nlohmann::json::value_t::number_integer: return j.get<std::int64_t>();
    case nlohmann::json::value_t::number_unsigned: {
      const auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) raise("OverflowError", "integer argument too large");
      return static_cast<std::int64_t>(u);
    }
    case nlohmann::json::value_t::number_float: return j.get<double>();
    case nlohmann::json::value_t::string: return j.get<std::string>();
    case nlohmann::json::value_t::array: {
      std::vector<Value> items;
      for (const auto& item : j) items.push_back(from_json(item));
      return make_list(std::move(items));
    }
    case nlohmann::json::value_t::object: {
      auto d = make_dict();
      for (const auto& [k, item] : j.items()) dict_set(*d, Value(k), from_json(item));
      return d;
    }
    default: raise("TypeError", "unsupported argument type");
  }
}

}  // namespace minipy
