#pragma once

#include <optional>

#include "ast.hpp"

namespace minipy {

[[noreturn]] void raise(const std::string& type, const std::string& message);

std::string type_name(const Value& v);
bool truthy(const Value& v);
bool is_number(const Value& v);  // bool, int or float
double to_double(const Value& v);
std::int64_t to_int(const Value& v, const char* what);  // bool/int only

std::string float_repr(double d);
std::string repr(const Value& v);
std::string str(const Value& v);

bool equals(const Value& a, const Value& b);
// <0, 0, >0; TypeError for unorderable types.
int compare(const Value& a, const Value& b);

// Hash key; TypeError for unhashable values.
std::string key_of(const Value& v);

std::shared_ptr<ListObj> make_list(std::vector<Value> items = {}, ListKind kind = ListKind::list);
std::shared_ptr<DictObj> make_dict(bool is_set = false);
Value* dict_find(DictObj& d, const Value& key);
void dict_set(DictObj& d, const Value& key, Value value);
bool dict_erase(DictObj& d, const Value& key);

// Code points of a UTF-8 string, each as its own UTF-8 string.
std::vector<std::string> code_points(const std::string& s);
std::size_t str_length(const std::string& s);

// Materializes any iterable.
std::vector<Value> items_of(const Value& v);

// Format-spec mini-language subset: [[fill]align][sign][0][width][,][.precision][type].
std::string format_value(const Value& v, const std::string& spec);
// printf-style "%" formatting.
std::string percent_format(const std::string& fmt, const Value& args);

nlohmann::json to_json(const Value& v);
Value from_json(const nlohmann::json& j);

}  // namespace minipy
