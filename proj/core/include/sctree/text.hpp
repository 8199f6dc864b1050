#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sctree::text {

std::string_view trim(std::string_view s);

// Splits on runs of ASCII whitespace; never yields empty tokens.
std::vector<std::string_view> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string_view>& parts, std::string_view separator);

// Decodes UTF-8 into code points. Invalid bytes decode to themselves (Latin-1 fallback) so
// distances stay defined on arbitrary input.
std::u32string utf8_code_points(std::string_view s);

std::uint64_t fnv1a64(std::string_view s, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Shortest decimal form that round-trips to the same double.
std::string shortest_double(double value);

}  // namespace sctree::text
