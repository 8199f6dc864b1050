#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sctree/types.hpp"

namespace sctree {

// True when `code` contains a Python-style definition of a function named main.
bool defines_main(std::string_view code);

// Pulls usable node content out of a chat response.
//
// programming: the last fenced block that defines main (fence markers stripped); an unfenced
// response that defines main is returned trimmed. No definition of main anywhere -> nullopt.
// translation: the last fenced block that defines main if any, otherwise the response with
// fence marker lines removed and surrounding whitespace trimmed. Empty result -> nullopt.
//
// Idempotent: extract_content(*extract_content(x, k), k) == extract_content(x, k).
std::optional<std::string> extract_content(std::string_view raw, TaskKind kind);

}  // namespace sctree
