#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sctree {

enum class TaskKind { translation, programming };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view text);

// One test case: the positional arguments passed to the content's `main`.
struct TestInput {
  nlohmann::json args = nlohmann::json::array();

  friend bool operator==(const TestInput&, const TestInput&) = default;
};

using TestInputs = std::vector<TestInput>;

// Content of a node whose transformation output could not be parsed.
inline constexpr std::string_view kSentinelContent = "None";

inline bool is_sentinel(std::string_view content) { return content == kSentinelContent; }

}  // namespace sctree
