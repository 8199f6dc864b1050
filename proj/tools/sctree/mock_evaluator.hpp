#pragma once

#include <string>
#include <string_view>

#include "sctree/gateway.hpp"
#include "sctree/types.hpp"

namespace sctree::cli {

// Offline evaluator for gen-bench: answers the language-proposal prompt with "fr, es, de" and
// each root request with a deterministic root derived from the "item i of M" line, so the same
// command always writes the same benchmark.
class MockEvaluator final : public ChatClient {
 public:
  explicit MockEvaluator(TaskKind kind) : kind_(kind) {}
  std::string chat(std::string_view system_text, std::string_view user_text) override;

 private:
  TaskKind kind_;
};

std::string mock_translation_root(std::size_t index);
std::string mock_programming_root(std::size_t index);

}  // namespace sctree::cli
