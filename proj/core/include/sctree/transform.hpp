#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "sctree/tree.hpp"
#include "sctree/types.hpp"

namespace sctree {

class ChatClient;
class Diagnostics;

// Applies an operation pair (forward prompt, then inverse prompt) to node content.
// apply_pair is total: failures come back as the sentinel "None", and sentinel input is returned
// as-is without invoking the backend. Implementations must tolerate concurrent calls.
class Transformer {
 public:
  virtual ~Transformer() = default;

  std::string apply_pair(std::string_view content, const OperationPair& pair) const;

 protected:
  virtual std::string transform(std::string_view content, const OperationPair& pair) const = 0;
};

// Deterministic stand-in for the evaluatee model.
struct MockChannel {
  enum class Kind { identity, drop_last_words, reverse_words, seeded_word_dropout };

  Kind kind = Kind::identity;
  std::size_t drop_count = 1;  // drop_last_words
  double dropout_rate = 0.0;   // seeded_word_dropout: probability of dropping each token
  std::uint64_t seed = 0;      // seeded_word_dropout

  static MockChannel identity() { return {}; }
  static MockChannel drop_last_words(std::size_t count) { return {Kind::drop_last_words, count, 0.0, 0}; }
  static MockChannel reverse_words() { return {Kind::reverse_words, 1, 0.0, 0}; }
  static MockChannel seeded_word_dropout(double rate, std::uint64_t seed) {
    return {Kind::seeded_word_dropout, 1, rate, seed};
  }

  // "identity", "drop-last:J", "reverse", "dropout:RATE:SEED". Throws ConfigError.
  static MockChannel parse(std::string_view spec);
  std::string to_string() const;

  friend bool operator==(const MockChannel&, const MockChannel&) = default;
};

// identity -> unchanged; drop_last_words(j) -> content up to the end of its (count-j)-th token
// (empty if fewer than j+1 tokens); reverse_words -> token order reversed with the whitespace
// runs between them mirrored, so it is an exact involution; seeded_word_dropout -> each token
// kept or dropped by a draw seeded from (seed, content), survivors joined by single spaces.
std::string apply_mock_channel(std::string_view content, const MockChannel& channel);

class MockTransformer final : public Transformer {
 public:
  explicit MockTransformer(MockChannel channel) : channel_(channel) {}
  const MockChannel& channel() const noexcept { return channel_; }

 protected:
  std::string transform(std::string_view content, const OperationPair& pair) const override;

 private:
  MockChannel channel_;
};

// How an operation prompt and node content become one chat request. "{prompt}" and "{content}"
// are substituted in both fields.
struct PromptTemplate {
  std::string system = "{prompt}";
  std::string user = "{content}";

  std::string render_system(std::string_view prompt, std::string_view content) const;
  std::string render_user(std::string_view prompt, std::string_view content) const;
};

// Two chat calls per pair: forward prompt over the content, then inverse prompt over the
// extracted forward result. Any extraction or gateway failure yields "None" and a diagnostic.
class LlmTransformer final : public Transformer {
 public:
  LlmTransformer(ChatClient& chat, TaskKind task_kind, PromptTemplate prompt_template = {},
                 Diagnostics* diagnostics = nullptr);

 protected:
  std::string transform(std::string_view content, const OperationPair& pair) const override;

 private:
  ChatClient& chat_;
  TaskKind task_kind_;
  PromptTemplate template_;
  Diagnostics* diagnostics_;
};

}  // namespace sctree
