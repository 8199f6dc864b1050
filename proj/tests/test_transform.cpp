#include <gtest/gtest.h>

#include <mutex>
#include <queue>

#include "sctree/diagnostics.hpp"
#include "sctree/errors.hpp"
#include "sctree/gateway.hpp"
#include "sctree/text.hpp"
#include "sctree/transform.hpp"

using namespace sctree;

namespace {

const OperationPair kPair{"Translate to French.", "Translate to English.", "en→fr→en"};

class ScriptedChat final : public ChatClient {
 public:
  struct Call {
    std::string system;
    std::string user;
  };

  void push(std::string reply) { replies_.push(std::move(reply)); }
  void push_error() { replies_.push("\x01throw"); }

  std::string chat(std::string_view system_text, std::string_view user_text) override {
    std::lock_guard lock(mutex_);
    calls.push_back({std::string(system_text), std::string(user_text)});
    if (replies_.empty()) throw GatewayError("no scripted reply", 500);
    std::string r = replies_.front();
    replies_.pop();
    if (r == "\x01throw") throw GatewayError("scripted failure", 503);
    return r;
  }

  std::vector<Call> calls;

 private:
  std::mutex mutex_;
  std::queue<std::string> replies_;
};

}  // namespace

TEST(MockChannel, ParseAndPrint) {
  EXPECT_EQ(MockChannel::parse("identity"), MockChannel::identity());
  EXPECT_EQ(MockChannel::parse("reverse"), MockChannel::reverse_words());
  EXPECT_EQ(MockChannel::parse("drop-last"), MockChannel::drop_last_words(1));
  EXPECT_EQ(MockChannel::parse("drop-last:4"), MockChannel::drop_last_words(4));
  EXPECT_EQ(MockChannel::parse("dropout:0.25:7"), MockChannel::seeded_word_dropout(0.25, 7));
  for (const char* spec : {"identity", "reverse", "drop-last:3", "dropout:0.1:99"}) {
    EXPECT_EQ(MockChannel::parse(spec).to_string(), spec);
  }
  for (const char* bad : {"", "noise", "drop-last:", "drop-last:x", "drop-lastt", "dropout:", "dropout:1.5:1",
                          "dropout:-0.1:1", "dropout:0.2:abc", "dropout:0.2x:1"}) {
    EXPECT_THROW(MockChannel::parse(bad), ConfigError) << bad;
  }
}

TEST(MockChannel, Identity) {
  EXPECT_EQ(apply_mock_channel("  a b\n c ", MockChannel::identity()), "  a b\n c ");
}

TEST(MockChannel, DropLastWords) {
  const auto one = MockChannel::drop_last_words(1);
  EXPECT_EQ(apply_mock_channel("the cat sat", one), "the cat");
  EXPECT_EQ(apply_mock_channel("  the\tcat  sat \n", one), "  the\tcat");
  EXPECT_EQ(apply_mock_channel("word", one), "");
  EXPECT_EQ(apply_mock_channel("", one), "");
  EXPECT_EQ(apply_mock_channel("a b c d", MockChannel::drop_last_words(2)), "a b");
  EXPECT_EQ(apply_mock_channel("a b", MockChannel::drop_last_words(2)), "");
}

TEST(MockChannel, ReverseIsExactInvolution) {
  const auto rev = MockChannel::reverse_words();
  EXPECT_EQ(apply_mock_channel("a b  c", rev), "c  b a");
  for (const char* s : {"", " ", "x", " lead", "trail ", "a\tb\n\nc  d ", "  ž é\tü  "}) {
    EXPECT_EQ(apply_mock_channel(apply_mock_channel(s, rev), rev), s) << s;
  }
}

TEST(MockChannel, SeededDropoutIsDeterministic) {
  const std::string text = "alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu";
  const auto a = MockChannel::seeded_word_dropout(0.3, 5);
  EXPECT_EQ(apply_mock_channel(text, a), apply_mock_channel(text, a));
  EXPECT_EQ(apply_mock_channel(text, MockChannel::seeded_word_dropout(0.0, 5)), text);
  EXPECT_EQ(apply_mock_channel(text, MockChannel::seeded_word_dropout(1.0, 5)), "");
  const auto out = apply_mock_channel(text, a);
  const auto kept = text::split_whitespace(out);
  EXPECT_LE(kept.size(), 12u);
  // survivors keep their relative order
  std::size_t pos = 0;
  for (auto token : kept) {
    pos = text.find(token, pos);
    ASSERT_NE(pos, std::string::npos);
  }
  bool any_differs = false;
  for (std::uint64_t seed = 0; seed < 8 && !any_differs; ++seed) {
    any_differs = apply_mock_channel(text, MockChannel::seeded_word_dropout(0.3, seed)) != out;
  }
  EXPECT_TRUE(any_differs);
}

TEST(Transformer, SentinelShortCircuits) {
  ScriptedChat chat;
  const LlmTransformer t(chat, TaskKind::translation);
  EXPECT_EQ(t.apply_pair("None", kPair), "None");
  EXPECT_TRUE(chat.calls.empty());
  const MockTransformer m(MockChannel::reverse_words());
  EXPECT_EQ(m.apply_pair("None", kPair), "None");
}

TEST(PromptTemplate, Substitution) {
  const PromptTemplate def;
  EXPECT_EQ(def.render_system("P", "C"), "P");
  EXPECT_EQ(def.render_user("P", "C"), "C");
  const PromptTemplate custom{"sys {prompt}!", "{prompt}\n---\n{content}{content}"};
  EXPECT_EQ(custom.render_system("P", "C"), "sys P!");
  EXPECT_EQ(custom.render_user("P", "{prompt}"), "P\n---\n{prompt}{prompt}");
}

TEST(LlmTransformer, ForwardThenInverse) {
  ScriptedChat chat;
  chat.push("Bonjour le monde.");
  chat.push("```\nHello world.\n```");
  Diagnostics diag;
  const LlmTransformer t(chat, TaskKind::translation, {}, &diag);
  EXPECT_EQ(t.apply_pair("Hello world.", kPair), "Hello world.");
  ASSERT_EQ(chat.calls.size(), 2u);
  EXPECT_EQ(chat.calls[0].system, kPair.forward_prompt);
  EXPECT_EQ(chat.calls[0].user, "Hello world.");
  EXPECT_EQ(chat.calls[1].system, kPair.inverse_prompt);
  EXPECT_EQ(chat.calls[1].user, "Bonjour le monde.");
  EXPECT_EQ(diag.size(), 0u);
}

TEST(LlmTransformer, ProgrammingExtractsFencedCode) {
  ScriptedChat chat;
  chat.push("Here you go:\n```python\ndef main(n):\n    return n\n```\n");
  chat.push("```python\ndef main(n):\n    total = n\n    return total\n```");
  const LlmTransformer t(chat, TaskKind::programming);
  EXPECT_EQ(t.apply_pair("def main(n): return n", kPair), "def main(n):\n    total = n\n    return total");
  EXPECT_EQ(chat.calls[1].user, "def main(n):\n    return n");
}

TEST(LlmTransformer, UnparseableResponseGivesSentinel) {
  ScriptedChat chat;
  chat.push("I cannot write code today.");
  Diagnostics diag;
  const LlmTransformer t(chat, TaskKind::programming, {}, &diag);
  EXPECT_EQ(t.apply_pair("def main(): return 1", kPair), "None");
  EXPECT_EQ(chat.calls.size(), 1u);
  ASSERT_EQ(diag.size(), 1u);
  EXPECT_EQ(diag.snapshot()[0].source, "transform");
}

TEST(LlmTransformer, GatewayFailureGivesSentinel) {
  ScriptedChat chat;
  chat.push("Bonjour");
  chat.push_error();
  Diagnostics diag;
  const LlmTransformer t(chat, TaskKind::translation, {}, &diag);
  EXPECT_EQ(t.apply_pair("Hello", kPair), "None");
  ASSERT_EQ(diag.size(), 1u);
  EXPECT_NE(diag.snapshot()[0].message.find("inverse"), std::string::npos);
}

TEST(LlmTransformer, EmptyTranslationGivesSentinel) {
  ScriptedChat chat;
  chat.push("   \n ");
  const LlmTransformer t(chat, TaskKind::translation);
  EXPECT_EQ(t.apply_pair("Hello", kPair), "None");
}
