#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>

#include "sctree/bench.hpp"
#include "sctree/diagnostics.hpp"
#include "sctree/errors.hpp"
#include "sctree/exec.hpp"
#include "sctree/gateway.hpp"

using namespace sctree;
namespace fs = std::filesystem;

namespace {

std::string field_of_yaml(const std::string& text) {
  try {
    benchmark_from_yaml(text);
  } catch (const ParseError& e) {
    return e.field();
  }
  return "<no error>";
}

TestInputs twenty(int offset = 0) {
  TestInputs inputs;
  for (int i = 0; i < 20; ++i) inputs.push_back(TestInput{{i + offset}});
  return inputs;
}

BenchmarkFile programming_file() {
  BenchmarkFile f;
  f.task_kind = TaskKind::programming;
  f.evaluator_model = "eval-model";
  f.pairs = default_operation_pairs(TaskKind::programming);
  f.roots.push_back({"Double a number.", "def main(n):\n    return n * 2\n", twenty()});
  f.roots.push_back({"Square a number.", "def main(n):\n    return n * n\n", twenty(5)});
  return f;
}

BenchmarkFile translation_file() {
  BenchmarkFile f;
  f.task_kind = TaskKind::translation;
  f.evaluator_model = "eval-model";
  f.pairs = default_operation_pairs(TaskKind::translation);
  f.roots.push_back({"", "def main():\n    return \"The harbour was quiet at dawn.\"\n", {}});
  f.roots.push_back({"", "def main():\n    return \"Snow fell over the old market.\"\n", {}});
  return f;
}

std::string programming_reply(int k, const std::string& body = "n * K") {
  std::string inputs;
  for (int i = 0; i < 20; ++i) inputs += "  - [" + std::to_string(i) + "]\n";
  std::string code = body;
  code = std::regex_replace(code, std::regex("K"), std::to_string(k));
  return "```yaml\nproblem: Multiply by " + std::to_string(k) + ".\ncode: |\n  def main(n):\n      return " + code +
         "\ninputs:\n" + inputs + "```\n";
}

// Replies by item index; a per-index script of replies is consumed in order.
class RootChat final : public ChatClient {
 public:
  std::function<std::string(int item, int attempt)> reply;
  std::atomic<int> calls{0};
  std::mutex mutex;
  std::vector<std::string> users;

  std::string chat(std::string_view, std::string_view user) override {
    ++calls;
    {
      std::lock_guard lock(mutex);
      users.emplace_back(user);
    }
    std::smatch m;
    const std::string u(user);
    if (!std::regex_search(u, m, std::regex("item (\\d+) of (\\d+)"))) throw GatewayError("unexpected prompt", 400);
    std::smatch a;
    int attempt = 1;
    if (std::regex_search(u, a, std::regex("[Aa]ttempt (\\d+)"))) attempt = std::stoi(a[1]);
    return reply(std::stoi(m[1]) - 1, attempt);
  }
};

}  // namespace

TEST(BenchDefaults, OperationPairs) {
  const auto tr = default_operation_pairs(TaskKind::translation);
  ASSERT_EQ(tr.size(), 3u);
  EXPECT_EQ(tr[0].label, "en→fr→en");
  EXPECT_EQ(tr[1].label, "en→es→en");
  EXPECT_EQ(tr[2].label, "en→de→en");
  const auto pr = default_operation_pairs(TaskKind::programming);
  ASSERT_EQ(pr.size(), 3u);
  for (const auto& p : pr) {
    EXPECT_FALSE(p.forward_prompt.empty());
    EXPECT_FALSE(p.inverse_prompt.empty());
  }
  const auto fr = translation_pair("en", "fr");
  EXPECT_EQ(fr.label, "en→fr→en");
  EXPECT_NE(fr.forward_prompt.find(language_name("fr")), std::string::npos);
  EXPECT_EQ(language_name("fr"), "French");
}

TEST(BenchValidate, FieldPaths) {
  EXPECT_NO_THROW(programming_file().validate());
  EXPECT_NO_THROW(translation_file().validate());
  const auto field_of = [](const BenchmarkFile& f) -> std::string {
    try {
      f.validate();
    } catch (const ParseError& e) {
      return e.field();
    }
    return "<no error>";
  };
  auto f = programming_file();
  f.roots[1].inputs.pop_back();
  EXPECT_EQ(field_of(f), "roots[1].inputs");
  f = programming_file();
  f.roots[1].content = f.roots[0].content;
  EXPECT_EQ(field_of(f), "roots[1].code");
  f = programming_file();
  f.roots[0].inputs[3].args = 5;
  EXPECT_EQ(field_of(f), "roots[0].inputs[3]");
  f = programming_file();
  f.pairs[2].label = f.pairs[0].label;
  EXPECT_EQ(field_of(f), "pairs[2].label");
  f = programming_file();
  f.evaluator_model.clear();
  EXPECT_EQ(field_of(f), "evaluator");
  f = translation_file();
  f.roots[0].inputs = {TestInput{{1}}};
  EXPECT_EQ(field_of(f), "roots[0].inputs");
  f = translation_file();
  f.roots.clear();
  EXPECT_EQ(field_of(f), "roots");
}

TEST(BenchYaml, RoundTrip) {
  for (const auto& f : {programming_file(), translation_file()}) {
    const auto yaml = benchmark_to_yaml(f);
    EXPECT_EQ(benchmark_from_yaml(yaml), f);
    EXPECT_EQ(benchmark_to_yaml(benchmark_from_yaml(yaml)), yaml);
  }
}

TEST(BenchYaml, ReadsHandWrittenBlockScalars) {
  std::string yaml =
      "task: programming\n"
      "evaluator: gpt-4o\n"
      "pairs:\n"
      "  - label: a\n    forward: Make it recursive.\n    inverse: Make it iterative.\n"
      "roots:\n"
      "  - problem: Add one.\n"
      "    code: |\n"
      "      def main(n):\n"
      "          return n + 1\n"
      "    inputs:\n";
  for (int i = 0; i < 20; ++i) yaml += "      - [" + std::to_string(i) + ", 'x', 2.5, null, true, [1, {k: v}]]\n";
  const auto f = benchmark_from_yaml(yaml);
  EXPECT_EQ(f.roots[0].content, "def main(n):\n    return n + 1\n");
  EXPECT_EQ(f.roots[0].inputs[7].args, nlohmann::json::parse(R"([7, "x", 2.5, null, true, [1, {"k": "v"}]])"));
}

TEST(BenchYaml, QuotedScalarsStayStrings) {
  std::string yaml = "task: programming\nevaluator: e\npairs:\n  - {label: a, forward: f, inverse: i}\nroots:\n"
                     "  - problem: p\n    code: \"def main(x): return x\"\n    inputs:\n";
  for (int i = 0; i < 20; ++i) yaml += "      - [\"12\", 'true', \"null\"]\n";
  const auto f = benchmark_from_yaml(yaml);
  EXPECT_EQ(f.roots[0].inputs[0].args, nlohmann::json::parse(R"(["12", "true", "null"])"));
}

TEST(BenchYaml, SchemaErrors) {
  const std::string pairs = "pairs:\n  - {label: a, forward: f, inverse: i}\n";
  EXPECT_EQ(field_of_yaml("task: [unclosed\n"), "document");
  EXPECT_EQ(field_of_yaml("- 1\n- 2\n"), "document");
  EXPECT_EQ(field_of_yaml("task: poetry\nevaluator: e\n" + pairs + "roots:\n  - code: x\n"), "task");
  EXPECT_EQ(field_of_yaml("task: translation\n" + pairs + "roots:\n  - code: x\n"), "evaluator");
  EXPECT_EQ(field_of_yaml("task: translation\nevaluator: e\n" + pairs + "roots:\n  - code: x\nextra: 1\n"), "extra");
  EXPECT_EQ(field_of_yaml("task: translation\nevaluator: e\npairs:\n  - {label: a, forward: f}\nroots:\n  - code: x\n"),
            "pairs[0].inverse");
  EXPECT_EQ(field_of_yaml("task: translation\nevaluator: e\n" + pairs + "roots:\n  - code: x\n    colour: red\n"),
            "roots[0].colour");
  EXPECT_EQ(field_of_yaml("task: programming\nevaluator: e\n" + pairs +
                          "roots:\n  - problem: p\n    code: 'def main(): pass'\n    inputs: [[1], [2]]\n"),
            "roots[0].inputs");
  EXPECT_EQ(field_of_yaml("task: programming\nevaluator: e\n" + pairs +
                          "roots:\n  - problem: p\n    code: 'def main(): pass'\n    inputs: [1, 2]\n"),
            "roots[0].inputs[0]");
}

TEST(BenchFile, SaveAndLoad) {
  const auto dir = fs::temp_directory_path() / ("sctree-bench-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto path = dir / "bench.yaml";
  save_benchmark(programming_file(), path);
  EXPECT_EQ(load_benchmark(path), programming_file());
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  EXPECT_THROW(load_benchmark(dir / "missing.yaml"), ConfigError);
  auto bad = programming_file();
  bad.roots.clear();
  EXPECT_THROW(save_benchmark(bad, dir / "bad.yaml"), ParseError);
  EXPECT_FALSE(fs::exists(dir / "bad.yaml"));
  fs::remove_all(dir);
}

TEST(BenchSmoke, ReportsFailingCases) {
  const ExecHarness harness({{SCTREE_STUB_WORKER}, 4});
  EXPECT_TRUE(smoke_check(programming_file(), harness, std::chrono::milliseconds(2000)).empty());
  EXPECT_TRUE(smoke_check(translation_file(), harness, std::chrono::milliseconds(2000)).empty());
  auto f = programming_file();
  f.roots[1].content = "def main(n):\n    return 10 // (n - 7)\n";
  const auto failures = smoke_check(f, harness, std::chrono::milliseconds(2000));
  ASSERT_EQ(failures.size(), 1u);
  EXPECT_NE(failures[0].find("roots[1] case 2"), std::string::npos) << failures[0];
}

TEST(ParseRootReply, Programming) {
  const auto root = parse_root_reply(programming_reply(3), TaskKind::programming);
  EXPECT_EQ(root.problem, "Multiply by 3.");
  EXPECT_EQ(root.content, "def main(n):\n    return n * 3");
  ASSERT_EQ(root.inputs.size(), 20u);
  EXPECT_EQ(root.inputs[4].args, nlohmann::json::array({4}));
  EXPECT_THROW(parse_root_reply("no yaml here", TaskKind::programming), ParseError);
  EXPECT_THROW(parse_root_reply("problem: p\ncode: 'x = 1'\ninputs: []\n", TaskKind::programming), ParseError);
  EXPECT_THROW(parse_root_reply("problem: p\ncode: 'def main(n): return n'\ninputs: [[1]]\n", TaskKind::programming),
               ParseError);
}

TEST(ParseRootReply, Translation) {
  const auto a = parse_root_reply("code: |\n  def main():\n      return \"Hi.\"\n", TaskKind::translation);
  EXPECT_EQ(a.content, "def main():\n    return \"Hi.\"");
  EXPECT_TRUE(a.inputs.empty());
  const auto b = parse_root_reply("```python\ndef main():\n    return 'Hi.'\n```", TaskKind::translation);
  EXPECT_EQ(b.content, "def main():\n    return 'Hi.'");
  EXPECT_THROW(parse_root_reply("Just a paragraph.", TaskKind::translation), ParseError);
}

TEST(ProposePairs, ParsesLanguagesOrFallsBack) {
  struct Fixed final : ChatClient {
    std::string answer;
    bool fail = false;
    std::string chat(std::string_view, std::string_view) override {
      if (fail) throw GatewayError("down", 503);
      return answer;
    }
  } chat;
  chat.answer = "```yaml\n- ja\n- ko\n- cs\n```";
  const auto pairs = propose_operation_pairs(TaskKind::translation, chat);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0].label, "en→ja→en");
  EXPECT_EQ(pairs[2].label, "en→cs→en");

  Diagnostics diag;
  chat.answer = "I like many languages";
  EXPECT_EQ(propose_operation_pairs(TaskKind::translation, chat, &diag), default_operation_pairs(TaskKind::translation));
  EXPECT_GE(diag.size(), 1u);
  chat.fail = true;
  EXPECT_EQ(propose_operation_pairs(TaskKind::translation, chat), default_operation_pairs(TaskKind::translation));
  EXPECT_EQ(propose_operation_pairs(TaskKind::programming, chat), default_operation_pairs(TaskKind::programming));
}

TEST(GenerateRoots, AcceptsDistinctPassingRoots) {
  RootChat chat;
  chat.reply = [](int item, int) { return programming_reply(item + 2); };
  const ExecHarness harness({{SCTREE_STUB_WORKER}, 4});
  GenerationOptions opts;
  opts.root_count = 4;
  opts.max_parallel = 4;
  const auto roots = generate_roots(MetaPrompt::default_for(TaskKind::programming), chat, harness, opts);
  ASSERT_EQ(roots.size(), 4u);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    EXPECT_EQ(roots[i].content, "def main(n):\n    return n * " + std::to_string(i + 2));
  }
  EXPECT_EQ(chat.calls.load(), 4);
}

TEST(GenerateRoots, RegeneratesBadRoots) {
  RootChat chat;
  // item 1 first crashes on some input, then duplicates item 0, then succeeds
  chat.reply = [](int item, int attempt) {
    if (item == 1 && attempt == 1) return programming_reply(0, "10 // (n - 3)");
    if (item == 1 && attempt == 2) return programming_reply(2);
    return programming_reply(item + 2);
  };
  const ExecHarness harness({{SCTREE_STUB_WORKER}, 4});
  GenerationOptions opts;
  opts.root_count = 2;
  Diagnostics diag;
  const auto roots = generate_roots(MetaPrompt::default_for(TaskKind::programming), chat, harness, opts, &diag);
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_EQ(roots[1].content, "def main(n):\n    return n * 3");
  EXPECT_EQ(chat.calls.load(), 4);
  EXPECT_EQ(diag.size(), 2u);
}

TEST(GenerateRoots, GivesUpAfterMaxAttempts) {
  RootChat chat;
  chat.reply = [](int item, int) { return item == 0 ? std::string("garbage") : programming_reply(item + 2); };
  const ExecHarness harness({{SCTREE_STUB_WORKER}, 2});
  GenerationOptions opts;
  opts.root_count = 2;
  opts.max_attempts = 3;
  try {
    generate_roots(MetaPrompt::default_for(TaskKind::programming), chat, harness, opts);
    FAIL() << "expected BenchmarkGenerationError";
  } catch (const BenchmarkGenerationError& e) {
    EXPECT_NE(std::string(e.what()).find("root 0"), std::string::npos);
    EXPECT_EQ(std::string(e.what()).find("root 1"), std::string::npos);
  }
  EXPECT_EQ(chat.calls.load(), 4);
}

TEST(GenerateRoots, RequestsNameTheItem) {
  RootChat chat;
  chat.reply = [](int item, int) {
    return "code: |\n  def main():\n      return \"Story " + std::to_string(item) + ".\"\n";
  };
  GenerationOptions opts;
  opts.root_count = 3;
  const ExecHarness harness({{SCTREE_STUB_WORKER}, 1});
  const auto roots = generate_roots(MetaPrompt::default_for(TaskKind::translation), chat, harness, opts);
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NE(chat.users[0].find("item 1 of 3"), std::string::npos);
  EXPECT_THROW(generate_roots(MetaPrompt::default_for(TaskKind::translation), chat, harness, {0}), ConfigError);
}
